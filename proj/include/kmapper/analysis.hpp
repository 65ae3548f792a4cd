#pragma once

#include <algorithm>
#include <cstdio>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kmapper/dataset.hpp"
#include "kmapper/kmap.hpp"

namespace kmapper {

struct MapFeatures {
  std::size_t n_links = 0;
  std::size_t n_strong = 0;
  std::size_t n_weak = 0;
  double density = 0.0;
  std::set<std::string> hubs;
  std::set<std::string> inactive;
  bool operator==(const MapFeatures&) const = default;
};

inline MapFeatures features_of(const KnowledgeMap& map) {
  MapFeatures f;
  for (const auto& l : map.links) {
    ++f.n_links;
    if (l.strength == LinkStrength::Strong) ++f.n_strong;
    else ++f.n_weak;
  }
  const auto v = map.nodes.size();
  const auto pairs = v * (v - (v > 0 ? 1 : 0)) / 2;
  f.density = pairs == 0 ? 0.0 : static_cast<double>(f.n_links) / static_cast<double>(pairs);
  f.hubs = map.nodes_with(NodeStatus::Hub);
  f.inactive = map.nodes_with(NodeStatus::Inactive);
  return f;
}

struct StaticResult {
  KnowledgeMap map;
  MapFeatures features;
};

/// One map over the whole table.
inline StaticResult static_analysis(const TimeSeriesTable& table, const RelationThresholds& th = {}) {
  StaticResult r{build_map(table, th), {}};
  r.features = features_of(r.map);
  return r;
}

/// |A n B| / |A u B|; two empty sets are identical (1).
template <typename T>
double jaccard(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<T> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  const auto union_size = a.size() + b.size() - common.size();
  return static_cast<double>(common.size()) / static_cast<double>(union_size);
}

namespace detail {

inline std::string join_edges(const std::vector<Edge>& edges) {
  if (edges.empty()) return "none";
  std::string out;
  for (const auto& e : edges) out += (out.empty() ? "" : ", ") + e.first + "--" + e.second;
  return out;
}

inline std::string join_names(const std::set<std::string>& names) {
  std::string out = "{";
  for (const auto& n : names) out += (out.size() > 1 ? "," : "") + n;
  return out + "}";
}

}  // namespace detail

/// Alarm when the strong-link sets of consecutive maps overlap too little
/// (Jaccard strictly below jaccard_min) or the hub set is replaced outright.
inline std::optional<std::string> detect_alarm(const KnowledgeMap& prev, const KnowledgeMap& curr,
                                               double jaccard_min = 0.5) {
  if (!(jaccard_min >= 0.0 && jaccard_min <= 1.0))
    throw Error(ErrorKind::InvalidConfig, "jaccard_min must lie in [0, 1]");
  if (prev.node_names() != curr.node_names())
    throw Error(ErrorKind::VariableSetMismatch, "maps cover different variables");

  std::vector<std::string> reasons;
  const auto ps = prev.edges(LinkStrength::Strong);
  const auto cs = curr.edges(LinkStrength::Strong);
  const double sim = jaccard(ps, cs);
  if (sim < jaccard_min) {
    std::vector<Edge> lost, gained;
    std::set_difference(ps.begin(), ps.end(), cs.begin(), cs.end(), std::back_inserter(lost));
    std::set_difference(cs.begin(), cs.end(), ps.begin(), ps.end(), std::back_inserter(gained));
    char buf[96];
    std::snprintf(buf, sizeof buf, "strong-link jaccard %.3f < %.3f", sim, jaccard_min);
    reasons.push_back(std::string(buf) + " (lost: " + detail::join_edges(lost) +
                      "; gained: " + detail::join_edges(gained) + ")");
  }

  const auto ph = prev.nodes_with(NodeStatus::Hub);
  const auto ch = curr.nodes_with(NodeStatus::Hub);
  std::vector<std::string> shared;
  std::set_intersection(ph.begin(), ph.end(), ch.begin(), ch.end(), std::back_inserter(shared));
  if (shared.empty() && (!ph.empty() || !ch.empty()))
    reasons.push_back("hub set replaced " + detail::join_names(ph) + " -> " + detail::join_names(ch));

  if (reasons.empty()) return std::nullopt;
  std::string out;
  for (const auto& r : reasons) out += (out.empty() ? "" : "; ") + r;
  return out;
}

struct WindowResult {
  std::size_t start = 0;
  std::size_t size = 0;
  std::string start_label;
  KnowledgeMap map;
  MapFeatures features;
};

struct Alarm {
  std::size_t window = 0;  // index into MapTimeline::windows, always >= 1
  std::string reason;
};

struct MapTimeline {
  std::vector<WindowResult> windows;
  std::vector<Alarm> alarms;

  const Alarm* alarm_at(std::size_t window) const {
    for (const auto& a : alarms)
      if (a.window == window) return &a;
    return nullptr;
  }
};

inline MapTimeline time_domain_analysis(const TimeSeriesTable& table, const WindowSpec& spec,
                                        const RelationThresholds& th = {}, double jaccard_min = 0.5) {
  MapTimeline timeline;
  const auto windows = sliding_windows(table, spec);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    auto result = static_analysis(windows[i], th);
    timeline.windows.push_back({i * spec.stride, spec.size, windows[i].time_labels().front(), std::move(result.map),
                                std::move(result.features)});
  }
  for (std::size_t i = 1; i < timeline.windows.size(); ++i) {
    if (auto reason = detect_alarm(timeline.windows[i - 1].map, timeline.windows[i].map, jaccard_min))
      timeline.alarms.push_back({i, std::move(*reason)});
  }
  return timeline;
}

inline nlohmann::ordered_json features_json(const MapFeatures& f) {
  return {{"n_links", f.n_links},
          {"n_strong", f.n_strong},
          {"n_weak", f.n_weak},
          {"density", round_sig12(f.density)},
          {"hubs", f.hubs},
          {"inactive", f.inactive}};
}

/// Array with one object per window; "alarm" is null or the alarm reason.
inline std::string timeline_json(const MapTimeline& timeline) {
  auto arr = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < timeline.windows.size(); ++i) {
    const auto& w = timeline.windows[i];
    nlohmann::ordered_json entry;
    entry["index"] = i;
    entry["start"] = w.start;
    entry["start_label"] = w.start_label;
    entry["size"] = w.size;
    entry["features"] = features_json(w.features);
    if (const auto* a = timeline.alarm_at(i)) entry["alarm"] = a->reason;
    else entry["alarm"] = nullptr;
    arr.push_back(std::move(entry));
  }
  return arr.dump(2) + "\n";
}

inline std::string features_text(const MapFeatures& f) {
  char density[32];
  std::snprintf(density, sizeof density, "%.6f", f.density);
  std::ostringstream s;
  s << "links: " << f.n_links << "\n"
    << "strong: " << f.n_strong << "\n"
    << "weak: " << f.n_weak << "\n"
    << "density: " << density << "\n"
    << "hubs: " << detail::join_names(f.hubs) << "\n"
    << "inactive: " << detail::join_names(f.inactive) << "\n";
  return s.str();
}

inline std::string timeline_summary(const MapTimeline& timeline) {
  std::ostringstream s;
  s << timeline.windows.size() << " window(s), " << timeline.alarms.size() << " alarm(s)\n";
  for (std::size_t i = 0; i < timeline.windows.size(); ++i) {
    const auto& w = timeline.windows[i];
    s << "  [" << i << "] from " << w.start_label << ": " << w.features.n_strong << " strong, " << w.features.n_weak
      << " weak, hubs " << detail::join_names(w.features.hubs);
    if (const auto* a = timeline.alarm_at(i)) s << "  ALARM: " << a->reason;
    s << "\n";
  }
  return s.str();
}

}  // namespace kmapper
