#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kmapper/dataset.hpp"
#include "kmapper/error.hpp"
#include "kmapper/relation.hpp"

namespace kmapper {

enum class NodeStatus { Hub, Active, Inactive };
enum class LinkStrength { Strong, Weak };
enum class LinkSign { Positive, Negative, Complex };

constexpr std::string_view to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::Hub: return "hub";
    case NodeStatus::Active: return "active";
    case NodeStatus::Inactive: return "inactive";
  }
  return "inactive";
}

constexpr std::string_view to_string(LinkStrength s) { return s == LinkStrength::Strong ? "strong" : "weak"; }

constexpr std::string_view to_string(LinkSign s) {
  switch (s) {
    case LinkSign::Positive: return "positive";
    case LinkSign::Negative: return "negative";
    case LinkSign::Complex: return "complex";
  }
  return "complex";
}

struct MapNode {
  std::string name;
  Role role = Role::Internal;
  NodeStatus status = NodeStatus::Inactive;
  std::size_t degree = 0;
  bool operator==(const MapNode&) const = default;
};

/// Undirected link in canonical form (a < b).
struct MapLink {
  std::string a;
  std::string b;
  LinkStrength strength = LinkStrength::Weak;
  LinkSign sign = LinkSign::Positive;
  PairRelation relation;
  bool operator==(const MapLink&) const = default;
};

using Edge = std::pair<std::string, std::string>;

struct KnowledgeMap {
  std::vector<MapNode> nodes;
  std::vector<MapLink> links;
  RelationThresholds thresholds;
  std::optional<WindowOrigin> source;  // nullopt = full history

  const MapNode* find_node(std::string_view name) const {
    for (const auto& n : nodes)
      if (n.name == name) return &n;
    return nullptr;
  }

  std::set<std::string> node_names() const {
    std::set<std::string> out;
    for (const auto& n : nodes) out.insert(n.name);
    return out;
  }

  std::set<std::string> nodes_with(NodeStatus status) const {
    std::set<std::string> out;
    for (const auto& n : nodes)
      if (n.status == status) out.insert(n.name);
    return out;
  }

  std::set<Edge> edges(std::optional<LinkStrength> strength = std::nullopt) const {
    std::set<Edge> out;
    for (const auto& l : links)
      if (!strength || l.strength == *strength) out.emplace(l.a, l.b);
    return out;
  }

  bool operator==(const KnowledgeMap&) const = default;
};

/// Hub degree threshold max(2, ceil(mean + std)) over nodes with degree > 0,
/// std being the population deviation. Evaluated in integer arithmetic:
/// T >= mean + std  <=>  T*n - S >= sqrt(n*Q - S^2).
inline std::size_t hub_threshold(const std::vector<std::size_t>& degrees) {
  std::int64_t n = 0, s = 0, q = 0;
  for (auto d : degrees) {
    if (d == 0) continue;
    const auto di = static_cast<std::int64_t>(d);
    ++n;
    s += di;
    q += di * di;
  }
  if (n == 0) return 2;
  const std::int64_t spread = n * q - s * s;
  std::int64_t t = (s + n - 1) / n;
  while (true) {
    const std::int64_t gap = t * n - s;
    if (gap >= 0 && gap * gap >= spread) break;
    ++t;
  }
  return static_cast<std::size_t>(std::max<std::int64_t>(2, t));
}

/// Hubs are nodes whose degree reaches hub_threshold. When none does, the
/// nodes attaining the maximum degree are hubs provided that maximum is >= 2.
inline std::set<std::string> identify_hubs(const KnowledgeMap& map) {
  std::vector<std::size_t> degrees;
  for (const auto& n : map.nodes) degrees.push_back(n.degree);
  std::set<std::string> hubs;
  if (std::all_of(degrees.begin(), degrees.end(), [](auto d) { return d == 0; })) return hubs;

  const auto threshold = hub_threshold(degrees);
  for (const auto& n : map.nodes)
    if (n.degree >= threshold) hubs.insert(n.name);
  if (!hubs.empty()) return hubs;

  const auto max_degree = *std::max_element(degrees.begin(), degrees.end());
  if (max_degree >= 2) {
    for (const auto& n : map.nodes)
      if (n.degree == max_degree) hubs.insert(n.name);
  }
  return hubs;
}

inline std::optional<MapLink> link_from_relation(PairRelation rel) {
  MapLink link;
  switch (rel.relation_class) {
    case RelationClass::StrongPositive: link.strength = LinkStrength::Strong; link.sign = LinkSign::Positive; break;
    case RelationClass::StrongNegative: link.strength = LinkStrength::Strong; link.sign = LinkSign::Negative; break;
    case RelationClass::WeakPositive: link.strength = LinkStrength::Weak; link.sign = LinkSign::Positive; break;
    case RelationClass::WeakNegative: link.strength = LinkStrength::Weak; link.sign = LinkSign::Negative; break;
    case RelationClass::Complex: link.strength = LinkStrength::Weak; link.sign = LinkSign::Complex; break;
    case RelationClass::NoCorrelation: return std::nullopt;
  }
  link.a = rel.var_a;
  link.b = rel.var_b;
  link.relation = std::move(rel);
  return link;
}

/// Recomputes degrees from the link list, then statuses (inactive, active, hub).
inline void finalize_nodes(KnowledgeMap& map) {
  for (auto& n : map.nodes) n.degree = 0;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < map.nodes.size(); ++i) index[map.nodes[i].name] = i;
  for (const auto& l : map.links) {
    auto ia = index.find(l.a), ib = index.find(l.b);
    if (ia == index.end() || ib == index.end())
      throw Error(ErrorKind::MalformedMap, "link " + l.a + "--" + l.b + " references an unknown node");
    ++map.nodes[ia->second].degree;
    ++map.nodes[ib->second].degree;
  }
  for (auto& n : map.nodes) n.status = n.degree == 0 ? NodeStatus::Inactive : NodeStatus::Active;
  for (const auto& name : identify_hubs(map)) map.nodes[index[name]].status = NodeStatus::Hub;
}

/// Classifies every unordered variable pair and links the related ones.
inline KnowledgeMap build_map(const TimeSeriesTable& table, const RelationThresholds& th = {}) {
  th.validate();
  if (table.width() < 2)
    throw Error(ErrorKind::TooFewVariables, std::to_string(table.width()) + " variable(s), need at least 2");
  if (table.length() < th.min_points)
    throw Error(ErrorKind::TooFewPoints, std::to_string(table.length()) + " time points, need " +
                                             std::to_string(th.min_points));
  KnowledgeMap map;
  map.thresholds = th;
  map.source = table.origin();
  for (const auto& v : table.variables()) map.nodes.push_back({v, table.role(v), NodeStatus::Inactive, 0});

  const auto& vars = table.variables();
  for (std::size_t i = 0; i < vars.size(); ++i) {
    for (std::size_t j = i + 1; j < vars.size(); ++j) {
      const auto& a = std::min(vars[i], vars[j]);
      const auto& b = std::max(vars[i], vars[j]);
      PairRelation rel;
      try {
        rel = classify_relation(table, a, b, th);
      } catch (const Error& e) {
        throw Error(e.kind(), "pair " + a + "/" + b + ": " + e.what());
      }
      if (auto link = link_from_relation(std::move(rel))) map.links.push_back(std::move(*link));
    }
  }
  std::sort(map.links.begin(), map.links.end(),
            [](const MapLink& x, const MapLink& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  finalize_nodes(map);
  return map;
}

// ---------------------------------------------------------------------------
// Design structure matrix

enum class DsmCell { Empty, Weak, Strong };

struct Dsm {
  std::vector<std::string> order;
  std::vector<std::vector<DsmCell>> cells;  // diagonal cells are Empty; names live in `order`
};

/// Node order: input roles, then internal, then output; alphabetical within a role.
inline std::vector<std::string> dsm_order(const KnowledgeMap& map) {
  std::vector<const MapNode*> sorted;
  for (const auto& n : map.nodes) sorted.push_back(&n);
  std::sort(sorted.begin(), sorted.end(), [](const MapNode* x, const MapNode* y) {
    return std::make_pair(static_cast<int>(x->role), x->name) < std::make_pair(static_cast<int>(y->role), y->name);
  });
  std::vector<std::string> order;
  for (auto* n : sorted) order.push_back(n->name);
  return order;
}

inline Dsm to_dsm(const KnowledgeMap& map) {
  Dsm dsm;
  dsm.order = dsm_order(map);
  const auto n = dsm.order.size();
  dsm.cells.assign(n, std::vector<DsmCell>(n, DsmCell::Empty));
  std::map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < n; ++i) pos[dsm.order[i]] = i;
  for (const auto& l : map.links) {
    const auto cell = l.strength == LinkStrength::Strong ? DsmCell::Strong : DsmCell::Weak;
    const auto i = pos.at(l.a), j = pos.at(l.b);
    dsm.cells[i][j] = cell;
    dsm.cells[j][i] = cell;
  }
  return dsm;
}

/// CSV with names as row/column headers and on the diagonal; off-diagonal
/// cells are "", "W" or "S".
inline std::string dsm_csv(const Dsm& dsm) {
  std::ostringstream s;
  for (const auto& name : dsm.order) s << ',' << detail::quote_if_needed(name);
  s << '\n';
  for (std::size_t i = 0; i < dsm.order.size(); ++i) {
    s << detail::quote_if_needed(dsm.order[i]);
    for (std::size_t j = 0; j < dsm.order.size(); ++j) {
      s << ',';
      if (i == j) s << detail::quote_if_needed(dsm.order[i]);
      else if (dsm.cells[i][j] == DsmCell::Strong) s << 'S';
      else if (dsm.cells[i][j] == DsmCell::Weak) s << 'W';
    }
    s << '\n';
  }
  return s.str();
}

// ---------------------------------------------------------------------------
// Graphviz

namespace detail {

inline std::string dot_id(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline constexpr std::string_view kHubRed = "#cc0000";
inline constexpr std::string_view kInputFill = "#2e7d32";
inline constexpr std::string_view kOutputFill = "#1565c0";

inline std::string_view role_fill(Role role) {
  switch (role) {
    case Role::Input: return kInputFill;
    case Role::Output: return kOutputFill;
    case Role::Internal: return kHubRed;
  }
  return kHubRed;
}

}  // namespace detail

/// Undirected DOT graph. Hubs are red discs, inactive nodes white squares,
/// other nodes squares filled by role; strong links black, weak links gray.
inline std::string export_dot(const KnowledgeMap& map) {
  std::ostringstream s;
  s << "graph kmap {\n";
  s << "  node [fontname=\"Helvetica\", style=filled];\n";
  for (const auto& name : dsm_order(map)) {
    const MapNode& n = *map.find_node(name);
    s << "  " << detail::dot_id(n.name) << " [";
    switch (n.status) {
      case NodeStatus::Hub:
        s << "shape=circle, fillcolor=\"" << detail::kHubRed << "\", fontcolor=\"#ffffff\"";
        if (n.role != Role::Internal) s << ", color=\"" << detail::role_fill(n.role) << "\", penwidth=3";
        break;
      case NodeStatus::Active:
        s << "shape=square, fillcolor=\"" << detail::role_fill(n.role) << "\", fontcolor=\"#ffffff\"";
        break;
      case NodeStatus::Inactive:
        s << "shape=square, fillcolor=\"#ffffff\"";
        if (n.role != Role::Internal) s << ", color=\"" << detail::role_fill(n.role) << "\"";
        break;
    }
    s << ", role=\"" << to_string(n.role) << "\", degree=" << n.degree << "];\n";
  }
  for (const auto& l : map.links) {
    s << "  " << detail::dot_id(l.a) << " -- " << detail::dot_id(l.b) << " [";
    if (l.strength == LinkStrength::Strong) s << "color=black, style=solid, penwidth=2";
    else s << "color=gray, style=" << (l.sign == LinkSign::Complex ? "dashed" : "solid") << ", penwidth=1";
    s << ", label=\"" << (l.sign == LinkSign::Positive ? "+" : l.sign == LinkSign::Negative ? "-" : "~") << "\"];\n";
  }
  s << "}\n";
  return s.str();
}

// ---------------------------------------------------------------------------
// JSON

inline constexpr std::string_view kMapSchema = "kmap-1";

/// Rounds to 12 significant digits so the serialized text carries no more.
inline double round_sig12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

inline nlohmann::ordered_json map_to_json(const KnowledgeMap& map) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = std::string(kMapSchema);
  if (map.source) j["source"] = {{"kind", "window"}, {"start", map.source->start}, {"size", map.source->size}};
  else j["source"] = {{"kind", "full"}};
  j["thresholds"] = {{"t_strong", round_sig12(map.thresholds.t_strong)},
                     {"t_weak", round_sig12(map.thresholds.t_weak)},
                     {"t_complex_nmi", round_sig12(map.thresholds.t_complex_nmi)},
                     {"min_points", map.thresholds.min_points}};
  ordered_json nodes = ordered_json::array();
  for (const auto& n : map.nodes) {
    nodes.push_back({{"name", n.name},
                     {"role", std::string(to_string(n.role))},
                     {"status", std::string(to_string(n.status))},
                     {"degree", n.degree}});
  }
  j["nodes"] = std::move(nodes);
  ordered_json links = ordered_json::array();
  for (const auto& l : map.links) {
    const auto& r = l.relation;
    links.push_back({{"a", l.a},
                     {"b", l.b},
                     {"strength", std::string(to_string(l.strength))},
                     {"sign", std::string(to_string(l.sign))},
                     {"relation",
                      {{"var_a", r.var_a},
                       {"var_b", r.var_b},
                       {"n_used", r.n_used},
                       {"bins", r.bins},
                       {"pearson_r", round_sig12(r.pearson_r)},
                       {"spearman_rho", round_sig12(r.spearman_rho)},
                       {"nmi", round_sig12(r.nmi)},
                       {"class", std::string(to_string(r.relation_class))}}}});
  }
  j["links"] = std::move(links);
  return j;
}

inline std::string export_json(const KnowledgeMap& map) { return map_to_json(map).dump(2) + "\n"; }

namespace detail {

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& text, const Enum (&values)[N]) {
  for (auto v : values)
    if (to_string(v) == text) return v;
  throw Error(ErrorKind::MalformedMap, "unexpected value '" + text + "'");
}

}  // namespace detail

/// Inverse of export_json. Degrees and statuses are checked against a recount.
inline KnowledgeMap map_from_json(const nlohmann::ordered_json& j) {
  try {
    if (j.at("schema").get<std::string>() != kMapSchema)
      throw Error(ErrorKind::MalformedMap, "unsupported schema '" + j.at("schema").get<std::string>() + "'");
    KnowledgeMap map;
    const auto& src = j.at("source");
    if (src.at("kind").get<std::string>() == "window")
      map.source = WindowOrigin{src.at("start").get<std::size_t>(), src.at("size").get<std::size_t>()};
    const auto& th = j.at("thresholds");
    map.thresholds.t_strong = th.at("t_strong").get<double>();
    map.thresholds.t_weak = th.at("t_weak").get<double>();
    map.thresholds.t_complex_nmi = th.at("t_complex_nmi").get<double>();
    map.thresholds.min_points = th.at("min_points").get<std::size_t>();

    static constexpr Role roles[] = {Role::Input, Role::Internal, Role::Output};
    static constexpr NodeStatus statuses[] = {NodeStatus::Hub, NodeStatus::Active, NodeStatus::Inactive};
    static constexpr LinkStrength strengths[] = {LinkStrength::Strong, LinkStrength::Weak};
    static constexpr LinkSign signs[] = {LinkSign::Positive, LinkSign::Negative, LinkSign::Complex};
    for (const auto& n : j.at("nodes")) {
      map.nodes.push_back({n.at("name").get<std::string>(), detail::parse_enum(n.at("role").get<std::string>(), roles),
                           detail::parse_enum(n.at("status").get<std::string>(), statuses),
                           n.at("degree").get<std::size_t>()});
    }
    for (const auto& l : j.at("links")) {
      MapLink link;
      link.a = l.at("a").get<std::string>();
      link.b = l.at("b").get<std::string>();
      link.strength = detail::parse_enum(l.at("strength").get<std::string>(), strengths);
      link.sign = detail::parse_enum(l.at("sign").get<std::string>(), signs);
      const auto& r = l.at("relation");
      link.relation.var_a = r.at("var_a").get<std::string>();
      link.relation.var_b = r.at("var_b").get<std::string>();
      link.relation.n_used = r.at("n_used").get<std::size_t>();
      link.relation.bins = r.at("bins").get<std::size_t>();
      link.relation.pearson_r = r.at("pearson_r").get<double>();
      link.relation.spearman_rho = r.at("spearman_rho").get<double>();
      link.relation.nmi = r.at("nmi").get<double>();
      link.relation.relation_class = parse_relation_class(r.at("class").get<std::string>());
      if (!(link.a < link.b)) throw Error(ErrorKind::MalformedMap, "link endpoints not in canonical order");
      map.links.push_back(std::move(link));
    }
    KnowledgeMap recount = map;
    finalize_nodes(recount);
    if (recount.nodes != map.nodes)
      throw Error(ErrorKind::MalformedMap, "node degrees or statuses disagree with the link list");
    return map;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedMap, e.what());
  }
}

inline KnowledgeMap load_map_json(std::string_view text) {
  try {
    return map_from_json(nlohmann::ordered_json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedMap, e.what());
  }
}

}  // namespace kmapper
