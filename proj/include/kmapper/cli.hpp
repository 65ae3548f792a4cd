#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kmapper/analysis.hpp"
#include "kmapper/dataset.hpp"
#include "kmapper/fcm.hpp"
#include "kmapper/fuzzy.hpp"
#include "kmapper/kmap.hpp"
#include "kmapper/relation.hpp"
#include "kmapper/scatter.hpp"
#include "kmapper/synth.hpp"

namespace kmapper::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAlarm = 2;

struct RunConfig {
  std::string input;
  std::string out_dir;
  std::string roles_path;
  std::map<std::string, Role> roles;  // from --config role.<var>= lines
  RelationThresholds thresholds;
  WindowSpec window{0, 1};
  std::size_t k = 3;
  std::uint64_t seed = 2004;
  double jaccard_min = 0.5;

  std::string var_x, var_y;
  std::vector<std::string> antecedents;
  std::string consequent;

  std::string model_path;
  std::vector<double> initial_state;
  std::size_t iters = 1000;
  double eps = 1e-6;

  std::string synth_kind = "financial";
};

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Collects produced files and writes them plus manifest.txt into one directory.
class RunDir {
 public:
  explicit RunDir(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + (dir_ / name).string() + "'");
    out << content;
    if (!out) throw Error(ErrorKind::Io, "write failed for '" + (dir_ / name).string() + "'");
    files_.push_back(name);
  }

  void write_manifest(const std::string& command, const std::vector<std::pair<std::string, std::string>>& config) {
    std::ostringstream s;
    s << "command=" << command << "\n";
    for (const auto& [k, v] : config) s << k << "=" << v << "\n";
    s << "files:\n";
    for (const auto& f : files_) s << "  " << f << "\n";
    std::ofstream out(dir_ / "manifest.txt", std::ios::binary | std::ios::trunc);
    out << s.str();
  }

  const fs::path& path() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

inline std::vector<std::pair<std::string, std::string>> threshold_entries(const RunConfig& c) {
  return {{"t-strong", num(c.thresholds.t_strong)},
          {"t-weak", num(c.thresholds.t_weak)},
          {"t-nmi", num(c.thresholds.t_complex_nmi)},
          {"min-points", std::to_string(c.thresholds.min_points)}};
}

inline TimeSeriesTable load_input(const RunConfig& c) {
  if (c.input.empty()) throw Error(ErrorKind::InvalidConfig, "--input is required");
  auto table = load_table_file(c.input);
  auto roles = c.roles;
  if (!c.roles_path.empty()) {
    std::ifstream in(c.roles_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + c.roles_path + "'");
    for (auto& [name, role] : load_roles(in)) roles[name] = role;
  }
  return roles.empty() ? table : table.with_roles(std::move(roles));
}

inline std::string out_dir(const RunConfig& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv("KMAPPER_OUT"); env && *env) return env;
  return "kmapper_out";
}

inline std::string safe_name(std::string s) {
  for (auto& ch : s) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) ch = '_';
  }
  return s;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitError;
}

}  // namespace detail

/// Full-history map: map.json, map.dot, dsm.csv, features.txt.
inline int cmd_analyze(const RunConfig& c) {
  return detail::guarded([&] {
    auto table = detail::load_input(c);
    auto result = static_analysis(table, c.thresholds);
    detail::RunDir dir(detail::out_dir(c));
    dir.write("map.json", export_json(result.map));
    dir.write("map.dot", export_dot(result.map));
    dir.write("dsm.csv", dsm_csv(to_dsm(result.map)));
    dir.write("features.txt", features_text(result.features));
    auto entries = std::vector<std::pair<std::string, std::string>>{{"input", c.input}};
    if (!c.roles_path.empty()) entries.emplace_back("roles", c.roles_path);
    for (auto& e : detail::threshold_entries(c)) entries.push_back(e);
    dir.write_manifest("analyze", entries);
    std::cout << features_text(result.features);
    return kExitOk;
  });
}

/// Per-window maps plus timeline.json; exit 2 when any alarm fired.
inline int cmd_windows(const RunConfig& c) {
  return detail::guarded([&] {
    if (c.window.size == 0) throw Error(ErrorKind::InvalidConfig, "--window is required");
    auto table = detail::load_input(c);
    auto timeline = time_domain_analysis(table, c.window, c.thresholds, c.jaccard_min);
    detail::RunDir dir(detail::out_dir(c));
    dir.write("timeline.json", timeline_json(timeline));
    for (std::size_t i = 0; i < timeline.windows.size(); ++i) {
      char stem[32];
      std::snprintf(stem, sizeof stem, "window_%03zu", i);
      dir.write(std::string(stem) + ".json", export_json(timeline.windows[i].map));
      dir.write(std::string(stem) + ".dot", export_dot(timeline.windows[i].map));
    }
    auto entries = std::vector<std::pair<std::string, std::string>>{
        {"input", c.input},
        {"window", std::to_string(c.window.size)},
        {"stride", std::to_string(c.window.stride)},
        {"jaccard", detail::num(c.jaccard_min)}};
    if (!c.roles_path.empty()) entries.emplace_back("roles", c.roles_path);
    for (auto& e : detail::threshold_entries(c)) entries.push_back(e);
    dir.write_manifest("windows", entries);
    std::cout << timeline_summary(timeline);
    return timeline.alarms.empty() ? kExitOk : kExitAlarm;
  });
}

inline int cmd_scatter(const RunConfig& c) {
  return detail::guarded([&] {
    if (c.var_x.empty() || c.var_y.empty()) throw Error(ErrorKind::InvalidConfig, "--x and --y are required");
    auto table = detail::load_input(c);
    auto points = scatter_points(table, c.var_x, c.var_y);
    auto rel = classify_relation(table, c.var_x, c.var_y, c.thresholds);
    const std::string caption = c.var_x + " vs " + c.var_y + ": " + std::string(to_string(rel.relation_class));
    detail::RunDir dir(detail::out_dir(c));
    const std::string stem = "scatter_" + detail::safe_name(c.var_x) + "_" + detail::safe_name(c.var_y);
    dir.write(stem + ".svg", scatter_svg(points, c.var_x, c.var_y, caption));
    dir.write(stem + ".csv", scatter_csv(points, c.var_x, c.var_y));
    auto entries = std::vector<std::pair<std::string, std::string>>{{"input", c.input}, {"x", c.var_x}, {"y", c.var_y}};
    for (auto& e : detail::threshold_entries(c)) entries.push_back(e);
    dir.write_manifest("scatter", entries);
    std::cout << to_string(rel.relation_class) << "\n"
              << "points=" << points.size() << " pearson=" << detail::num(rel.pearson_r)
              << " spearman=" << detail::num(rel.spearman_rho) << " nmi=" << detail::num(rel.nmi) << "\n";
    return kExitOk;
  });
}

inline int cmd_rules(const RunConfig& c) {
  return detail::guarded([&] {
    if (c.antecedents.empty() || c.consequent.empty())
      throw Error(ErrorKind::InvalidConfig, "--antecedents and --consequent are required");
    auto table = detail::load_input(c);
    std::map<std::string, FuzzyPartition> partitions;
    for (const auto& v : c.antecedents) partitions.emplace(v, build_partitions(table, v, c.k));
    partitions.emplace(c.consequent, build_partitions(table, c.consequent, c.k));
    auto rb = induce_rules(table, partitions, c.antecedents, c.consequent);
    detail::RunDir dir(detail::out_dir(c));
    dir.write("rules.txt", rules_text(rb));
    dir.write("rules.json", rules_to_json(rb).dump(2) + "\n");
    std::string ante;
    for (const auto& a : c.antecedents) ante += (ante.empty() ? "" : ",") + a;
    dir.write_manifest("rules", {{"input", c.input}, {"antecedents", ante}, {"consequent", c.consequent},
                                 {"k", std::to_string(c.k)}});
    std::cout << rules_text(rb);
    return kExitOk;
  });
}

inline int cmd_fcm(const RunConfig& c) {
  return detail::guarded([&] {
    if (c.model_path.empty()) throw Error(ErrorKind::InvalidConfig, "--model is required");
    std::ifstream in(c.model_path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + c.model_path + "'");
    std::stringstream text;
    text << in.rdbuf();
    auto model = fcm::load_model(text.str());
    auto initial = c.initial_state;
    if (initial.empty()) initial.assign(model.size(), 0.0);
    auto result = fcm::run(model, initial, c.iters, c.eps);
    detail::RunDir dir(detail::out_dir(c));
    dir.write("trajectory.csv", fcm::trajectory_csv(model, result));
    std::string state;
    for (double v : initial) state += (state.empty() ? "" : ",") + detail::num(v);
    dir.write_manifest("fcm", {{"model", c.model_path}, {"state", state}, {"iters", std::to_string(c.iters)},
                               {"eps", detail::num(c.eps)}});
    std::cout << to_string(result.verdict);
    if (result.verdict == fcm::Verdict::LimitCycle) std::cout << " period=" << result.period;
    std::cout << " steps=" << result.trajectory.size() - 1 << " final=(";
    const auto& last = result.trajectory.back();
    for (std::size_t i = 0; i < last.size(); ++i) std::cout << (i ? "," : "") << detail::num(last[i]);
    std::cout << ")\n";
    return kExitOk;
  });
}

/// Writes a seeded fixture table: financial, stationary or regime.
inline int cmd_synth(const RunConfig& c) {
  return detail::guarded([&] {
    std::optional<TimeSeriesTable> table;
    if (c.synth_kind == "financial") table = synth::financial_table(c.seed);
    else if (c.synth_kind == "stationary") table = synth::stationary_table(c.seed);
    else if (c.synth_kind == "regime") table = synth::regime_change_table(c.seed);
    else throw Error(ErrorKind::InvalidConfig, "unknown --kind '" + c.synth_kind + "'");
    detail::RunDir dir(detail::out_dir(c));
    std::ostringstream csv;
    write_table(csv, *table);
    dir.write(c.synth_kind + ".csv", csv.str());
    if (!table->roles().empty()) {
      std::string roles;
      for (const auto& [name, role] : table->roles()) roles += "role." + name + "=" + std::string(to_string(role)) + "\n";
      dir.write(c.synth_kind + ".roles", roles);
    }
    dir.write_manifest("synth", {{"kind", c.synth_kind}, {"seed", std::to_string(c.seed)}});
    std::cout << (dir.path() / (c.synth_kind + ".csv")).string() << "\n";
    return kExitOk;
  });
}

namespace detail {

inline std::vector<double> parse_state(const std::string& text) {
  std::vector<double> out;
  for (const auto& field : kmapper::detail::split_csv_line(text)) {
    auto v = kmapper::detail::parse_real(kmapper::detail::trim(field));
    if (!v) throw Error(ErrorKind::InvalidConfig, "bad state value '" + field + "'");
    out.push_back(*v);
  }
  return out;
}

inline double config_real(const std::string& key, const std::string& value) {
  auto v = kmapper::detail::parse_real(value);
  if (!v) throw Error(ErrorKind::InvalidConfig, "'" + key + "' expects a number, got '" + value + "'");
  return *v;
}

inline std::size_t config_count(const std::string& key, const std::string& value) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw Error(ErrorKind::InvalidConfig, "'" + key + "' expects a non-negative integer, got '" + value + "'");
  return out;
}

/// Applies `key=value` entries from a config file; unknown keys are rejected.
inline void apply_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config '" + path + "'");
  auto entries = parse_key_values(in);
  c.roles = roles_from_config(entries);
  for (const auto& [key, value] : entries) {
    if (key.starts_with("role.")) continue;
    if (key == "input") c.input = value;
    else if (key == "out") c.out_dir = value;
    else if (key == "t-strong") c.thresholds.t_strong = config_real(key, value);
    else if (key == "t-weak") c.thresholds.t_weak = config_real(key, value);
    else if (key == "t-nmi") c.thresholds.t_complex_nmi = config_real(key, value);
    else if (key == "min-points") c.thresholds.min_points = config_count(key, value);
    else if (key == "window") c.window.size = config_count(key, value);
    else if (key == "stride") c.window.stride = config_count(key, value);
    else if (key == "k") c.k = config_count(key, value);
    else if (key == "seed") c.seed = config_count(key, value);
    else if (key == "jaccard") c.jaccard_min = config_real(key, value);
    else throw Error(ErrorKind::InvalidConfig, "unknown config key '" + key + "'");
  }
}

}  // namespace detail

/// Parses argv and dispatches. Flags override values from --config.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"kmapper: mine knowledge maps from historical tables"};
  app.require_subcommand(1);

  struct Flags {
    std::optional<std::string> input, out, roles;
    std::optional<double> t_strong, t_weak, t_nmi, jaccard;
    std::optional<std::size_t> window, stride, k, min_points;
    std::optional<std::uint64_t> seed;
  } f;
  std::string config_path;
  RunConfig c;
  std::string antecedents, state;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", f.input, "CSV table (time column first)");
    sub->add_option("--out", f.out, "output directory (default $KMAPPER_OUT or ./kmapper_out)");
    sub->add_option("--roles", f.roles, "role file with role.<var>=input|output|internal lines");
    sub->add_option("--config", config_path, "key=value defaults; flags win");
    sub->add_option("--t-strong", f.t_strong, "strong-correlation threshold (0.8)");
    sub->add_option("--t-weak", f.t_weak, "weak-correlation threshold (0.4)");
    sub->add_option("--t-nmi", f.t_nmi, "NMI threshold for the complex class (0.3)");
    sub->add_option("--min-points", f.min_points, "minimum complete points per pair (3)");
    sub->add_option("--window", f.window, "time points per window");
    sub->add_option("--stride", f.stride, "window stride (1)");
    sub->add_option("--k", f.k, "fuzzy terms per variable (3)");
    sub->add_option("--seed", f.seed, "seed for synthetic tables");
    sub->add_option("--jaccard", f.jaccard, "alarm threshold on strong-link Jaccard similarity (0.5)");
  };

  auto* analyze = app.add_subcommand("analyze", "static map over the whole table");
  add_common(analyze);
  auto* windows = app.add_subcommand("windows", "time-domain maps and crisis alarms (exit 2 on alarm)");
  add_common(windows);
  auto* scatter = app.add_subcommand("scatter", "scatter plot and relation class for one pair");
  add_common(scatter);
  scatter->add_option("--x", c.var_x, "horizontal-axis variable")->required();
  scatter->add_option("--y", c.var_y, "vertical-axis variable")->required();
  auto* rules = app.add_subcommand("rules", "induce fuzzy rules from the table");
  add_common(rules);
  rules->add_option("--antecedents", antecedents, "comma-separated antecedent variables")->required();
  rules->add_option("--consequent", c.consequent, "consequent variable")->required();
  auto* fcm_cmd = app.add_subcommand("fcm", "run a fuzzy cognitive map to a fixed point or cycle");
  add_common(fcm_cmd);
  fcm_cmd->add_option("--model", c.model_path, "FCM model JSON")->required();
  fcm_cmd->add_option("--state", state, "initial state, comma-separated (default all zero)");
  fcm_cmd->add_option("--iters", c.iters, "iteration budget (1000)");
  fcm_cmd->add_option("--eps", c.eps, "convergence tolerance (1e-6)");
  auto* synth_cmd = app.add_subcommand("synth", "write a seeded synthetic table");
  add_common(synth_cmd);
  synth_cmd->add_option("--kind", c.synth_kind, "financial | stationary | regime");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  return detail::guarded([&] {
    if (!config_path.empty()) detail::apply_config_file(config_path, c);
    if (f.input) c.input = *f.input;
    if (f.out) c.out_dir = *f.out;
    if (f.roles) c.roles_path = *f.roles;
    if (f.t_strong) c.thresholds.t_strong = *f.t_strong;
    if (f.t_weak) c.thresholds.t_weak = *f.t_weak;
    if (f.t_nmi) c.thresholds.t_complex_nmi = *f.t_nmi;
    if (f.min_points) c.thresholds.min_points = *f.min_points;
    if (f.window) c.window.size = *f.window;
    if (f.stride) c.window.stride = *f.stride;
    if (f.k) c.k = *f.k;
    if (f.seed) c.seed = *f.seed;
    if (f.jaccard) c.jaccard_min = *f.jaccard;
    c.thresholds.validate();
    if (!antecedents.empty()) {
      c.antecedents.clear();
      for (const auto& a : kmapper::detail::split_csv_line(antecedents))
        c.antecedents.emplace_back(kmapper::detail::trim(a));
    }
    if (!state.empty()) c.initial_state = detail::parse_state(state);

    if (*analyze) return cmd_analyze(c);
    if (*windows) return cmd_windows(c);
    if (*scatter) return cmd_scatter(c);
    if (*rules) return cmd_rules(c);
    if (*fcm_cmd) return cmd_fcm(c);
    return cmd_synth(c);
  });
}

}  // namespace kmapper::cli
