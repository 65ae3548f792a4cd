#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kmapper/dataset.hpp"
#include "kmapper/error.hpp"

namespace kmapper {

/// Triangle (a, b, c): left foot, peak, right foot. A degenerate side
/// (a == b or b == c) is a shoulder that stays at 1 past the peak.
struct TriangularMF {
  std::string label;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double membership(double t) const {
    if (t < b) {
      if (a == b) return 1.0;
      if (t <= a) return 0.0;
      return (t - a) / (b - a);
    }
    if (t > b) {
      if (b == c) return 1.0;
      if (t >= c) return 0.0;
      return (c - t) / (c - b);
    }
    return 1.0;
  }

  bool operator==(const TriangularMF&) const = default;
};

struct FuzzyPartition {
  std::string variable;
  std::vector<TriangularMF> mfs;

  double lo() const { return mfs.front().a; }
  double hi() const { return mfs.back().c; }

  std::size_t index_of(std::string_view label) const {
    for (std::size_t i = 0; i < mfs.size(); ++i)
      if (mfs[i].label == label) return i;
    throw Error(ErrorKind::InvalidConfig, "partition '" + variable + "' has no term '" + std::string(label) + "'");
  }

  const TriangularMF& term(std::string_view label) const { return mfs[index_of(label)]; }

  void validate() const {
    if (mfs.empty()) throw Error(ErrorKind::InvalidConfig, "partition '" + variable + "' has no terms");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < mfs.size(); ++i) {
      const auto& mf = mfs[i];
      if (!(mf.a <= mf.b && mf.b <= mf.c))
        throw Error(ErrorKind::InvalidConfig, "term '" + mf.label + "' needs a <= b <= c");
      if (!labels.insert(mf.label).second)
        throw Error(ErrorKind::InvalidConfig, "duplicate term '" + mf.label + "' in '" + variable + "'");
      if (i > 0 && !(mfs[i - 1].b < mf.b))
        throw Error(ErrorKind::InvalidConfig, "peaks of '" + variable + "' must strictly increase");
    }
  }

  bool operator==(const FuzzyPartition&) const = default;
};

enum class Connective { And, Or };

constexpr std::string_view to_string(Connective c) { return c == Connective::And ? "AND" : "OR"; }

/// "<variable> IS <label>"
struct FuzzyTerm {
  std::string variable;
  std::string label;
  bool operator==(const FuzzyTerm&) const = default;
};

struct FuzzyRule {
  std::vector<FuzzyTerm> antecedents;
  Connective connective = Connective::And;
  FuzzyTerm consequent;
  double confidence = 1.0;
  bool operator==(const FuzzyRule&) const = default;
};

struct FuzzyRuleBase {
  std::map<std::string, FuzzyPartition> partitions;
  std::vector<FuzzyRule> rules;

  const FuzzyPartition& partition(const std::string& variable) const {
    auto it = partitions.find(variable);
    if (it == partitions.end()) throw Error(ErrorKind::UnknownVariable, "no partition for '" + variable + "'");
    return it->second;
  }

  bool operator==(const FuzzyRuleBase&) const = default;
};

inline std::vector<std::string> default_term_labels(std::size_t k) {
  switch (k) {
    case 2: return {"low", "high"};
    case 3: return {"low", "medium", "high"};
    case 5: return {"very_low", "low", "medium", "high", "very_high"};
    default: {
      std::vector<std::string> labels;
      for (std::size_t i = 1; i <= k; ++i) labels.push_back("L" + std::to_string(i));
      return labels;
    }
  }
}

/// k triangles with evenly spaced peaks over [lo, hi]; each foot sits on the
/// neighbouring peak and the end terms are shouldered.
inline FuzzyPartition even_partition(std::string variable, double lo, double hi, std::size_t k) {
  if (k < 2) throw Error(ErrorKind::InvalidConfig, "need at least 2 terms per partition");
  if (!(lo < hi)) throw Error(ErrorKind::ConstantSeries, "'" + variable + "' has an empty range");
  auto labels = default_term_labels(k);
  std::vector<double> peaks(k);
  for (std::size_t i = 0; i < k; ++i)
    peaks[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k - 1);
  peaks.back() = hi;
  FuzzyPartition p{std::move(variable), {}};
  for (std::size_t i = 0; i < k; ++i) {
    p.mfs.push_back({labels[i], peaks[i == 0 ? 0 : i - 1], peaks[i], peaks[i + 1 == k ? i : i + 1]});
  }
  return p;
}

inline FuzzyPartition build_partitions(const TimeSeriesTable& table, std::string_view variable, std::size_t k = 3) {
  const auto col = table.index_of(variable);
  bool any = false;
  double lo = 0.0, hi = 0.0;
  for (std::size_t r = 0; r < table.length(); ++r) {
    const auto& cell = table.at(r, col);
    if (!cell) continue;
    lo = any ? std::min(lo, *cell) : *cell;
    hi = any ? std::max(hi, *cell) : *cell;
    any = true;
  }
  if (!any || lo == hi)
    throw Error(ErrorKind::ConstantSeries, "variable '" + std::string(variable) + "' is constant");
  return even_partition(std::string(variable), lo, hi, k);
}

namespace detail {

struct BestTerm {
  std::size_t index = 0;
  double degree = 0.0;
};

// Ties go to the lower (earlier) term.
inline BestTerm best_term(const FuzzyPartition& p, double value) {
  BestTerm best{0, p.mfs.front().membership(value)};
  for (std::size_t i = 1; i < p.mfs.size(); ++i) {
    double m = p.mfs[i].membership(value);
    if (m > best.degree) best = {i, m};
  }
  return best;
}

}  // namespace detail

/// Wang-Mendel induction: each complete row proposes one AND rule made of the
/// max-membership term of every variable, weighted by the product of those
/// memberships; per antecedent combination the strongest proposal survives.
inline FuzzyRuleBase induce_rules(const TimeSeriesTable& table, const std::map<std::string, FuzzyPartition>& partitions,
                                  const std::vector<std::string>& antecedent_vars, const std::string& consequent_var) {
  if (antecedent_vars.empty()) throw Error(ErrorKind::InvalidConfig, "no antecedent variables");
  std::vector<std::string> all = antecedent_vars;
  all.push_back(consequent_var);
  {
    std::set<std::string> unique(all.begin(), all.end());
    if (unique.size() != all.size()) throw Error(ErrorKind::InvalidConfig, "a variable appears twice in the rule shape");
  }
  std::vector<std::size_t> cols;
  std::vector<const FuzzyPartition*> parts;
  for (const auto& v : all) {
    cols.push_back(table.index_of(v));
    auto it = partitions.find(v);
    if (it == partitions.end()) throw Error(ErrorKind::UnknownVariable, "no partition for '" + v + "'");
    it->second.validate();
    parts.push_back(&it->second);
  }

  struct Candidate {
    std::size_t consequent = 0;
    double confidence = 0.0;
  };
  std::map<std::vector<std::size_t>, Candidate> best;
  bool any_row = false;
  for (std::size_t r = 0; r < table.length(); ++r) {
    bool complete = std::all_of(cols.begin(), cols.end(), [&](auto c) { return table.at(r, c).has_value(); });
    if (!complete) continue;
    any_row = true;
    std::vector<std::size_t> key;
    double confidence = 1.0;
    std::size_t consequent = 0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      auto t = detail::best_term(*parts[i], *table.at(r, cols[i]));
      confidence *= t.degree;
      if (i + 1 < cols.size()) key.push_back(t.index);
      else consequent = t.index;
    }
    auto [it, inserted] = best.try_emplace(key, Candidate{consequent, confidence});
    if (!inserted && confidence > it->second.confidence) it->second = {consequent, confidence};
  }
  if (!any_row) throw Error(ErrorKind::NoCompleteRows, "no row has all rule variables present");

  FuzzyRuleBase rb;
  for (std::size_t i = 0; i < all.size(); ++i) rb.partitions.emplace(all[i], *parts[i]);
  for (const auto& [key, cand] : best) {
    FuzzyRule rule;
    for (std::size_t i = 0; i < key.size(); ++i) rule.antecedents.push_back({all[i], parts[i]->mfs[key[i]].label});
    rule.connective = Connective::And;
    rule.consequent = {consequent_var, parts.back()->mfs[cand.consequent].label};
    rule.confidence = cand.confidence;
    rb.rules.push_back(std::move(rule));
  }
  return rb;
}

/// Degree to which the inputs satisfy the rule's antecedents (min for AND,
/// max for OR). Returns nullopt if an antecedent variable has no input.
inline std::optional<double> firing_strength(const FuzzyRuleBase& rb, const FuzzyRule& rule,
                                             const std::map<std::string, double>& inputs) {
  std::optional<double> strength;
  for (const auto& term : rule.antecedents) {
    auto it = inputs.find(term.variable);
    if (it == inputs.end()) return std::nullopt;
    double m = rb.partition(term.variable).term(term.label).membership(it->second);
    if (!strength) strength = m;
    else strength = rule.connective == Connective::And ? std::min(*strength, m) : std::max(*strength, m);
  }
  return strength;
}

/// Mamdani inference: each rule clips its consequent term at
/// firing strength x confidence, clipped sets aggregate by max, and the crisp
/// output is the centroid over `samples` evenly spaced points of the
/// consequent universe.
inline double infer(const FuzzyRuleBase& rb, const std::map<std::string, double>& inputs, std::size_t samples = 101) {
  if (rb.rules.empty()) throw Error(ErrorKind::NoRuleFires, "rule base is empty");
  if (samples < 2) throw Error(ErrorKind::InvalidConfig, "need at least 2 samples");
  const std::string& out_var = rb.rules.front().consequent.variable;
  for (const auto& rule : rb.rules) {
    if (rule.consequent.variable != out_var)
      throw Error(ErrorKind::MixedConsequents, "rules conclude on both '" + out_var + "' and '" +
                                                   rule.consequent.variable + "'");
  }
  const auto& universe = rb.partition(out_var);

  struct Clip {
    const TriangularMF* mf;
    double level;
  };
  std::vector<Clip> clips;
  bool covered = false;
  for (const auto& rule : rb.rules) {
    auto strength = firing_strength(rb, rule, inputs);
    if (!strength) continue;
    covered = true;
    double level = *strength * rule.confidence;
    if (level > 0.0) clips.push_back({&universe.term(rule.consequent.label), level});
  }
  if (!covered) throw Error(ErrorKind::MissingInput, "inputs do not cover any rule's antecedents");
  if (clips.empty()) throw Error(ErrorKind::NoRuleFires, "every rule has zero firing strength");

  const double lo = universe.lo(), hi = universe.hi();
  double num = 0.0, den = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = lo + (hi - lo) * static_cast<double>(s) / static_cast<double>(samples - 1);
    double mu = 0.0;
    for (const auto& clip : clips) mu = std::max(mu, std::min(clip.level, clip.mf->membership(t)));
    num += t * mu;
    den += mu;
  }
  if (den == 0.0) throw Error(ErrorKind::NoRuleFires, "aggregated consequent is empty on the sample grid");
  return num / den;
}

inline std::string format_rule(const FuzzyRule& rule) {
  std::ostringstream s;
  s << "IF ";
  for (std::size_t i = 0; i < rule.antecedents.size(); ++i) {
    if (i > 0) s << ' ' << to_string(rule.connective) << ' ';
    s << rule.antecedents[i].variable << " IS " << rule.antecedents[i].label;
  }
  char conf[32];
  std::snprintf(conf, sizeof conf, "%.2f", rule.confidence);
  s << " THEN " << rule.consequent.variable << " IS " << rule.consequent.label << " (conf=" << conf << ")";
  return s.str();
}

/// One rule per line.
inline std::string rules_text(const FuzzyRuleBase& rb) {
  std::string out;
  for (const auto& rule : rb.rules) out += format_rule(rule) + "\n";
  return out;
}

inline nlohmann::ordered_json rules_to_json(const FuzzyRuleBase& rb) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = "rules-1";
  ordered_json parts = ordered_json::array();
  for (const auto& [name, p] : rb.partitions) {
    ordered_json terms = ordered_json::array();
    for (const auto& mf : p.mfs) terms.push_back({{"label", mf.label}, {"a", mf.a}, {"b", mf.b}, {"c", mf.c}});
    parts.push_back({{"variable", name}, {"terms", std::move(terms)}});
  }
  j["partitions"] = std::move(parts);
  ordered_json rules = ordered_json::array();
  for (const auto& rule : rb.rules) {
    ordered_json ante = ordered_json::array();
    for (const auto& t : rule.antecedents) ante.push_back({{"variable", t.variable}, {"label", t.label}});
    rules.push_back({{"if", std::move(ante)},
                     {"connective", std::string(to_string(rule.connective))},
                     {"then", {{"variable", rule.consequent.variable}, {"label", rule.consequent.label}}},
                     {"confidence", rule.confidence}});
  }
  j["rules"] = std::move(rules);
  return j;
}

}  // namespace kmapper
