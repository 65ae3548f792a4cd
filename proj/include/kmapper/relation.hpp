#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kmapper/dataset.hpp"
#include "kmapper/error.hpp"

namespace kmapper {

enum class RelationClass { StrongPositive, StrongNegative, WeakPositive, WeakNegative, Complex, NoCorrelation };

constexpr std::string_view to_string(RelationClass c) {
  switch (c) {
    case RelationClass::StrongPositive: return "StrongPositive";
    case RelationClass::StrongNegative: return "StrongNegative";
    case RelationClass::WeakPositive: return "WeakPositive";
    case RelationClass::WeakNegative: return "WeakNegative";
    case RelationClass::Complex: return "Complex";
    case RelationClass::NoCorrelation: return "NoCorrelation";
  }
  return "NoCorrelation";
}

inline RelationClass parse_relation_class(std::string_view text) {
  for (auto c : {RelationClass::StrongPositive, RelationClass::StrongNegative, RelationClass::WeakPositive,
                 RelationClass::WeakNegative, RelationClass::Complex, RelationClass::NoCorrelation}) {
    if (to_string(c) == text) return c;
  }
  throw Error(ErrorKind::MalformedMap, "unknown relation class '" + std::string(text) + "'");
}

struct RelationThresholds {
  double t_strong = 0.8;
  double t_weak = 0.4;
  double t_complex_nmi = 0.3;
  std::size_t min_points = 3;

  void validate() const {
    if (!(0.0 < t_weak && t_weak < t_strong && t_strong <= 1.0))
      throw Error(ErrorKind::InvalidConfig, "thresholds need 0 < t_weak < t_strong <= 1");
    if (!(0.0 < t_complex_nmi && t_complex_nmi <= 1.0))
      throw Error(ErrorKind::InvalidConfig, "t_complex_nmi must lie in (0, 1]");
    if (min_points < 3) throw Error(ErrorKind::InvalidConfig, "min_points must be >= 3");
  }

  bool operator==(const RelationThresholds&) const = default;
};

/// Evidence for one variable pair. `bins` is the histogram resolution used for nmi.
struct PairRelation {
  std::string var_a;
  std::string var_b;
  std::size_t n_used = 0;
  std::size_t bins = 0;
  double pearson_r = 0.0;
  double spearman_rho = 0.0;
  double nmi = 0.0;
  RelationClass relation_class = RelationClass::NoCorrelation;

  bool operator==(const PairRelation&) const = default;
};

/// Rows where both values are present, in original order.
struct PairedSample {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::size_t> rows;
};

inline PairedSample pairwise_complete(std::span<const std::optional<double>> x,
                                      std::span<const std::optional<double>> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "paired sequences differ in length");
  PairedSample out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i]) {
      out.x.push_back(*x[i]);
      out.y.push_back(*y[i]);
      out.rows.push_back(i);
    }
  }
  return out;
}

namespace detail {

inline bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
}

inline void check_pair(std::span<const double> x, std::span<const double> y, std::size_t min_points) {
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "paired sequences differ in length");
  if (x.size() < min_points)
    throw Error(ErrorKind::TooFewPoints, std::to_string(x.size()) + " points, need " + std::to_string(min_points));
}

// Shannon entropy in bits from occupancy counts. Counts are summed in sorted
// order so the result depends only on the multiset of counts.
inline double entropy_bits(std::vector<std::size_t> counts, std::size_t n) {
  std::sort(counts.begin(), counts.end());
  double h = 0.0;
  const double total = static_cast<double>(n);
  for (auto c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h;
}

inline std::size_t bin_index(double v, double lo, double hi, std::size_t bins) {
  if (hi == lo) return 0;
  auto b = static_cast<std::size_t>(std::floor((v - lo) * static_cast<double>(bins) / (hi - lo)));
  return std::min(b, bins - 1);
}

}  // namespace detail

/// Product-moment correlation of complete pairs.
inline double pearson(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y, 3);
  if (detail::is_constant(x) || detail::is_constant(y))
    throw Error(ErrorKind::ConstantSeries, "zero variance");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// 1-based ranks; tied values share the mean of the ranks they span.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  detail::check_pair(x, y, 3);
  if (detail::is_constant(x) || detail::is_constant(y))
    throw Error(ErrorKind::ConstantSeries, "zero variance");
  auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  return pearson(rx, ry);
}

/// floor(sqrt(n)), at least 2.
inline std::size_t default_bins(std::size_t n) {
  auto b = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while ((b + 1) * (b + 1) <= n) ++b;
  while (b > 0 && b * b > n) --b;
  return std::max<std::size_t>(2, b);
}

/// Normalized mutual information MI / max(H(X), H(Y)) from an equal-width
/// bins x bins histogram over each variable's observed range. `bins == 0`
/// selects default_bins(n). Zero when either marginal entropy vanishes.
inline double mutual_information(std::span<const double> x, std::span<const double> y, std::size_t bins = 0,
                                 std::size_t min_points = 3) {
  detail::check_pair(x, y, min_points);
  const std::size_t n = x.size();
  if (bins == 0) bins = default_bins(n);
  if (bins < 2) throw Error(ErrorKind::InvalidConfig, "bins must be >= 2");

  auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
  auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
  std::vector<std::size_t> cx(bins, 0), cy(bins, 0), cxy(bins * bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto bx = detail::bin_index(x[i], *xlo, *xhi, bins);
    auto by = detail::bin_index(y[i], *ylo, *yhi, bins);
    ++cx[bx];
    ++cy[by];
    ++cxy[bx * bins + by];
  }
  const double hx = detail::entropy_bits(std::move(cx), n);
  const double hy = detail::entropy_bits(std::move(cy), n);
  const double hmax = std::max(hx, hy);
  if (hmax == 0.0) return 0.0;
  const double hxy = detail::entropy_bits(std::move(cxy), n);
  return std::clamp((hx + hy - hxy) / hmax, 0.0, 1.0);
}

/// Decision rule over already-computed measures.
inline RelationClass classify_measures(double pearson_r, double spearman_rho, double nmi,
                                       const RelationThresholds& th) {
  const double m = std::abs(spearman_rho) > std::abs(pearson_r) ? spearman_rho : pearson_r;
  const double mag = std::abs(m);
  if (mag >= th.t_strong) return m > 0 ? RelationClass::StrongPositive : RelationClass::StrongNegative;
  if (mag >= th.t_weak) return m > 0 ? RelationClass::WeakPositive : RelationClass::WeakNegative;
  if (nmi >= th.t_complex_nmi) return RelationClass::Complex;
  return RelationClass::NoCorrelation;
}

/// Measures and classifies one pair after pairwise deletion of missing rows.
inline PairRelation classify_relation(std::span<const std::optional<double>> x,
                                      std::span<const std::optional<double>> y,
                                      const RelationThresholds& th = {}) {
  auto sample = pairwise_complete(x, y);
  PairRelation rel;
  rel.n_used = sample.x.size();
  if (rel.n_used < th.min_points)
    throw Error(ErrorKind::TooFewPoints, std::to_string(rel.n_used) + " complete points, need " +
                                             std::to_string(th.min_points));
  rel.bins = default_bins(rel.n_used);
  if (detail::is_constant(sample.x) || detail::is_constant(sample.y)) {
    rel.relation_class = RelationClass::NoCorrelation;
    return rel;
  }
  rel.pearson_r = pearson(sample.x, sample.y);
  rel.spearman_rho = spearman(sample.x, sample.y);
  rel.nmi = mutual_information(sample.x, sample.y, rel.bins, th.min_points);
  rel.relation_class = classify_measures(rel.pearson_r, rel.spearman_rho, rel.nmi, th);
  return rel;
}

inline PairRelation classify_relation(std::span<const double> x, std::span<const double> y,
                                      const RelationThresholds& th = {}) {
  std::vector<std::optional<double>> ox(x.begin(), x.end());
  std::vector<std::optional<double>> oy(y.begin(), y.end());
  return classify_relation(std::span<const std::optional<double>>(ox), std::span<const std::optional<double>>(oy),
                           th);
}

inline PairRelation classify_relation(const TimeSeriesTable& table, std::string_view var_a, std::string_view var_b,
                                      const RelationThresholds& th = {}) {
  auto a = table.column(var_a);
  auto b = table.column(var_b);
  auto rel = classify_relation(std::span<const std::optional<double>>(a), std::span<const std::optional<double>>(b),
                               th);
  rel.var_a = std::string(var_a);
  rel.var_b = std::string(var_b);
  return rel;
}

struct ScatterPoint {
  double x = 0.0;
  double y = 0.0;
  std::string label;
  bool operator==(const ScatterPoint&) const = default;
};

/// Pairwise-complete (x, y, time label) triples in time order.
inline std::vector<ScatterPoint> scatter_points(const TimeSeriesTable& table, std::string_view var_x,
                                                std::string_view var_y) {
  const auto ix = table.index_of(var_x);
  const auto iy = table.index_of(var_y);
  std::vector<ScatterPoint> points;
  for (std::size_t r = 0; r < table.length(); ++r) {
    const auto& cx = table.at(r, ix);
    const auto& cy = table.at(r, iy);
    if (cx && cy) points.push_back({*cx, *cy, table.time_labels()[r]});
  }
  return points;
}

}  // namespace kmapper
