#pragma once

// Brute-force reference computations for tests. Deliberately naive and
// independent of the library code paths they check.

#include <cmath>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

inline double mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return static_cast<double>(s / v.size());
}

// Textbook formula with long double accumulation.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// O(n^2): rank = 1 + #smaller + (#equal - 1) / 2
inline std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double smaller = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) smaller += 1;
      if (w == v[i]) equal += 1;
    }
    r[i] = 1 + smaller + (equal - 1) / 2;
  }
  return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

inline int bin_of(double v, double lo, double hi, int bins) {
  if (hi == lo) return 0;
  int b = static_cast<int>(std::floor((v - lo) * bins / (hi - lo)));
  return b < bins - 1 ? b : bins - 1;
}

// Histogram-count MI: sum over occupied cells of p_xy log2(p_xy / (p_x p_y)),
// normalized by the larger marginal entropy.
inline double nmi(const std::vector<double>& x, const std::vector<double>& y, int bins) {
  double xlo = x[0], xhi = x[0], ylo = y[0], yhi = y[0];
  for (double v : x) xlo = std::fmin(xlo, v), xhi = std::fmax(xhi, v);
  for (double v : y) ylo = std::fmin(ylo, v), yhi = std::fmax(yhi, v);
  std::map<int, int> cx, cy;
  std::map<std::pair<int, int>, int> cxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    int bx = bin_of(x[i], xlo, xhi, bins), by = bin_of(y[i], ylo, yhi, bins);
    cx[bx]++, cy[by]++, cxy[{bx, by}]++;
  }
  const long double n = x.size();
  long double mi = 0, hx = 0, hy = 0;
  for (auto& [cell, c] : cxy) mi += c / n * std::log2((c / n) / ((cx[cell.first] / n) * (cy[cell.second] / n)));
  for (auto& [b, c] : cx) hx -= c / n * std::log2(c / n);
  for (auto& [b, c] : cy) hy -= c / n * std::log2(c / n);
  long double h = hx > hy ? hx : hy;
  return h == 0 ? 0.0 : static_cast<double>(mi / h);
}

// Triangle membership with shoulders, written from the definition.
inline double tri(double t, double a, double b, double c) {
  if (t == b) return 1;
  if (t < b) return a == b ? 1 : (t <= a ? 0 : (t - a) / (b - a));
  return b == c ? 1 : (t >= c ? 0 : (c - t) / (c - b));
}

struct Clip {
  double level, a, b, c;
};

// Centroid of max-aggregated clipped triangles on a uniform grid.
inline double clipped_centroid(const std::vector<Clip>& clips, double lo, double hi, int samples) {
  long double num = 0, den = 0;
  for (int s = 0; s < samples; ++s) {
    double t = lo + (hi - lo) * s / (samples - 1);
    double mu = 0;
    for (auto& k : clips) mu = std::fmax(mu, std::fmin(k.level, tri(t, k.a, k.b, k.c)));
    num += t * mu;
    den += mu;
  }
  return static_cast<double>(num / den);
}

}  // namespace oracle
