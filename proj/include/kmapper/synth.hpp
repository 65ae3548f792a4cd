#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kmapper/dataset.hpp"

// Seeded synthetic tables. The engine is std::mt19937_64 (its output
// sequence is fixed by the standard); the uniform/normal transforms are
// written out here because the std distributions are implementation-defined
// and the generated files must be identical across toolchains.
namespace kmapper::synth {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal, Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 gen_;
};

inline std::vector<std::string> labels_from(int first, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(std::to_string(first + static_cast<int>(i)));
  return out;
}

/// Ten fiscal years (2004-2013) of a growing company: income and expenses
/// move in lockstep, employee cost follows net sales with fluctuations.
inline TimeSeriesTable financial_table(std::uint64_t seed = 2004) {
  Rng rng(seed);
  const std::size_t years = 10;
  std::vector<TimeSeriesTable::Row> rows;
  for (std::size_t t = 0; t < years; ++t) {
    const double growth = std::pow(1.12, static_cast<double>(t));
    const double net_sales = 1000.0 * growth + 15.0 * rng.normal();
    const double income = net_sales + 60.0 + 4.0 * static_cast<double>(t) + 5.0 * rng.normal();
    const double expenses = 0.82 * income + 6.0 * rng.normal();
    const double employee_cost = 0.11 * net_sales + 45.0 * rng.normal();
    const double profit_before_tax = income - expenses;
    const double tax = 0.33 * profit_before_tax + 4.0 * rng.normal();
    rows.push_back({income, expenses, net_sales, employee_cost, profit_before_tax, tax});
  }
  return TimeSeriesTable({"income", "expenses", "net_sales", "employee_cost", "profit_before_tax", "tax"},
                         labels_from(2004, years), std::move(rows),
                         {{"income", Role::Input}, {"net_sales", Role::Input}, {"tax", Role::Output}}, "year");
}

/// Four variables tied by the same linear relations throughout; only the
/// noise differs between seeds.
inline TimeSeriesTable stationary_table(std::uint64_t seed, std::size_t length = 240) {
  Rng rng(seed);
  std::vector<TimeSeriesTable::Row> rows;
  for (std::size_t t = 0; t < length; ++t) {
    const double a = static_cast<double>(t) + rng.normal();
    rows.push_back({a, 2.0 * a + rng.normal(), 50.0 - a + rng.normal(), 0.5 * a + 3.0 + rng.normal()});
  }
  return TimeSeriesTable({"A", "B", "C", "D"}, labels_from(0, length), std::move(rows));
}

/// B = 2A (plus noise) before `change_at`, independent noise around 100 after;
/// C stays a linear function of A throughout.
inline TimeSeriesTable regime_change_table(std::uint64_t seed, std::size_t length = 240, std::size_t change_at = 120) {
  Rng rng(seed);
  std::vector<TimeSeriesTable::Row> rows;
  for (std::size_t t = 0; t < length; ++t) {
    const double a = static_cast<double>(t) + rng.normal();
    const double b = t < change_at ? 2.0 * a + rng.normal() : 100.0 + 10.0 * rng.normal();
    rows.push_back({a, b, 0.5 * a + 10.0 + rng.normal()});
  }
  return TimeSeriesTable({"A", "B", "C"}, labels_from(0, length), std::move(rows));
}

}  // namespace kmapper::synth
