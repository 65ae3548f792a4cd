#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kmapper/dataset.hpp"
#include "kmapper/error.hpp"

namespace kmapper::fcm {

enum class SquashKind { Logistic, Bivalent };

struct Squash {
  SquashKind kind = SquashKind::Logistic;
  double lambda = 1.0;

  double operator()(double activation) const {
    if (kind == SquashKind::Bivalent) return activation > 0.0 ? 1.0 : 0.0;
    return 1.0 / (1.0 + std::exp(-lambda * activation));
  }

  bool operator==(const Squash&) const = default;
};

using ConceptState = std::vector<double>;
using WeightMatrix = std::vector<std::vector<double>>;

/// Signed causal graph; weights[i][j] is the influence of concept i on concept j.
class FcmModel {
 public:
  FcmModel(std::vector<std::string> concepts, WeightMatrix weights, Squash squash = {})
      : concepts_(std::move(concepts)), weights_(std::move(weights)), squash_(squash) {
    const auto n = concepts_.size();
    if (n == 0) throw Error(ErrorKind::InvalidModel, "model has no concepts");
    if (weights_.size() != n) throw Error(ErrorKind::InvalidModel, "weight matrix must be n x n");
    for (std::size_t i = 0; i < n; ++i) {
      if (weights_[i].size() != n) throw Error(ErrorKind::InvalidModel, "weight matrix must be n x n");
      if (weights_[i][i] != 0.0) throw Error(ErrorKind::InvalidModel, "self-influence w_ii must be 0");
      for (double w : weights_[i])
        if (!(std::abs(w) <= 1.0)) throw Error(ErrorKind::InvalidModel, "weights must lie in [-1, 1]");
    }
    if (squash_.kind == SquashKind::Logistic && !(squash_.lambda > 0.0))
      throw Error(ErrorKind::InvalidModel, "logistic lambda must be positive");
  }

  const std::vector<std::string>& concepts() const noexcept { return concepts_; }
  const WeightMatrix& weights() const noexcept { return weights_; }
  const Squash& squash() const noexcept { return squash_; }
  std::size_t size() const noexcept { return concepts_.size(); }

  /// Bivalent states must be 0/1; logistic states may start anywhere in [0, 1].
  void check_state(std::span<const double> state) const {
    if (state.size() != size())
      throw Error(ErrorKind::LengthMismatch, "state has " + std::to_string(state.size()) + " values, model has " +
                                                 std::to_string(size()) + " concepts");
    for (double v : state) {
      bool ok = squash_.kind == SquashKind::Bivalent ? (v == 0.0 || v == 1.0) : (v >= 0.0 && v <= 1.0);
      if (!ok) throw Error(ErrorKind::InvalidModel, "state value out of range for the squash mode");
    }
  }

  bool operator==(const FcmModel&) const = default;

 private:
  std::vector<std::string> concepts_;
  WeightMatrix weights_;
  Squash squash_;
};

/// next_j = f(sum_i state_i * w_ij)
inline ConceptState step(const FcmModel& model, std::span<const double> state) {
  const auto n = model.size();
  ConceptState next(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double activation = 0.0;
    for (std::size_t i = 0; i < n; ++i) activation += state[i] * model.weights()[i][j];
    next[j] = model.squash()(activation);
  }
  return next;
}

enum class Verdict { FixedPoint, LimitCycle, Budget };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::FixedPoint: return "FixedPoint";
    case Verdict::LimitCycle: return "LimitCycle";
    case Verdict::Budget: return "Budget";
  }
  return "Budget";
}

struct RunResult {
  std::vector<ConceptState> trajectory;  // initial state first
  Verdict verdict = Verdict::Budget;
  std::size_t period = 0;  // cycle length for LimitCycle, 1 for FixedPoint
};

namespace detail {

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace detail

/// Iterates `step` until the state stops moving (FixedPoint), revisits an
/// earlier state (LimitCycle) or max_iters steps have been taken (Budget).
/// Bivalent recurrence is exact; logistic recurrence is within eps.
inline RunResult run(const FcmModel& model, const ConceptState& initial, std::size_t max_iters = 1000,
                     double eps = 1e-6) {
  if (max_iters < 1) throw Error(ErrorKind::InvalidConfig, "max_iters must be >= 1");
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidConfig, "eps must be positive");
  model.check_state(initial);
  const bool exact = model.squash().kind == SquashKind::Bivalent;
  auto same = [&](const ConceptState& a, const ConceptState& b) {
    return exact ? a == b : detail::max_abs_diff(a, b) < eps;
  };

  RunResult result;
  result.trajectory.push_back(initial);
  for (std::size_t it = 0; it < max_iters; ++it) {
    ConceptState next = step(model, result.trajectory.back());
    if (same(next, result.trajectory.back())) {
      result.trajectory.push_back(std::move(next));
      result.verdict = Verdict::FixedPoint;
      result.period = 1;
      return result;
    }
    for (std::size_t k = 0; k + 1 < result.trajectory.size(); ++k) {
      if (same(next, result.trajectory[k])) {
        result.period = result.trajectory.size() - k;
        result.trajectory.push_back(std::move(next));
        result.verdict = Verdict::LimitCycle;
        return result;
      }
    }
    result.trajectory.push_back(std::move(next));
  }
  result.verdict = Verdict::Budget;
  return result;
}

/// Differential Hebbian learning from a state sequence, starting at W = 0.
/// For every consecutive pair (t-1, t) and every concept i that moved:
///   w_ij += eta_t * (dC_i * dC_j - w_ij),  eta_t = eta0 * (1 - t / N),
/// N the number of states. Weights are clipped to [-1, 1]; the diagonal stays 0.
inline WeightMatrix dhl_learn(std::span<const ConceptState> states, double eta0 = 0.1) {
  if (states.size() < 3) throw Error(ErrorKind::TooFewStates, std::to_string(states.size()) + " states, need 3");
  if (!(eta0 > 0.0 && eta0 <= 1.0)) throw Error(ErrorKind::InvalidConfig, "eta0 must lie in (0, 1]");
  const auto n = states.front().size();
  for (const auto& s : states)
    if (s.size() != n) throw Error(ErrorKind::LengthMismatch, "states differ in length");

  WeightMatrix w(n, std::vector<double>(n, 0.0));
  const double total = static_cast<double>(states.size());
  std::vector<double> delta(n);
  for (std::size_t t = 1; t < states.size(); ++t) {
    const double eta = eta0 * (1.0 - static_cast<double>(t) / total);
    for (std::size_t i = 0; i < n; ++i) delta[i] = states[t][i] - states[t - 1][i];
    for (std::size_t i = 0; i < n; ++i) {
      if (delta[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        w[i][j] += eta * (delta[i] * delta[j] - w[i][j]);
        w[i][j] = std::clamp(w[i][j], -1.0, 1.0);
      }
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Files

/// {"concepts": [...], "weights": [[...]], "squash": {"kind": "logistic", "lambda": 1}}
/// "squash" may also be the bare string "logistic" or "bivalent".
inline FcmModel model_from_json(const nlohmann::json& j) {
  try {
    auto concepts = j.at("concepts").get<std::vector<std::string>>();
    auto weights = j.at("weights").get<WeightMatrix>();
    Squash squash;
    if (j.contains("squash")) {
      const auto& sq = j.at("squash");
      std::string kind = sq.is_string() ? sq.get<std::string>() : sq.at("kind").get<std::string>();
      if (kind == "bivalent") squash.kind = SquashKind::Bivalent;
      else if (kind == "logistic") squash.kind = SquashKind::Logistic;
      else throw Error(ErrorKind::InvalidModel, "unknown squash '" + kind + "'");
      if (sq.is_object() && sq.contains("lambda")) squash.lambda = sq.at("lambda").get<double>();
    }
    return FcmModel(std::move(concepts), std::move(weights), squash);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidModel, e.what());
  }
}

inline FcmModel load_model(std::string_view text) {
  try {
    return model_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidModel, e.what());
  }
}

inline nlohmann::ordered_json model_to_json(const FcmModel& model) {
  nlohmann::ordered_json j;
  j["concepts"] = model.concepts();
  j["weights"] = model.weights();
  if (model.squash().kind == SquashKind::Bivalent) j["squash"] = {{"kind", "bivalent"}};
  else j["squash"] = {{"kind", "logistic"}, {"lambda", model.squash().lambda}};
  return j;
}

/// `iteration,<concept...>` header, one row per trajectory state.
inline std::string trajectory_csv(const FcmModel& model, const RunResult& result) {
  std::ostringstream s;
  s << "iteration";
  for (const auto& c : model.concepts()) s << ',' << kmapper::detail::quote_if_needed(c);
  s << '\n';
  for (std::size_t t = 0; t < result.trajectory.size(); ++t) {
    s << t;
    for (double v : result.trajectory[t]) s << ',' << kmapper::detail::format_real(v);
    s << '\n';
  }
  return s.str();
}

}  // namespace kmapper::fcm
