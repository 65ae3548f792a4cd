#include <gtest/gtest.h>

#include "kmapper/fcm.hpp"
#include "kmapper/synth.hpp"
#include "test_util.hpp"

using namespace kmapper;
using namespace kmapper::fcm;

namespace {

const Squash kBivalent{SquashKind::Bivalent, 1.0};

// threat -> run excites, run -> threat inhibits
FcmModel predator() { return FcmModel({"threat", "run"}, {{0, 1}, {-1, 0}}, kBivalent); }

std::vector<ConceptState> linear_states(double d0, double d1, int steps) {
  std::vector<ConceptState> s{{0.0, 0.0}};
  for (int t = 1; t <= steps; ++t) s.push_back({s.back()[0] + d0, s.back()[1] + d1});
  return s;
}

}  // namespace

TEST(Step, ZeroWeightsGiveHalf) {
  FcmModel m({"a", "b", "c"}, WeightMatrix(3, std::vector<double>(3, 0.0)));
  EXPECT_EQ(step(m, ConceptState{0.3, 0.9, 0.0}), (ConceptState{0.5, 0.5, 0.5}));
}

TEST(Step, PredatorTrace) {
  auto m = predator();
  EXPECT_EQ(step(m, ConceptState{1, 0}), (ConceptState{0, 1}));
  EXPECT_EQ(step(m, ConceptState{0, 1}), (ConceptState{0, 0}));
  EXPECT_EQ(step(m, ConceptState{0, 0}), (ConceptState{0, 0}));
}

TEST(Step, LogisticStaysInOpenUnitInterval) {
  synth::Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 8;
    WeightMatrix w(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) w[i][j] = rng.uniform(-1, 1);
    FcmModel m(std::vector<std::string>(n, "c"), w, {SquashKind::Logistic, rng.uniform(0.5, 5)});
    ConceptState s(n);
    for (auto& v : s) v = rng.uniform();
    for (double v : step(m, s)) {
      EXPECT_GT(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
}

TEST(Run, ZeroWeightLogisticSettlesAtHalf) {
  FcmModel m({"a", "b"}, {{0, 0}, {0, 0}});
  auto r = run(m, {0.1, 0.9});
  EXPECT_EQ(r.verdict, Verdict::FixedPoint);
  EXPECT_LE(r.trajectory.size() - 1, 2u);
  EXPECT_EQ(r.trajectory.back(), (ConceptState{0.5, 0.5}));
}

TEST(Run, PredatorReachesRest) {
  auto r = run(predator(), {1, 0});
  EXPECT_EQ(r.verdict, Verdict::FixedPoint);
  EXPECT_EQ(r.period, 1u);
  EXPECT_EQ(r.trajectory, (std::vector<ConceptState>{{1, 0}, {0, 1}, {0, 0}, {0, 0}}));
}

TEST(Run, MutualInhibitionDiesOut) {
  // With a > 0 thresholding, negative weights alone can never switch a concept on.
  FcmModel m({"x", "y"}, {{0, -1}, {-1, 0}}, kBivalent);
  for (ConceptState s : {ConceptState{1, 0}, ConceptState{0, 1}, ConceptState{1, 1}, ConceptState{0, 0}}) {
    auto r = run(m, s);
    EXPECT_EQ(r.verdict, Verdict::FixedPoint);
    EXPECT_EQ(r.trajectory.back(), (ConceptState{0, 0}));
  }
}

TEST(Run, MutualExcitationOscillates) {
  FcmModel m({"x", "y"}, {{0, 1}, {1, 0}}, kBivalent);
  auto r = run(m, {1, 0});
  EXPECT_EQ(r.verdict, Verdict::LimitCycle);
  EXPECT_EQ(r.period, 2u);
  EXPECT_EQ(r.trajectory, (std::vector<ConceptState>{{1, 0}, {0, 1}, {1, 0}}));
}

TEST(Run, BudgetExhausted) {
  FcmModel m({"x", "y"}, {{0, 1}, {1, 0}}, kBivalent);
  auto r = run(m, {1, 0}, 1);
  EXPECT_EQ(r.verdict, Verdict::Budget);
  EXPECT_EQ(r.trajectory.size(), 2u);
}

TEST(Run, BivalentTerminatesWithinStateCount) {
  synth::Rng rng(2024);
  for (std::size_t n = 1; n <= 10; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      WeightMatrix w(n, std::vector<double>(n, 0.0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) w[i][j] = rng.uniform() < 0.3 ? 0.0 : rng.uniform(-1, 1);
      FcmModel m(std::vector<std::string>(n, "c"), w, kBivalent);
      ConceptState s(n);
      for (auto& v : s) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
      auto r = run(m, s);
      EXPECT_NE(r.verdict, Verdict::Budget);
      EXPECT_LE(r.trajectory.size() - 1, (std::size_t{1} << n) + 1);
    }
  }
}

TEST(Run, Errors) {
  auto m = predator();
  EXPECT_EQ(kind_of([&] { run(m, {1, 0, 0}); }), ErrorKind::LengthMismatch);
  EXPECT_EQ(kind_of([&] { run(m, {0.5, 0}); }), ErrorKind::InvalidModel);
  EXPECT_EQ(kind_of([&] { run(m, {1, 0}, 0); }), ErrorKind::InvalidConfig);
  EXPECT_EQ(kind_of([&] { run(m, {1, 0}, 10, 0.0); }), ErrorKind::InvalidConfig);
  FcmModel logistic({"a", "b"}, {{0, 1}, {1, 0}});
  EXPECT_EQ(kind_of([&] { run(logistic, {1.5, 0}); }), ErrorKind::InvalidModel);
}

TEST(Model, Validation) {
  EXPECT_EQ(kind_of([] { FcmModel({}, {}); }), ErrorKind::InvalidModel);
  EXPECT_EQ(kind_of([] { FcmModel({"a", "b"}, {{0, 1}}); }), ErrorKind::InvalidModel);
  EXPECT_EQ(kind_of([] { FcmModel({"a", "b"}, {{0.5, 1}, {0, 0}}); }), ErrorKind::InvalidModel);
  EXPECT_EQ(kind_of([] { FcmModel({"a", "b"}, {{0, 1.5}, {0, 0}}); }), ErrorKind::InvalidModel);
  EXPECT_EQ(kind_of([] { FcmModel({"a", "b"}, {{0, 1}, {0, 0}}, {SquashKind::Logistic, 0.0}); }),
            ErrorKind::InvalidModel);
}

TEST(Model, JsonRoundTrip) {
  auto m = load_model(R"({"concepts": ["threat", "run"], "weights": [[0, 1], [-1, 0]], "squash": "bivalent"})");
  EXPECT_EQ(m.concepts(), (std::vector<std::string>{"threat", "run"}));
  EXPECT_EQ(m.squash().kind, SquashKind::Bivalent);
  auto again = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
  EXPECT_EQ(again.weights(), m.weights());
  EXPECT_EQ(again.squash().kind, SquashKind::Bivalent);

  auto l = load_model(R"({"concepts": ["a", "b"], "weights": [[0, 0.5], [0, 0]],
                          "squash": {"kind": "logistic", "lambda": 2.5}})");
  EXPECT_EQ(l.squash().lambda, 2.5);
  EXPECT_EQ(kind_of([] { load_model("{\"concepts\": [\"a\"]}"); }), ErrorKind::InvalidModel);
  EXPECT_EQ(kind_of([] { load_model("not json"); }), ErrorKind::InvalidModel);
}

TEST(Model, TrajectoryCsv) {
  auto m = predator();
  EXPECT_EQ(trajectory_csv(m, run(m, {1, 0})), "iteration,threat,run\n0,1,0\n1,0,1\n2,0,0\n3,0,0\n");
}

TEST(Dhl, CoMonotoneFrozenValue) {
  auto w = dhl_learn(linear_states(0.1, 0.1, 3), 0.1);
  // tests/oracles/derive_values.py: 4583 / 3200000
  EXPECT_NEAR(w[0][1], 0.0014321875, 1e-15);
  EXPECT_NEAR(w[1][0], 0.0014321875, 1e-15);
  EXPECT_EQ(w[0][0], 0.0);
}

TEST(Dhl, AntiMonotoneFrozenValue) {
  auto w = dhl_learn(linear_states(0.1, -0.1, 3), 0.1);
  EXPECT_NEAR(w[0][1], -0.0014321875, 1e-15);
  EXPECT_LT(w[1][0], 0.0);
}

TEST(Dhl, ConstantSequenceLearnsNothing) {
  std::vector<ConceptState> s(5, ConceptState{0.3, 0.7, 0.1});
  EXPECT_EQ(dhl_learn(s), WeightMatrix(3, std::vector<double>(3, 0.0)));
}

TEST(Dhl, SignFollowsComovement) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    synth::Rng rng(seed);
    std::vector<ConceptState> co{{0.5, 0.5}}, anti{{0.5, 0.5}};
    const int len = 3 + static_cast<int>(seed % 10);
    for (int t = 0; t < len; ++t) {
      const double a = rng.uniform(0.01, 0.2), b = rng.uniform(0.01, 0.2);
      co.push_back({co.back()[0] + a, co.back()[1] + b});
      anti.push_back({anti.back()[0] + a, anti.back()[1] - b});
    }
    auto wc = dhl_learn(co), wa = dhl_learn(anti);
    EXPECT_GT(wc[0][1], 0.0) << seed;
    EXPECT_GT(wc[1][0], 0.0) << seed;
    EXPECT_LT(wa[0][1], 0.0) << seed;
    EXPECT_LT(wa[1][0], 0.0) << seed;
  }
}

TEST(Dhl, WeightsBoundedDiagonalZero) {
  synth::Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + trial % 5;
    std::vector<ConceptState> s;
    for (int t = 0; t < 20; ++t) {
      ConceptState c(n);
      for (auto& v : c) v = rng.uniform(-10, 10);
      s.push_back(c);
    }
    auto w = dhl_learn(s, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) {
          EXPECT_EQ(w[i][j], 0.0);
        }
        EXPECT_LE(std::abs(w[i][j]), 1.0);
      }
  }
}

TEST(Dhl, Errors) {
  std::vector<ConceptState> two{{0, 0}, {1, 1}};
  EXPECT_EQ(kind_of([&] { dhl_learn(two); }), ErrorKind::TooFewStates);
  std::vector<ConceptState> ragged{{0, 0}, {1, 1}, {1}};
  EXPECT_EQ(kind_of([&] { dhl_learn(ragged); }), ErrorKind::LengthMismatch);
  auto ok = linear_states(0.1, 0.1, 3);
  EXPECT_EQ(kind_of([&] { dhl_learn(ok, 0.0); }), ErrorKind::InvalidConfig);
}
