#include <gtest/gtest.h>

#include "kmapper/kmap.hpp"
#include "kmapper/synth.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace kmapper;

namespace {

constexpr std::uint64_t kNoiseSeed = 5;

// A = 1..10, B = 2A, C = seeded noise unrelated to A.
TimeSeriesTable abc_table() {
  synth::Rng rng(kNoiseSeed);
  std::vector<TimeSeriesTable::Row> rows;
  for (int i = 1; i <= 10; ++i) rows.push_back({double(i), 2.0 * i, rng.normal()});
  return TimeSeriesTable({"A", "B", "C"}, synth::labels_from(1, 10), std::move(rows));
}

std::vector<double> column_values(const TimeSeriesTable& t, std::string_view name) {
  std::vector<double> out;
  for (const auto& v : t.column(name)) out.push_back(*v);
  return out;
}

// Map whose topology is given by an edge list; every link is weak positive.
KnowledgeMap graph(std::size_t n, const std::vector<std::pair<int, int>>& edges) {
  KnowledgeMap map;
  for (std::size_t i = 0; i < n; ++i) map.nodes.push_back({"n" + std::to_string(10 + i), Role::Internal});
  for (auto [i, j] : edges) {
    MapLink l;
    l.a = map.nodes[std::min(i, j)].name;
    l.b = map.nodes[std::max(i, j)].name;
    map.links.push_back(l);
  }
  finalize_nodes(map);
  return map;
}

TimeSeriesTable random_table(std::uint64_t seed) {
  synth::Rng rng(seed);
  const std::size_t vars = 3 + seed % 6, len = 12 + seed % 20;
  std::vector<double> slope(vars);
  for (auto& s : slope) s = rng.uniform() < 0.5 ? 0.0 : rng.uniform(-3, 3);
  std::vector<TimeSeriesTable::Row> rows;
  for (std::size_t t = 0; t < len; ++t) {
    TimeSeriesTable::Row row;
    for (std::size_t v = 0; v < vars; ++v) row.emplace_back(slope[v] * double(t) + rng.normal() * rng.uniform(0.1, 6));
    rows.push_back(row);
  }
  std::vector<std::string> names;
  for (std::size_t v = 0; v < vars; ++v) names.push_back("v" + std::to_string(v));
  return TimeSeriesTable(names, synth::labels_from(0, len), std::move(rows));
}

}  // namespace

TEST(BuildMap, NoiseFixtureIsUnrelated) {
  auto t = abc_table();
  auto a = column_values(t, "A"), c = column_values(t, "C");
  EXPECT_LT(std::abs(oracle::pearson(a, c)), 0.4);
  EXPECT_LT(std::abs(oracle::spearman(a, c)), 0.4);
  EXPECT_LT(oracle::nmi(a, c, 3), 0.3);
}

TEST(BuildMap, LinearPairLinkedNoiseInactive) {
  auto map = build_map(abc_table());
  ASSERT_EQ(map.links.size(), 1u);
  EXPECT_EQ(map.links[0].a, "A");
  EXPECT_EQ(map.links[0].b, "B");
  EXPECT_EQ(map.links[0].strength, LinkStrength::Strong);
  EXPECT_EQ(map.links[0].sign, LinkSign::Positive);
  EXPECT_EQ(map.find_node("C")->status, NodeStatus::Inactive);
  EXPECT_EQ(map.find_node("A")->status, NodeStatus::Active);
  EXPECT_TRUE(map.nodes_with(NodeStatus::Hub).empty());
  EXPECT_FALSE(map.source.has_value());
}

TEST(BuildMap, ConstantVariableGivesNoLinks) {
  TimeSeriesTable t({"x", "flat"}, synth::labels_from(0, 4), {{1.0, 2.0}, {2.0, 2.0}, {3.0, 2.0}, {5.0, 2.0}});
  auto map = build_map(t);
  EXPECT_TRUE(map.links.empty());
  EXPECT_EQ(map.nodes_with(NodeStatus::Inactive), (std::set<std::string>{"flat", "x"}));
}

TEST(BuildMap, FinancialIncomeExpensesStrong) {
  auto map = build_map(synth::financial_table());
  auto it = std::find_if(map.links.begin(), map.links.end(),
                         [](const MapLink& l) { return l.a == "expenses" && l.b == "income"; });
  ASSERT_NE(it, map.links.end());
  EXPECT_EQ(it->strength, LinkStrength::Strong);
  EXPECT_EQ(it->sign, LinkSign::Positive);
  EXPECT_EQ(map.find_node("income")->role, Role::Input);
  EXPECT_EQ(map.find_node("tax")->role, Role::Output);
}

TEST(BuildMap, Errors) {
  TimeSeriesTable one({"x"}, synth::labels_from(0, 4), {{1.0}, {2.0}, {3.0}, {4.0}});
  EXPECT_EQ(kind_of([&] { build_map(one); }), ErrorKind::TooFewVariables);
  auto t = abc_table();
  RelationThresholds th;
  th.min_points = 11;
  EXPECT_EQ(kind_of([&] { build_map(t, th); }), ErrorKind::TooFewPoints);
}

TEST(BuildMap, WindowSourceIsRecorded) {
  auto map = build_map(select_window(abc_table(), 2, 5));
  ASSERT_TRUE(map.source.has_value());
  EXPECT_EQ(*map.source, (WindowOrigin{2, 5}));
}

TEST(BuildMap, DegreesAndStatusesConsistent) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto map = build_map(random_table(seed));
    std::map<std::string, std::size_t> count;
    for (const auto& l : map.links) {
      EXPECT_LT(l.a, l.b);
      ++count[l.a];
      ++count[l.b];
    }
    for (const auto& n : map.nodes) {
      EXPECT_EQ(n.degree, count[n.name]);
      EXPECT_EQ(n.status == NodeStatus::Inactive, n.degree == 0);
    }
  }
}

TEST(BuildMap, PositiveAffineRescalingChangesNothing) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto t = random_table(seed);
    std::vector<TimeSeriesTable::Row> rows = t.rows();
    for (auto& row : rows)
      for (std::size_t v = 0; v < row.size(); ++v) row[v] = *row[v] * (0.5 + v) + 100.0 * v - 7.0;
    TimeSeriesTable scaled(t.variables(), t.time_labels(), rows);
    auto a = build_map(t), b = build_map(scaled);
    EXPECT_EQ(a.nodes, b.nodes) << "seed " << seed;
    ASSERT_EQ(a.links.size(), b.links.size());
    for (std::size_t i = 0; i < a.links.size(); ++i) {
      EXPECT_EQ(a.links[i].relation.relation_class, b.links[i].relation.relation_class);
      EXPECT_EQ(a.links[i].relation.nmi, b.links[i].relation.nmi);
    }
  }
}

TEST(BuildMap, Deterministic) {
  auto t = synth::financial_table();
  EXPECT_EQ(export_json(build_map(t)), export_json(build_map(t)));
}

TEST(Hubs, Star) {
  auto map = graph(6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  EXPECT_EQ(map.nodes_with(NodeStatus::Hub), (std::set<std::string>{"n10"}));
}

TEST(Hubs, NoLinksNoHubs) {
  auto map = graph(4, {});
  EXPECT_TRUE(map.nodes_with(NodeStatus::Hub).empty());
  EXPECT_EQ(map.nodes_with(NodeStatus::Inactive).size(), 4u);
}

TEST(Hubs, TiedMaximumBothHubs) {
  // n10 and n11 have degree 4, the leaves degree 1
  auto map = graph(10, {{0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 6}, {1, 7}, {1, 8}, {1, 9}});
  EXPECT_EQ(map.nodes_with(NodeStatus::Hub), (std::set<std::string>{"n10", "n11"}));
}

TEST(Hubs, SinglePairHasNoHub) {
  auto map = graph(3, {{0, 1}});
  EXPECT_TRUE(map.nodes_with(NodeStatus::Hub).empty());
  EXPECT_EQ(map.nodes_with(NodeStatus::Active).size(), 2u);
}

TEST(Hubs, ThresholdIsExactInteger) {
  EXPECT_EQ(hub_threshold({}), 2u);
  EXPECT_EQ(hub_threshold({0, 0}), 2u);
  EXPECT_EQ(hub_threshold({1, 1}), 2u);
  EXPECT_EQ(hub_threshold({1, 3}), 3u);  // mean 2, std 1
  EXPECT_EQ(hub_threshold({5, 1, 1, 1, 1, 1}), 4u);
  EXPECT_EQ(hub_threshold({3, 3, 3, 1}), 4u);
  EXPECT_EQ(hub_threshold({0, 2, 2, 2, 0}), 2u);
}

TEST(Hubs, FallbackToMaximumDegree) {
  KnowledgeMap map;
  for (auto [name, d] : std::vector<std::pair<std::string, std::size_t>>{{"a", 3}, {"b", 3}, {"c", 3}, {"d", 1}})
    map.nodes.push_back({name, Role::Internal, NodeStatus::Active, d});
  EXPECT_EQ(identify_hubs(map), (std::set<std::string>{"a", "b", "c"}));
}

TEST(Hubs, RandomGraphsFollowTheRule) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto map = build_map(random_table(seed));
    std::vector<std::size_t> active;
    std::size_t max_degree = 0;
    for (const auto& n : map.nodes) {
      if (n.degree > 0) active.push_back(n.degree);
      max_degree = std::max(max_degree, n.degree);
    }
    double mean = 0, var = 0;
    for (auto d : active) mean += double(d) / active.size();
    for (auto d : active) var += (d - mean) * (d - mean) / active.size();
    const double t = active.empty() ? 2 : std::max(2.0, std::ceil(mean + std::sqrt(var) - 1e-9));
    bool any_above = std::any_of(map.nodes.begin(), map.nodes.end(), [&](auto& n) { return n.degree >= t; });
    for (const auto& n : map.nodes) {
      const bool expect_hub = any_above ? n.degree >= t : (max_degree >= 2 && n.degree == max_degree);
      EXPECT_EQ(n.status == NodeStatus::Hub, expect_hub) << "seed " << seed << " node " << n.name;
    }
  }
}

TEST(Dsm, SingleStrongLink) {
  auto map = build_map(TimeSeriesTable({"A", "B"}, synth::labels_from(0, 3), {{1.0, 2.0}, {2.0, 4.0}, {3.0, 6.0}}));
  auto dsm = to_dsm(map);
  EXPECT_EQ(dsm.order, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(dsm.cells[0][1], DsmCell::Strong);
  EXPECT_EQ(dsm.cells[1][0], DsmCell::Strong);
  EXPECT_EQ(dsm_csv(dsm), ",A,B\nA,A,S\nB,S,B\n");
}

TEST(Dsm, NoLinks) {
  auto dsm = to_dsm(graph(3, {}));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(dsm.cells[i][j], DsmCell::Empty);
}

TEST(Dsm, NoiseFixtureHasOneStrongPair) {
  auto dsm = to_dsm(build_map(abc_table()));
  int strong = 0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(dsm.cells[i][j], dsm.cells[j][i]);
      strong += dsm.cells[i][j] == DsmCell::Strong;
    }
  EXPECT_EQ(strong, 2);
}

TEST(Dsm, RoleOrder) {
  auto map = build_map(synth::financial_table());
  EXPECT_EQ(dsm_order(map), (std::vector<std::string>{"income", "net_sales", "employee_cost", "expenses",
                                                      "profit_before_tax", "tax"}));
}

TEST(Dot, EmptyMap) {
  auto dot = export_dot(KnowledgeMap{});
  EXPECT_EQ(dot.rfind("graph ", 0), 0u);
  EXPECT_EQ(dot.find("--"), std::string::npos);
  EXPECT_EQ(dot.back(), '\n');
}

TEST(Dot, HubAndInactiveStyles) {
  auto map = graph(7, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
  auto dot = export_dot(map);
  EXPECT_NE(dot.find("\"n10\" [shape=circle, fillcolor=\"#cc0000\""), std::string::npos) << dot;
  EXPECT_NE(dot.find("\"n16\" [shape=square, fillcolor=\"#ffffff\""), std::string::npos) << dot;
  EXPECT_NE(dot.find("\"n10\" -- \"n11\""), std::string::npos) << dot;
}

TEST(Dot, LinkStyles) {
  auto dot = export_dot(build_map(abc_table()));
  EXPECT_NE(dot.find("\"A\" -- \"B\" [color=black, style=solid"), std::string::npos) << dot;
  EXPECT_NE(dot.find("label=\"+\""), std::string::npos);
}

TEST(Json, RoundTrip) {
  std::vector<KnowledgeMap> maps{build_map(abc_table()), build_map(synth::financial_table()),
                                 build_map(select_window(synth::financial_table(), 3, 5)), graph(6, {{0, 1}, {1, 2}})};
  for (const auto& map : maps) {
    const auto text = export_json(map);
    EXPECT_NE(text.find("\"schema\": \"kmap-1\""), std::string::npos);
    auto loaded = load_map_json(text);
    EXPECT_EQ(loaded.nodes, map.nodes);
    EXPECT_EQ(loaded.edges(), map.edges());
    EXPECT_EQ(loaded.source, map.source);
    ASSERT_EQ(loaded.links.size(), map.links.size());
    for (std::size_t i = 0; i < map.links.size(); ++i) {
      EXPECT_EQ(loaded.links[i].relation.relation_class, map.links[i].relation.relation_class);
      EXPECT_NEAR(loaded.links[i].relation.pearson_r, map.links[i].relation.pearson_r, 1e-11);
      EXPECT_NEAR(loaded.links[i].relation.nmi, map.links[i].relation.nmi, 1e-11);
    }
    EXPECT_EQ(export_json(loaded), text);
  }
}

TEST(Json, TwelveSignificantDigits) {
  EXPECT_EQ(round_sig12(0.123456789012345), 0.123456789012);
  auto text = export_json(build_map(abc_table()));
  auto j = nlohmann::ordered_json::parse(text);
  const double r = j["links"][0]["relation"]["pearson_r"];
  EXPECT_EQ(r, round_sig12(r));
}

TEST(Json, RejectsMalformed) {
  auto text = export_json(build_map(abc_table()));
  EXPECT_EQ(kind_of([] { load_map_json("{"); }), ErrorKind::MalformedMap);
  EXPECT_EQ(kind_of([] { load_map_json("{\"schema\": \"kmap-9\"}"); }), ErrorKind::MalformedMap);
  auto j = nlohmann::ordered_json::parse(text);
  j["nodes"][2]["degree"] = 3;
  EXPECT_EQ(kind_of([&] { map_from_json(j); }), ErrorKind::MalformedMap);
}
