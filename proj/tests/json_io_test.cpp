#include <gtest/gtest.h>

#include "bellext/json_io.hpp"
#include "test_support.hpp"

namespace bellext {
namespace {

TEST(JsonIo, DistributionRoundTrip) {
  auto rng = test::make_rng(50);
  const auto d = random_distribution(rng, VariableSet({"X", "Y", "Z"}, Domain::PlusMinus));
  const auto back = distribution_from_json(Json::parse(to_json(d).dump()));
  EXPECT_EQ(back.vars(), d.vars());
  EXPECT_LE(max_abs_difference(back.weights(), d.weights()), 0.0);
}

TEST(JsonIo, DistributionErrors) {
  EXPECT_THROW(distribution_from_json(Json::parse(R"({"vars": ["A"], "weights": [0.5, 0.5]})")), SchemaError);
  EXPECT_THROW(distribution_from_json(Json::parse(R"({"vars": ["A"], "domain": "xx", "weights": [0.5, 0.5]})")),
               SchemaError);
  EXPECT_THROW(distribution_from_json(Json::parse(R"({"vars": ["A"], "domain": "01", "weights": ["a", 0.5]})")),
               SchemaError);
  EXPECT_THROW(distribution_from_json(Json::parse(R"({"vars": ["A"], "domain": "01", "weights": [0.7, 0.5]})")),
               InvalidDistribution);
}

TEST(JsonIo, MatrixRoundTripIsRowMajor) {
  ComplexMatrix m(2, 3);
  m << Complex(1, 2), Complex(3, 0), Complex(0, -1), Complex(4, 4), Complex(5, 0), Complex(6, 1);
  const Json j = to_json(m);
  EXPECT_EQ(j["data"][1][0].get<double>(), 3.0);
  EXPECT_EQ(j["data"][3][1].get<double>(), 4.0);
  EXPECT_LE(max_abs(matrix_from_json(j) - m), 0.0);
  EXPECT_THROW(matrix_from_json(Json::parse(R"({"rows": 2, "cols": 2, "data": [[1, 0]]})")), SchemaError);
}

TEST(JsonIo, ScenarioRoundTripPreservesPredictions) {
  for (const char* name : {"singlet", "hardy", "ghsz"}) {
    const Scenario s = *builtin_scenario(name);
    const Scenario back = scenario_from_json(Json::parse(to_json(s).dump()));
    EXPECT_EQ(back.name(), s.name());
    EXPECT_EQ(back.vars(), s.vars());
    EXPECT_EQ(back.contexts(), s.contexts());
    const auto a = s.measurable_moments(), b = back.measurable_moments();
    ASSERT_EQ(a.size(), b.size());
    for (const auto& [mask, value] : a.entries()) EXPECT_NEAR(*b.get(mask), value, 1e-12) << name;
  }
}

TEST(JsonIo, MomentScenario) {
  const Json j = Json::parse(R"({
    "name": "m", "domain": "01", "variables": ["A", "B"], "contexts": [["A", "B"]],
    "source": {"type": "moments", "entries": {"A": 0.5, "B": 0.4, "A,B": 0.2}}})");
  const Scenario s = scenario_from_json(j);
  EXPECT_FALSE(s.is_quantum());
  EXPECT_DOUBLE_EQ(s.measurable_moments().at({"A", "B"}), 0.2);
  EXPECT_EQ(to_json(s)["source"]["entries"]["A,B"].get<double>(), 0.2);
}

TEST(JsonIo, ScenarioErrors) {
  Json j = to_json(build_singlet_scenario());
  Json no_obs = j;
  no_obs["source"]["observables"].erase("B2");
  EXPECT_THROW(scenario_from_json(no_obs), SchemaError);
  Json bad_type = j;
  bad_type["source"]["type"] = "classical";
  EXPECT_THROW(scenario_from_json(bad_type), SchemaError);
  Json bad_var = j;
  bad_var["contexts"][0][0] = "Q";
  EXPECT_THROW(scenario_from_json(bad_var), UnknownVariable);
  Json not_projector = j;
  not_projector["source"]["observables"]["A1"]["convention"] = "sign";
  EXPECT_THROW(scenario_from_json(not_projector), InvalidObservable);
  Json bad_moment = Json::parse(R"({
    "name": "m", "domain": "01", "variables": ["A"], "contexts": [["A"]],
    "source": {"type": "moments", "entries": {"A": 1.5}}})");
  EXPECT_THROW(scenario_from_json(bad_moment), InvalidMoments);
}

TEST(JsonIo, GraphRoundTrip) {
  auto rng = test::make_rng(51);
  const auto g = random_tree_graph(rng, 5);
  const auto back = graph_from_json(Json::parse(to_json(g).dump()));
  EXPECT_EQ(back.blocks(), g.blocks());
  ASSERT_EQ(back.edges().size(), g.edges().size());
  for (std::size_t e = 0; e < g.edges().size(); ++e) {
    EXPECT_EQ(back.edges()[e].a, g.edges()[e].a);
    EXPECT_EQ(back.edges()[e].dist.vars(), g.edges()[e].dist.vars());
  }
  EXPECT_THROW(graph_from_json(Json::parse(R"({"nodes": [], "edges": [{"a": -1, "b": 0}]})")), SchemaError);
}

TEST(JsonIo, IntervalEncoding) {
  const Json ok = to_json(Interval::closed(0.1, 0.2));
  EXPECT_EQ(ok["range"][0].get<double>(), 0.1);
  EXPECT_FALSE(ok["empty"].get<bool>());
  EXPECT_EQ(ok["reason"], "none");
  const Json inf = to_json(Interval::infeasible());
  EXPECT_TRUE(inf["range"][0].is_null());
  EXPECT_EQ(inf["reason"], "infeasible");
}

}  // namespace
}  // namespace bellext
