#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bellext/probability.hpp"
#include "bellext/scenarios.hpp"
#include "bellext/tree_extension.hpp"
#include "test_support.hpp"

namespace bellext {
namespace {

const VariableSet kAB({"A", "B"}, Domain::ZeroOne);

TEST(VariableSet, RejectsDuplicatesAndIndexesMsbFirst) {
  EXPECT_THROW(VariableSet({"A", "A"}, Domain::ZeroOne), Error);
  EXPECT_EQ(kAB.bit(0), 2u);
  EXPECT_EQ(kAB.bit(1), 1u);
  EXPECT_EQ(atom_values(kAB, 2), (std::vector<int>{1, 0}));
  EXPECT_THROW(kAB.index_of("C"), UnknownVariable);
}

TEST(Distribution, ValidatesWeights) {
  EXPECT_THROW(Distribution(kAB, {0.5, 0.5, 0.5, -0.5}), InvalidDistribution);
  EXPECT_THROW(Distribution(kAB, {0.5, 0.5, 0.5}), InvalidDistribution);
  EXPECT_THROW(Distribution(kAB, {0.3, 0.3, 0.3, 0.3}), InvalidDistribution);
  EXPECT_NO_THROW(Distribution(kAB, {0.25, 0.25, 0.25, 0.25 + 5e-10}));
}

TEST(Moment, UniformFairBits) {
  const auto u = Distribution::uniform(kAB);
  EXPECT_DOUBLE_EQ(moment(u, {"A", "B"}), 0.25);
  EXPECT_DOUBLE_EQ(moment(u, {}), 1.0);
  EXPECT_THROW(moment(u, {"Z"}), UnknownVariable);
}

TEST(Moment, GhszModelOneTripleCorrelation) {
  const auto d = build_ghsz_model(1);
  EXPECT_NEAR(moment(d, {"A1", "B1", "C1"}), -1.0, 1e-12);
  EXPECT_NEAR(moment(d, {"A1", "B1", "C1"}), test::brute_moment(d, {"A1", "B1", "C1"}), 1e-12);
}

TEST(Marginalize, UniformAndIdentity) {
  const auto u = Distribution::uniform(kAB);
  const auto m = marginalize(u, {"A"});
  EXPECT_EQ(m.vars().names(), (std::vector<std::string>{"A"}));
  EXPECT_DOUBLE_EQ(m.weight(0), 0.5);
  EXPECT_DOUBLE_EQ(m.weight(1), 0.5);

  auto rng = test::make_rng(1);
  const auto d = random_distribution(rng, VariableSet({"X", "Y", "Z"}, Domain::PlusMinus));
  const auto same = marginalize(d, {"Z", "X", "Y"});
  EXPECT_EQ(same.vars(), d.vars());
  EXPECT_LE(max_abs_difference(same.weights(), d.weights()), 1e-15);
  EXPECT_THROW(marginalize(d, {"Q"}), UnknownVariable);
}

TEST(Marginalize, GluedSingletModelKeepsMeasuredPair) {
  const Scenario s = build_singlet_scenario();
  const Distribution a1b1 = s.context_distribution(0);  // {A1, B1}
  const Distribution a2b1 = s.context_distribution(2);  // {A2, B1}
  const Distribution joint = glue(a1b1, a2b1);
  const Distribution back = marginalize(joint, {"A1", "B1"});
  EXPECT_NEAR(moment(back, {"A1", "B1"}), 0.25 + std::numbers::sqrt2 / 8.0, 1e-12);
  EXPECT_NEAR(moment(back, {"A1", "B1"}), 0.4267767, 1e-7);
}

TEST(MomentsToDistribution, UniformFromIndependentMoments) {
  MomentConstraints m(kAB);
  m.set({"A"}, 0.5).set({"B"}, 0.5).set({"A", "B"}, 0.25);
  const auto d = moments_to_distribution(m);
  for (std::size_t a = 0; a < 4; ++a) EXPECT_NEAR(d.weight(a), 0.25, 1e-15);
}

TEST(MomentsToDistribution, NegativeAtomIsNotRealizable) {
  // by hand: p(A=1, B=0) = p(A=0, B=1) = 0.5 - 0.6 = -0.1; the first one in atom order is reported
  MomentConstraints m(kAB);
  m.set({"A"}, 0.5).set({"B"}, 0.5).set({"A", "B"}, 0.6);
  try {
    moments_to_distribution(m);
    FAIL() << "expected NotRealizable";
  } catch (const NotRealizable& e) {
    EXPECT_NE(std::string(e.what()).find("-0.1"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("A=0 B=1"), std::string::npos) << e.what();
  }
}

TEST(MomentsToDistribution, MissingMonomialIsIncomplete) {
  MomentConstraints m(kAB);
  m.set({"A"}, 0.5).set({"B"}, 0.5);
  EXPECT_THROW(moments_to_distribution(m), IncompleteMoments);
}

TEST(MomentsToDistribution, GhszModelRoundTrip) {
  for (int which : {1, 2}) {
    const auto d = build_ghsz_model(which);
    const auto back = moments_to_distribution(full_moments(d));
    EXPECT_LE(max_abs_difference(back.weights(), d.weights()), 1e-12);
    // also through the {0,1} relabelling
    const auto d01 = convert_domain(d, Domain::ZeroOne);
    const auto back01 = moments_to_distribution(full_moments(d01));
    EXPECT_LE(max_abs_difference(back01.weights(), d.weights()), 1e-12);
  }
}

TEST(MomentsToDistribution, AgreesWithLinearSolveOracle) {
  auto rng = test::make_rng(2);
  for (Domain dom : {Domain::ZeroOne, Domain::PlusMinus})
    for (std::size_t n = 1; n <= 4; ++n) {
      const VariableSet vars(variable_names(n), dom);
      const auto d = random_distribution(rng, vars);
      std::vector<double> by_mask(vars.atom_count());
      for (Mask s = 0; s < vars.atom_count(); ++s) by_mask[s] = test::brute_moment(d, vars.monomial_of(s));
      const auto oracle = test::solve_moment_system(vars, by_mask);
      const auto fast = moments_to_distribution(full_moments(d));
      EXPECT_LE(max_abs_difference(fast.weights(), oracle), 1e-12);
      EXPECT_LE(max_abs_difference(fast.weights(), d.weights()), 1e-12);
    }
}

TEST(Condition, UniformGivenOneBit) {
  const auto c = condition(Distribution::uniform(kAB), {{"A", 1}});
  EXPECT_EQ(c.vars().names(), (std::vector<std::string>{"B"}));
  EXPECT_DOUBLE_EQ(c.weight(0), 0.5);
  EXPECT_DOUBLE_EQ(c.weight(1), 0.5);
  EXPECT_THROW(condition(c, {{"Q", 1}}), UnknownVariable);
  EXPECT_THROW(condition(c, {{"B", 2}}), Error);
}

TEST(Condition, GhszModelOneGivenC1) {
  const auto d = build_ghsz_model(1);
  const auto c = condition(d, {{"C1", 1}});
  ASSERT_EQ(c.vars().names(), (std::vector<std::string>{"A1", "A2", "B1", "B2"}));
  // oracle: enumerate all 32 atoms of the model with C1 = +1 and renormalize
  double mass = 0.0;
  std::vector<double> expected(16, 0.0);
  for (std::size_t a = 0; a < 32; ++a) {
    const auto v = atom_values(d.vars(), a);
    if (v[4] != 1) continue;
    const int sub[] = {v[0], v[1], v[2], v[3]};
    expected[atom_index(c.vars(), sub)] += d.weight(a);
    mass += d.weight(a);
  }
  for (auto& x : expected) x /= mass;
  EXPECT_LE(max_abs_difference(c.weights(), expected), 1e-15);
  for (std::size_t a = 0; a < 16; ++a) {
    const auto v = atom_values(c.vars(), a);
    if (c.weight(a) > 0) {
      EXPECT_EQ(v[2], -v[0]);
      EXPECT_EQ(v[3], -v[1]);
    }
  }
}

TEST(Condition, NullEventFallsBackToUniform) {
  const auto d = Distribution::point_mass(kAB, 0);  // A = 0, B = 0
  const auto c = condition(d, {{"A", 1}});
  EXPECT_DOUBLE_EQ(c.weight(0), 0.5);
  EXPECT_DOUBLE_EQ(c.weight(1), 0.5);
}

TEST(ConvertDomain, UniformPairAndIdentity) {
  const auto pm = Distribution::uniform(VariableSet({"A1", "A2"}, Domain::PlusMinus));
  EXPECT_DOUBLE_EQ(moment(pm, {"A1", "A2"}), 0.0);
  const auto zo = convert_domain(pm, Domain::ZeroOne);
  EXPECT_DOUBLE_EQ(moment(zo, {"A1", "A2"}), 0.25);
  const auto same = convert_domain(zo, Domain::ZeroOne);
  EXPECT_EQ(same.vars(), zo.vars());
  EXPECT_LE(max_abs_difference(same.weights(), zo.weights()), 0.0);
}

TEST(ConvertDomain, GhszModelTripleInZeroOne) {
  const auto d = build_ghsz_model(1);
  const auto zo = convert_domain(d, Domain::ZeroOne);
  // brute force: probability that A1, B1, C1 are all +1
  double oracle = 0.0;
  for (std::size_t a = 0; a < 32; ++a) {
    const auto v = atom_values(d.vars(), a);
    if (v[0] == 1 && v[2] == 1 && v[4] == 1) oracle += d.weight(a);
  }
  // expansion of <(s1+1)(t1+1)(u1+1)>/8 from the ±1 moments
  double expansion = 1.0;
  const Monomial vars{"A1", "B1", "C1"};
  for (Mask s = 1; s < 8; ++s) {
    Monomial m;
    for (int i = 0; i < 3; ++i)
      if (s & (1u << i)) m.push_back(vars[i]);
    expansion += moment(d, m);
  }
  expansion /= 8.0;
  EXPECT_NEAR(moment(zo, vars), oracle, 1e-15);
  EXPECT_NEAR(moment(zo, vars), expansion, 1e-15);
  EXPECT_NEAR(oracle, 0.0, 1e-15);
}

// --- properties --------------------------------------------------------------

TEST(ProbabilityProperties, MarginalizeCommutesWithMoment) {
  auto rng = test::make_rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 6;
    const VariableSet vars(variable_names(n), trial % 2 ? Domain::PlusMinus : Domain::ZeroOne);
    const auto d = random_distribution(rng, vars);
    const Mask keep = std::uniform_int_distribution<Mask>(1, vars.full_mask())(rng);
    const auto m = marginalize_mask(d, keep);
    for (Mask s = keep;; s = (s - 1) & keep) {
      const auto mono = vars.monomial_of(s);
      ASSERT_NEAR(moment(m, mono), moment(d, mono), 1e-12);
      if (s == 0) break;
    }
  }
}

TEST(ProbabilityProperties, RoundTripRandomUpToEightVariables) {
  auto rng = test::make_rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const VariableSet vars(variable_names(n), trial % 3 ? Domain::ZeroOne : Domain::PlusMinus);
    const auto d = random_distribution(rng, vars);
    const auto m = full_moments(d);
    const auto back = moments_to_distribution(m);
    ASSERT_LE(max_abs_difference(back.weights(), d.weights()), 1e-9);
    for (const auto& [mask, value] : m.entries()) ASSERT_NEAR(moment(back, mask), value, 1e-9);
  }
}

TEST(ProbabilityProperties, ConvertDomainIsAnInvolution) {
  auto rng = test::make_rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = random_distribution(rng, VariableSet(variable_names(1 + trial % 5), Domain::ZeroOne));
    const auto there = convert_domain(d, Domain::PlusMinus);
    const auto back = convert_domain(there, Domain::ZeroOne);
    EXPECT_EQ(back.vars(), d.vars());
    EXPECT_LE(max_abs_difference(there.weights(), d.weights()), 0.0);
    EXPECT_LE(max_abs_difference(back.weights(), d.weights()), 0.0);
    // <prod s> = <prod (2a - 1)> on a single pair
    if (d.vars().size() >= 2) {
      const Monomial p{d.vars().names()[0], d.vars().names()[1]};
      const double a1 = moment(d, {p[0]}), a2 = moment(d, {p[1]}), a12 = moment(d, p);
      EXPECT_NEAR(moment(there, p), 4 * a12 - 2 * a1 - 2 * a2 + 1, 1e-12);
    }
  }
}

}  // namespace
}  // namespace bellext
