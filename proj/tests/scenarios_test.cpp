#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bellext/scenarios.hpp"
#include "test_support.hpp"

namespace bellext {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

TEST(Singlet, PredictedMoments) {
  const auto m = build_singlet_scenario().measurable_moments();
  for (const auto* v : {"A1", "A2", "B1", "B2"}) EXPECT_NEAR(m.at({v}), 0.5, 1e-12);
  EXPECT_NEAR(m.at({"A1", "B1"}), 0.25 + kSqrt2 / 8.0, 1e-12);
  EXPECT_NEAR(m.at({"A2", "B1"}), 0.25 + kSqrt2 / 8.0, 1e-12);
  EXPECT_NEAR(m.at({"A1", "B2"}), 0.25 + kSqrt2 / 8.0, 1e-12);
  EXPECT_NEAR(m.at({"A2", "B2"}), 0.25 - kSqrt2 / 8.0, 1e-12);
  EXPECT_NEAR(m.at({"A2", "B2"}), 0.0732233, 1e-7);
  EXPECT_FALSE(m.contains({"A1", "A2"}));
  EXPECT_FALSE(m.contains({"B1", "B2"}));
}

TEST(Singlet, RestrictedMeasurableMoments) {
  const auto m = build_singlet_scenario().measurable_moments({"A1", "A2", "B1"});
  EXPECT_EQ(m.vars().names(), (Monomial{"A1", "A2", "B1"}));
  EXPECT_EQ(m.size(), 5u);
}

// Oracle for the Hardy margin: direct 2x2 spinor algebra at angle theta,
// with L1 = R1 = z and L2 = R2 at theta.
double hardy_margin_oracle(double theta) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  // |L1+,R1-> = |0>|1>;  |L2-,R2+> = (-s, c) x (c, s)
  const double first[4] = {0, 1, 0, 0};
  const double second[4] = {-s * c, -s * s, c * c, c * s};
  double overlap = 0;
  for (int i = 0; i < 4; ++i) overlap += second[i] * first[i];
  double psi[4], norm = 0;
  for (int i = 0; i < 4; ++i) {
    psi[i] = first[i] - overlap * second[i];
    norm += psi[i] * psi[i];
  }
  // <A1> - <A1 B1> = P(R1 = +, L1 = -) = |psi_{10}|^2 / norm (left index first)
  return psi[2] * psi[2] / norm;
}

TEST(Hardy, DefaultConditionsHold) {
  const auto s = build_hardy_scenario();
  const auto c = HardyConditions::from(s.measurable_moments());
  EXPECT_LE(c.max_zero_residual(), 1e-9);
  EXPECT_GT(c.a1_not_b1, 1e-3);
  EXPECT_NEAR(c.a1_not_b1, 0.09017, 1e-5);
  EXPECT_NEAR(c.a1_not_b1, hardy_margin_oracle(kHardyOptimalAngle), 1e-12);
}

TEST(Hardy, DefaultAngleMaximizesTheMargin) {
  double best = 0.0, best_theta = 0.0;
  for (int k = 1; k < 20000; ++k) {
    const double theta = std::numbers::pi * k / 20000.0;
    const double v = hardy_margin_oracle(theta);
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  EXPECT_NEAR(best, (5.0 * std::sqrt(5.0) - 11.0) / 2.0, 1e-7);
  EXPECT_NEAR(best_theta, kHardyOptimalAngle, 1e-3);
  // the builder agrees with the oracle away from the optimum too
  for (double theta : {0.4, 1.0, 2.0, 2.8}) {
    const auto c = HardyConditions::from(build_hardy_scenario({0, theta, 0, theta}).measurable_moments());
    EXPECT_NEAR(c.a1_not_b1, hardy_margin_oracle(theta), 1e-12) << theta;
  }
}

TEST(Hardy, AlignedDirectionsAreDegenerate) {
  EXPECT_THROW(build_hardy_scenario({0, 0, 0, 0}), DegenerateParameters);
  // at pi the second term cancels the first and the state vanishes
  EXPECT_THROW(build_hardy_scenario({0, std::numbers::pi, 0, std::numbers::pi}), DegenerateParameters);
}

TEST(Ghsz, PerfectTripleCorrelations) {
  const auto m = build_ghsz_scenario().measurable_moments();
  EXPECT_NEAR(m.at({"A1", "B1", "C1"}), -1.0, 1e-12);
  EXPECT_NEAR(m.at({"A2", "B2", "C1"}), -1.0, 1e-12);
  EXPECT_NEAR(m.at({"A2", "B1", "C2"}), -1.0, 1e-12);
  EXPECT_NEAR(m.at({"A1", "B2", "C2"}), 1.0, 1e-12);
}

TEST(Ghsz, SinglesPairsAndOtherTriplesVanish) {
  const auto s = build_ghsz_scenario();
  const auto m = s.measurable_moments();
  for (const auto& [mask, value] : m.entries()) {
    if (std::popcount(mask) >= 3) continue;
    EXPECT_NEAR(value, 0.0, 1e-12) << join_names(s.vars().monomial_of(mask));
  }
  EXPECT_NEAR(m.at({"A1", "B2", "C1"}), 0.0, 1e-12);
  EXPECT_NEAR(m.at({"A2", "B1", "C1"}), 0.0, 1e-12);
  EXPECT_NEAR(m.at({"A2", "B2", "C2"}), 0.0, 1e-12);
  EXPECT_NEAR(m.at({"A1", "B1", "C2"}), 0.0, 1e-12);
  // 6 singles + 12 cross pairs + 8 triples
  EXPECT_EQ(m.size(), 26u);
}

TEST(Ghsz, ModelsAndFourFoldCorrelation) {
  const auto m1 = build_ghsz_model(1), m2 = build_ghsz_model(2);
  EXPECT_NEAR(moment(m1, {"A1", "B1", "C1"}), -1.0, 1e-15);
  EXPECT_NEAR(moment(m1, {"A1", "A2", "B1", "B2"}), 1.0, 1e-15);
  EXPECT_NEAR(moment(m2, {"A1", "B2", "C2"}), 1.0, 1e-15);
  EXPECT_NEAR(moment(m2, {"A1", "A2", "B1", "B2"}), -1.0, 1e-15);
  for (const auto* m : {&m1, &m2}) {
    EXPECT_NEAR(moment(*m, {"B1", "B2"}), 0.0, 1e-15);
    EXPECT_NEAR(moment(*m, {"A1", "A2"}), 0.0, 1e-15);
    EXPECT_NEAR(moment(*m, {"A1", "B1", "B2"}), 0.0, 1e-15);
    EXPECT_NEAR(moment(*m, {"A2", "B1", "B2"}), 0.0, 1e-15);
    EXPECT_NEAR(moment(*m, {"B1", "A1", "A2"}), 0.0, 1e-15);
    EXPECT_NEAR(moment(*m, {"B2", "A1", "A2"}), 0.0, 1e-15);
  }
  EXPECT_THROW(build_ghsz_model(3), Error);
}

TEST(Ghsz, ParitySearchHasNoSolution) { EXPECT_EQ(count_parity_solutions(), 0u); }

TEST(Ghsz, Analysis) {
  const auto a = analyze_ghsz();
  EXPECT_TRUE(a.shared_moments_agree);
  EXPECT_NEAR(a.four_correlation.first, 1.0, 1e-9);
  EXPECT_NEAR(a.four_correlation.second, -1.0, 1e-9);
  EXPECT_TRUE(a.parity_obstruction);
  EXPECT_EQ(a.parity_solutions, 0u);
  EXPECT_TRUE(a.atomwise);
  EXPECT_NEAR(a.forced_range1.lo, 1.0, 1e-9);
  EXPECT_NEAR(a.forced_range1.hi, 1.0, 1e-9);
  EXPECT_NEAR(a.forced_range2.lo, -1.0, 1e-9);
  EXPECT_NEAR(a.forced_range2.hi, -1.0, 1e-9);
}

TEST(Ghsz, EachModelMatchesItsContextsAtomwise) {
  const auto s = build_ghsz_scenario();
  for (std::size_t k = 0; k < s.contexts().size(); ++k) {
    const auto& ctx = s.contexts()[k];
    const auto q = s.context_distribution(k);
    const auto model = build_ghsz_model(ctx[2] == "C1" ? 1 : 2);
    const auto marginal = reorder(marginalize(model, ctx), ctx);
    EXPECT_LE(max_abs_difference(marginal.weights(), q.weights()), 1e-12) << join_names(ctx);
  }
}

TEST(Ghsz, VerifyContextNamesTheBadMoment) {
  const auto s = build_ghsz_scenario();
  // model 2 does not describe the C1 contexts
  auto c1 = s.context_distribution(0);  // {A1, B1, C1}
  auto model = build_ghsz_model(2);
  // rename C2 to C1 so the variables line up, then compare
  const Distribution renamed(VariableSet({"A1", "A2", "B1", "B2", "C1"}, Domain::PlusMinus),
                             std::vector<double>(model.weights().begin(), model.weights().end()));
  try {
    detail::verify_context(renamed, c1, 1e-9);
    FAIL() << "expected VerificationFailed";
  } catch (const VerificationFailed& e) {
    EXPECT_NE(std::string(e.what()).find("A1 B1 C1"), std::string::npos) << e.what();
  }
}

TEST(Builtins, ResolveByName) {
  EXPECT_EQ(builtin_scenario("singlet")->name(), "singlet");
  EXPECT_EQ(builtin_scenario("hardy")->name(), "hardy");
  EXPECT_EQ(builtin_scenario("ghsz")->name(), "ghsz");
  EXPECT_FALSE(builtin_scenario("nope").has_value());
}

TEST(Scenario, RejectsInconsistentDefinitions) {
  const VariableSet vars({"A", "B"}, Domain::ZeroOne);
  MomentConstraints m(vars);
  EXPECT_THROW(Scenario("x", vars, {{"A", "C"}}, MomentSource{m}), UnknownVariable);
  EXPECT_THROW(Scenario("x", vars, {{}}, MomentSource{m}), Error);
  EXPECT_THROW(Scenario("x", VariableSet({"A"}, Domain::ZeroOne), {{"A"}}, MomentSource{m}), Error);

  const PureState psi(StateVector::Unit(2, 0));
  const YesNoObservable z(pauli(Axis::Z), Convention::Sign), x(pauli(Axis::X), Convention::Sign);
  EXPECT_THROW(Scenario("q", VariableSet({"Z", "X"}, Domain::PlusMinus), {{"Z", "X"}}, QuantumSource{psi, {z, x}}),
               NonCommutingContext);
  EXPECT_THROW(Scenario("q", VariableSet({"Z"}, Domain::ZeroOne), {{"Z"}}, QuantumSource{psi, {z}}), DomainMismatch);
  EXPECT_NO_THROW(Scenario("q", VariableSet({"Z", "X"}, Domain::PlusMinus), {{"Z"}, {"X"}}, QuantumSource{psi, {z, x}}));
}

TEST(Scenario, MomentSourceRestriction) {
  const VariableSet vars({"A", "B", "C"}, Domain::ZeroOne);
  MomentConstraints m(vars);
  m.set({"A"}, 0.5).set({"B"}, 0.5).set({"A", "B"}, 0.2).set({"C"}, 0.1);
  const Scenario s("m", vars, {{"A", "B"}, {"C"}}, MomentSource{m});
  const auto sub = s.measurable_moments({"A", "B"});
  EXPECT_EQ(sub.size(), 3u);
  EXPECT_DOUBLE_EQ(sub.at({"A", "B"}), 0.2);
}

}  // namespace
}  // namespace bellext
