#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bellext/core.hpp"
#include "bellext/probability.hpp"
#include "bellext/quantum.hpp"
#include "bellext/representability.hpp"

namespace bellext {

struct QuantumSource {
  PureState state;
  std::vector<YesNoObservable> observables;  // one per scenario variable, same order
};

struct MomentSource {
  MomentConstraints moments;
};

/// Named set of variables, the contexts in which they are jointly measured,
/// and where the context statistics come from.
class Scenario {
 public:
  using Source = std::variant<QuantumSource, MomentSource>;

  Scenario(std::string name, VariableSet variables, std::vector<Monomial> contexts, Source source,
           double tol = kTolerance)
      : name_(std::move(name)), vars_(std::move(variables)), contexts_(std::move(contexts)), source_(std::move(source)) {
    for (const auto& ctx : contexts_) {
      if (ctx.empty()) throw Error("scenario '" + name_ + "': empty context");
      vars_.mask_of(ctx);
    }
    if (const auto* q = std::get_if<QuantumSource>(&source_)) {
      if (q->observables.size() != vars_.size())
        throw Error("scenario '" + name_ + "': expected one observable per variable");
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (q->observables[i].dim() != q->state.dim())
          throw DimensionMismatch("observable '" + vars_.names()[i] + "' does not act on the state space");
        if (domain_of(q->observables[i].convention()) != vars_.domain())
          throw DomainMismatch("observable '" + vars_.names()[i] + "' convention differs from scenario domain");
      }
      for (std::size_t k = 0; k < contexts_.size(); ++k) context(k, tol);
    } else {
      const auto& m = std::get<MomentSource>(source_).moments;
      if (m.vars() != vars_) throw Error("scenario '" + name_ + "': moment variables differ from scenario variables");
    }
  }

  const std::string& name() const noexcept { return name_; }
  const VariableSet& vars() const noexcept { return vars_; }
  Domain domain() const noexcept { return vars_.domain(); }
  const std::vector<Monomial>& contexts() const noexcept { return contexts_; }
  const Source& source() const noexcept { return source_; }
  bool is_quantum() const noexcept { return std::holds_alternative<QuantumSource>(source_); }

  Context context(std::size_t k, double tol = kTolerance) const {
    const auto& q = std::get<QuantumSource>(source_);
    std::vector<YesNoObservable> obs;
    for (const auto& name : contexts_.at(k)) obs.push_back(q.observables[vars_.index_of(name)]);
    return Context(contexts_.at(k), std::move(obs), tol);
  }

  // Born-rule distribution of context k (quantum scenarios only).
  Distribution context_distribution(std::size_t k, double tol = kTolerance) const {
    return joint_distribution(std::get<QuantumSource>(source_).state, context(k, tol), tol);
  }

  /// Every measurable moment whose variables lie in `over`: monomials
  /// contained in some context. Quantum values come from the first context
  /// holding the monomial.
  MomentConstraints measurable_moments(const Monomial& over, double tol = kTolerance) const {
    const Mask over_mask = vars_.mask_of(over);
    const VariableSet out_vars = vars_.subset(over_mask);
    MomentConstraints out(out_vars);
    auto to_out = [&](Mask m) { return out_vars.mask_of(vars_.monomial_of(m)); };

    if (const auto* q = std::get_if<QuantumSource>(&source_)) {
      for (std::size_t k = 0; k < contexts_.size(); ++k) {
        const Mask ctx = vars_.mask_of(contexts_[k]) & over_mask;
        if (!ctx) continue;
        const Distribution d = joint_distribution(q->state, context(k, tol), tol);
        for (Mask s = ctx; s; s = (s - 1) & ctx) {
          const Mask key = to_out(s);
          if (out.get(key)) continue;
          out.set(key, moment(d, vars_.monomial_of(s)), tol);
        }
      }
    } else {
      for (const auto& [mask, value] : std::get<MomentSource>(source_).moments.entries())
        if ((mask & ~over_mask) == 0) out.set(to_out(mask), value, tol);
    }
    return out;
  }

  MomentConstraints measurable_moments(double tol = kTolerance) const {
    return measurable_moments(vars_.names(), tol);
  }

 private:
  std::string name_;
  VariableSet vars_;
  std::vector<Monomial> contexts_;
  Source source_;
};

// ---------------------------------------------------------------------------
// Two spin-1/2 particles in the singlet state
// ---------------------------------------------------------------------------

/// Singlet (|+-> - |-+>)/√2 with spin projectors
///   A1 = (1+σx)/2, A2 = (1+σz)/2 on the first particle,
///   B1 = 1/2 - (τx+τz)/(2√2), B2 = 1/2 - (τx-τz)/(2√2) on the second,
/// measured in the four contexts {A_i, B_j}.
inline Scenario build_singlet_scenario() {
  StateVector psi = StateVector::Zero(4);
  psi(1) = 1.0 / std::numbers::sqrt2;   // |+->
  psi(2) = -1.0 / std::numbers::sqrt2;  // |-+>
  const ComplexMatrix i2 = identity(2);
  const ComplexMatrix sx = pauli(Axis::X), sz = pauli(Axis::Z);
  const double k = 2.0 * std::numbers::sqrt2;

  std::vector<YesNoObservable> obs{
      {tensor((i2 + sx) / 2.0, i2), Convention::Projector},
      {tensor((i2 + sz) / 2.0, i2), Convention::Projector},
      {tensor(i2, i2 / 2.0 - (sx + sz) / k), Convention::Projector},
      {tensor(i2, i2 / 2.0 - (sx - sz) / k), Convention::Projector},
  };
  return Scenario("singlet", VariableSet({"A1", "A2", "B1", "B2"}, Domain::ZeroOne),
                  {{"A1", "B1"}, {"A1", "B2"}, {"A2", "B1"}, {"A2", "B2"}},
                  QuantumSource{PureState(psi), std::move(obs)});
}

// ---------------------------------------------------------------------------
// Hardy's two-particle state
// ---------------------------------------------------------------------------

/// Spin directions in the xz-plane, as angles from ẑ, for the left (L1, L2)
/// and right (R1, R2) measurements.
struct HardyAngles {
  double l1 = 0.0;
  double l2 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

// sin²(θ/2) = (√5 - 1)/2 maximizes P(R1 = +, L1 = -) when L1 = R1 = ẑ and L2, R2 sit at θ.
inline const double kHardyOptimalAngle = 2.0 * std::asin(std::sqrt((std::sqrt(5.0) - 1.0) / 2.0));

inline HardyAngles default_hardy_angles() { return {0.0, kHardyOptimalAngle, 0.0, kHardyOptimalAngle}; }

/// Residuals of the Hardy conditions on {0,1} data (A_i: "R_i = +1", B_i: "L_i = +1").
struct HardyConditions {
  double no_a2_no_b1 = 0.0;   // 1 - <A2> - <B1> + <A2 B1>
  double a2_not_b2 = 0.0;     // <A2> - <A2 B2>
  double a1_and_b2 = 0.0;     // <A1 B2>
  double a1_not_b1 = 0.0;     // <A1> - <A1 B1>, must be strictly positive

  static HardyConditions from(const MomentConstraints& m) {
    return {1.0 - m.at({"A2"}) - m.at({"B1"}) + m.at({"A2", "B1"}), m.at({"A2"}) - m.at({"A2", "B2"}),
            m.at({"A1", "B2"}), m.at({"A1"}) - m.at({"A1", "B1"})};
  }
  double max_zero_residual() const {
    return std::max({std::abs(no_a2_no_b1), std::abs(a2_not_b2), std::abs(a1_and_b2)});
  }
};

/// Hardy state |L1+,R1-> - |L2-,R2+><L2-,R2+|L1+,R1->, normalized, with
/// A_i the projector on R_i = +1 (right particle) and B_i on L_i = +1 (left).
/// Throws DegenerateParameters if the state vanishes or the conditions fail.
inline Scenario build_hardy_scenario(const HardyAngles& angles = default_hardy_angles(), double tol = kTolerance) {
  const StateVector first = tensor(spin_state(angles.l1, true), spin_state(angles.r1, false));
  const StateVector second = tensor(spin_state(angles.l2, false), spin_state(angles.r2, true));
  const StateVector psi = first - second * second.dot(first);
  const PureState state = PureState::normalized(psi, tol);

  auto up = [](double theta) { return spin_up_projector(std::sin(theta), 0.0, std::cos(theta)); };
  const ComplexMatrix i2 = identity(2);
  std::vector<YesNoObservable> obs{
      {tensor(i2, up(angles.r1)), Convention::Projector},
      {tensor(i2, up(angles.r2)), Convention::Projector},
      {tensor(up(angles.l1), i2), Convention::Projector},
      {tensor(up(angles.l2), i2), Convention::Projector},
  };
  Scenario s("hardy", VariableSet({"A1", "A2", "B1", "B2"}, Domain::ZeroOne),
             {{"A1", "B1"}, {"A1", "B2"}, {"A2", "B1"}, {"A2", "B2"}}, QuantumSource{state, std::move(obs)}, tol);

  const HardyConditions c = HardyConditions::from(s.measurable_moments(tol));
  if (c.max_zero_residual() > tol) throw DegenerateParameters("Hardy zero conditions fail");
  if (c.a1_not_b1 <= tol) throw DegenerateParameters("Hardy condition <A1> - <A1 B1> > 0 fails");
  return s;
}

// ---------------------------------------------------------------------------
// Three spin-1/2 particles in the GHSZ state
// ---------------------------------------------------------------------------

/// (|+++> - |--->)/√2 with sign observables A1 = -σx, A2 = -σy on particle 1,
/// B1 = σy, B2 = σx on particle 2, C1 = σy, C2 = σx on particle 3, measured
/// in the eight contexts {A_i, B_j, C_k}.
inline Scenario build_ghsz_scenario() {
  StateVector psi = StateVector::Zero(8);
  psi(0) = 1.0 / std::numbers::sqrt2;
  psi(7) = -1.0 / std::numbers::sqrt2;
  const ComplexMatrix i2 = identity(2);
  const ComplexMatrix sx = pauli(Axis::X), sy = pauli(Axis::Y);
  std::vector<YesNoObservable> obs{
      {tensor({-sx, i2, i2}), Convention::Sign}, {tensor({-sy, i2, i2}), Convention::Sign},
      {tensor({i2, sy, i2}), Convention::Sign},  {tensor({i2, sx, i2}), Convention::Sign},
      {tensor({i2, i2, sy}), Convention::Sign},  {tensor({i2, i2, sx}), Convention::Sign},
  };
  std::vector<Monomial> contexts;
  for (const char* a : {"A1", "A2"})
    for (const char* b : {"B1", "B2"})
      for (const char* c : {"C1", "C2"}) contexts.push_back({a, b, c});
  return Scenario("ghsz", VariableSet({"A1", "A2", "B1", "B2", "C1", "C2"}, Domain::PlusMinus), std::move(contexts),
                  QuantumSource{PureState(psi), std::move(obs)});
}

/// The explicit ±1 classical models: A1, A2, C_k independent and fair, and
///   model 1: B_i = -A_i C1            over {A1, A2, B1, B2, C1}
///   model 2: B1 = -A2 C2, B2 = A1 C2  over {A1, A2, B1, B2, C2}
inline Distribution build_ghsz_model(int which) {
  if (which != 1 && which != 2) throw Error("GHSZ model must be 1 or 2");
  const std::string c = which == 1 ? "C1" : "C2";
  VariableSet vars({"A1", "A2", "B1", "B2", c}, Domain::PlusMinus);
  std::vector<double> w(vars.atom_count(), 0.0);
  for (int a1 : {-1, 1})
    for (int a2 : {-1, 1})
      for (int ck : {-1, 1}) {
        const int b1 = which == 1 ? -a1 * ck : -a2 * ck;
        const int b2 = which == 1 ? -a2 * ck : a1 * ck;
        const int values[] = {a1, a2, b1, b2, ck};
        w[atom_index(vars, values)] = 1.0 / 8.0;
      }
  return Distribution(std::move(vars), std::move(w));
}

// Sign assignments (a1, a2, b1, b2, c1, c2) with a1b1c1 = -1, a2b2c1 = -1, a2b1c2 = -1, a1b2c2 = +1.
inline std::size_t count_parity_solutions() {
  std::size_t solutions = 0;
  for (unsigned bits = 0; bits < 64; ++bits) {
    auto v = [bits](int k) { return (bits >> k) & 1u ? 1 : -1; };
    const int a1 = v(0), a2 = v(1), b1 = v(2), b2 = v(3), c1 = v(4), c2 = v(5);
    if (a1 * b1 * c1 == -1 && a2 * b2 * c1 == -1 && a2 * b1 * c2 == -1 && a1 * b2 * c2 == 1) ++solutions;
  }
  return solutions;
}

struct GhszAnalysis {
  Distribution model1;
  Distribution model2;
  bool shared_moments_agree = false;
  std::pair<double, double> four_correlation{0.0, 0.0};  // <A1 A2 B1 B2> under model 1, model 2
  std::size_t parity_solutions = 0;
  bool parity_obstruction = false;
  // Range of <A1 A2 B1 B2> allowed by the two perfect correlations of each C_k alone.
  Interval forced_range1;
  Interval forced_range2;
  // Every context was matched atomwise (otherwise only moment by moment).
  bool atomwise = true;
};

namespace detail {

// Model marginal vs quantum statistics on one context; throws naming the first bad moment.
inline bool verify_context(const Distribution& model, const Distribution& quantum, double tol) {
  const auto& names = quantum.vars().names();
  const Distribution marginal = reorder(marginalize(model, names), names);
  if (max_abs_difference(marginal.weights(), quantum.weights()) <= tol) return true;
  for (Mask s = 1; s <= quantum.vars().full_mask(); ++s) {
    const double mv = moment(marginal, s), qv = moment(quantum, s);
    if (std::abs(mv - qv) > tol)
      throw VerificationFailed("moment <" + join_names(quantum.vars().monomial_of(s), " ") + "> is " +
                               std::to_string(mv) + " in the model, " + std::to_string(qv) + " in QM");
  }
  return false;
}

}  // namespace detail

/// Checks both classical models against every quantum context containing
/// their C, compares their A/B correlations, and runs the sign-parity search.
inline GhszAnalysis analyze_ghsz(double tol = kTolerance) {
  const Scenario s = build_ghsz_scenario();
  GhszAnalysis out{build_ghsz_model(1), build_ghsz_model(2), false, {0.0, 0.0}, 0, false, {}, {}, true};

  for (std::size_t k = 0; k < s.contexts().size(); ++k) {
    const auto& ctx = s.contexts()[k];
    const Distribution q = s.context_distribution(k, tol);
    for (int which : {1, 2}) {
      const std::string c = which == 1 ? "C1" : "C2";
      if (std::find(ctx.begin(), ctx.end(), c) == ctx.end()) continue;
      out.atomwise &= detail::verify_context(which == 1 ? out.model1 : out.model2, q, tol);
    }
  }

  const Monomial ab{"A1", "A2", "B1", "B2"};
  const Distribution m1 = marginalize(out.model1, ab);
  const Distribution m2 = marginalize(out.model2, ab);
  const Mask four = m1.vars().full_mask();
  out.shared_moments_agree = true;
  for (Mask mask = 1; mask < four; ++mask)
    if (std::abs(moment(m1, mask) - moment(m2, mask)) > tol) out.shared_moments_agree = false;
  out.four_correlation = {moment(m1, four), moment(m2, four)};

  out.parity_solutions = count_parity_solutions();
  out.parity_obstruction = out.parity_solutions == 0;

  // Only the two perfect correlations involving C_k constrain the model.
  auto forced = [&](const std::string& c, const Monomial& t1, const Monomial& t2) {
    const MomentConstraints qm = s.measurable_moments({"A1", "A2", "B1", "B2", c}, tol);
    MomentConstraints m(qm.vars());
    m.set(t1, qm.at(t1), tol).set(t2, qm.at(t2), tol);
    return lp_interval(ab, m, tol);
  };
  out.forced_range1 = forced("C1", {"A1", "B1", "C1"}, {"A2", "B2", "C1"});
  out.forced_range2 = forced("C2", {"A2", "B1", "C2"}, {"A1", "B2", "C2"});
  return out;
}

inline std::optional<Scenario> builtin_scenario(std::string_view name) {
  if (name == "singlet") return build_singlet_scenario();
  if (name == "hardy") return build_hardy_scenario();
  if (name == "ghsz") return build_ghsz_scenario();
  return std::nullopt;
}

}  // namespace bellext
