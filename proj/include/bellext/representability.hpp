#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bellext/core.hpp"
#include "bellext/probability.hpp"
#include "bellext/simplex.hpp"
#include "bellext/tree_extension.hpp"

namespace bellext {

enum class EmptyReason { None, Bounds, Infeasible };

inline std::string_view to_string(EmptyReason r) {
  switch (r) {
    case EmptyReason::None: return "none";
    case EmptyReason::Bounds: return "bounds";
    case EmptyReason::Infeasible: return "infeasible";
  }
  return "none";
}

/// Closed range [lo, hi] of one correlation; possibly empty.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = false;
  EmptyReason reason = EmptyReason::None;

  // lo > hi + tol is empty; a crossing within tol collapses to its midpoint.
  static Interval closed(double lo, double hi, double tol = kTolerance) {
    if (lo > hi + tol) return {lo, hi, true, EmptyReason::Bounds};
    if (lo > hi) lo = hi = (lo + hi) / 2.0;
    return {lo, hi, false, EmptyReason::None};
  }

  static Interval infeasible() {
    return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN(), true,
            EmptyReason::Infeasible};
  }

  double width() const { return empty ? 0.0 : hi - lo; }
  double midpoint() const { return (lo + hi) / 2.0; }
  bool contains(double x, double tol = kTolerance) const { return !empty && x >= lo - tol && x <= hi + tol; }
};

inline Interval intersect(const Interval& a, const Interval& b, double tol = kTolerance) {
  if (a.empty) return a;
  if (b.empty) return b;
  return Interval::closed(std::max(a.lo, b.lo), std::min(a.hi, b.hi), tol);
}

// ---------------------------------------------------------------------------
// Three variables A1, A2, B in {0,1}: closed-form range of <A1 A2>
// ---------------------------------------------------------------------------

/// Measurable data for {A1, A2, B}: singles and the two correlations with B.
struct TripleMoments {
  double a1 = 0.0, a2 = 0.0, b = 0.0;
  double a1b = 0.0, a2b = 0.0;
};

namespace detail {

inline void check_probability(double v, const char* what, double tol) {
  if (!(v >= -tol && v <= 1.0 + tol)) throw InvalidMoments(std::string(what) + " = " + std::to_string(v) + " is not in [0,1]");
}

// A joint {0,1} pair with these singles and product moment exists.
inline void check_pair(double x, double y, double xy, const char* what, double tol) {
  check_probability(xy, what, tol);
  if (xy > std::min(x, y) + tol || xy < x + y - 1.0 - tol)
    throw InvalidMoments(std::string(what) + " = " + std::to_string(xy) + " is not a valid pair correlation");
}

}  // namespace detail

inline void validate(const TripleMoments& t, double tol = kTolerance) {
  detail::check_probability(t.a1, "<A1>", tol);
  detail::check_probability(t.a2, "<A2>", tol);
  detail::check_probability(t.b, "<B>", tol);
  detail::check_pair(t.a1, t.b, t.a1b, "<A1 B>", tol);
  detail::check_pair(t.a2, t.b, t.a2b, "<A2 B>", tol);
}

inline TripleMoments triple_from(const MomentConstraints& m, const std::string& a1, const std::string& a2,
                                 const std::string& b) {
  if (m.domain() != Domain::ZeroOne) throw DomainMismatch("closed-form interval needs {0,1} moments");
  return {m.at({a1}), m.at({a2}), m.at({b}), m.at({a1, b}), m.at({a2, b})};
}

/// Exact range of <A1 A2> over all {0,1} models of {A1, A2, B} with the given data.
///
/// Lower bounds:  0,  <A1B>+<A2B>-<B>,  <A1>+<A2>+<B>-<A1B>-<A2B>-1,  <A1>+<A2>-1
/// Upper bounds:  <A1>,  <A2>,  <A2>-<A2B>+<A1B>,  <A1>-<A1B>+<A2B>
/// The last lower bound is the middle one with B replaced by 1; the last two
/// upper bounds are the first two with A1 and A2 swapped.
inline Interval bell_wigner_interval(const TripleMoments& t, double tol = kTolerance) {
  validate(t, tol);
  const double lo = std::max({0.0, t.a1b + t.a2b - t.b, t.a1 + t.a2 + t.b - t.a1b - t.a2b - 1.0, t.a1 + t.a2 - 1.0});
  const double hi = std::min({t.a1, t.a2, t.a2 - t.a2b + t.a1b, t.a1 - t.a1b + t.a2b});
  return Interval::closed(lo, hi, tol);
}

inline Interval bell_wigner_interval(const MomentConstraints& m, const std::string& a1, const std::string& a2,
                                     const std::string& b, double tol = kTolerance) {
  return bell_wigner_interval(triple_from(m, a1, a2, b), tol);
}

// Variables taken in order (A1, A2, B).
inline Interval bell_wigner_interval(const MomentConstraints& m, double tol = kTolerance) {
  const auto& names = m.vars().names();
  if (names.size() != 3) throw InvalidMoments("expected moments over exactly three variables");
  return bell_wigner_interval(m, names[0], names[1], names[2], tol);
}

// Feasible range of <A1 A2 B> once <A1 A2> = x is fixed.
inline Interval triple_correlation_range(const TripleMoments& t, double x, double tol = kTolerance) {
  const double lo = std::max({0.0, x + t.a1b - t.a1, x + t.a2b - t.a2, t.a1b + t.a2b - t.b});
  const double hi = std::min({x, t.a1b, t.a2b, 1.0 - t.a1 - t.a2 - t.b + x + t.a1b + t.a2b});
  return Interval::closed(lo, hi, tol);
}

// ---------------------------------------------------------------------------
// Linear programming over the atom simplex
// ---------------------------------------------------------------------------

inline constexpr std::size_t kMaxLpVariables = 12;

namespace detail {

inline Simplex moment_system(const MomentConstraints& m, double tol) {
  const auto& vars = m.vars();
  if (vars.size() > kMaxLpVariables)
    throw Error("LP over " + std::to_string(vars.size()) + " variables exceeds the limit of " +
                std::to_string(kMaxLpVariables));
  const auto atoms = static_cast<Eigen::Index>(vars.atom_count());
  const auto rows = static_cast<Eigen::Index>(m.size()) + 1;
  Eigen::MatrixXd a(rows, atoms);
  Eigen::VectorXd b(rows);
  a.row(0).setOnes();
  b(0) = 1.0;
  Eigen::Index r = 1;
  for (const auto& [mask, value] : m.entries()) {
    for (Eigen::Index x = 0; x < atoms; ++x) a(r, x) = monomial_value(vars.domain(), static_cast<std::size_t>(x), mask);
    b(r) = value;
    ++r;
  }
  Simplex::Options opt;
  opt.feasibility_tol = tol;
  return Simplex(std::move(a), std::move(b), opt);
}

inline Eigen::VectorXd monomial_column(const VariableSet& vars, Mask mask) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(vars.atom_count()));
  for (Eigen::Index x = 0; x < c.size(); ++x) c(x) = monomial_value(vars.domain(), static_cast<std::size_t>(x), mask);
  return c;
}

}  // namespace detail

/// Exact range of E[target] over all distributions on m's variables whose
/// moments equal every entry of m. Infeasible data yields an empty interval
/// tagged EmptyReason::Infeasible.
inline Interval lp_interval(const Monomial& target, const MomentConstraints& m, double tol = kTolerance) {
  const Mask mask = m.vars().mask_of(target);
  const Simplex lp = detail::moment_system(m, tol);
  const Eigen::VectorXd c = detail::monomial_column(m.vars(), mask);
  const LpResult lo = lp.minimize(c);
  if (lo.status != LpStatus::Optimal) return Interval::infeasible();
  const LpResult hi = lp.maximize(c);
  if (hi.status != LpStatus::Optimal) return Interval::infeasible();
  return Interval::closed(lo.objective, hi.objective, tol);
}

inline bool lp_feasible(const MomentConstraints& m, double tol = kTolerance) {
  return detail::moment_system(m, tol).feasible();
}

/// Some distribution matching every entry of m, if one exists.
inline std::optional<Distribution> lp_witness(const MomentConstraints& m, double tol = kTolerance) {
  const Simplex lp = detail::moment_system(m, tol);
  const LpResult r = lp.minimize(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.vars().atom_count())));
  if (r.status != LpStatus::Optimal) return std::nullopt;
  std::vector<double> w(r.x.data(), r.x.data() + r.x.size());
  for (auto& x : w) x = std::max(x, 0.0);
  return Distribution(m.vars(), std::move(w), tol * static_cast<double>(w.size()));
}

// ---------------------------------------------------------------------------
// Four observables A1, A2 (one side) and B1, B2 (other side)
// ---------------------------------------------------------------------------

/// Singles and the four cross correlations <A_i B_j>, {0,1} convention.
struct BchScenario {
  std::array<std::string, 2> a_names{"A1", "A2"};
  std::array<std::string, 2> b_names{"B1", "B2"};
  std::array<double, 2> a{};
  std::array<double, 2> b{};
  std::array<std::array<double, 2>, 2> ab{};  // ab[i][j] = <A_i B_j>

  void validate(double tol = kTolerance) const {
    for (int i = 0; i < 2; ++i) {
      detail::check_probability(a[i], "<A>", tol);
      detail::check_probability(b[i], "<B>", tol);
    }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const std::string what = "<" + a_names[i] + " " + b_names[j] + ">";
        detail::check_pair(a[i], b[j], ab[i][j], what.c_str(), tol);
      }
  }

  TripleMoments with_b(int j) const { return {a[0], a[1], b[j], ab[0][j], ab[1][j]}; }

  VariableSet vars() const { return VariableSet({a_names[0], a_names[1], b_names[0], b_names[1]}, Domain::ZeroOne); }

  MomentConstraints to_moments(double tol = kTolerance) const {
    MomentConstraints m(vars());
    for (int i = 0; i < 2; ++i) {
      m.set({a_names[i]}, a[i], tol);
      m.set({b_names[i]}, b[i], tol);
    }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m.set({a_names[i], b_names[j]}, ab[i][j], tol);
    return m;
  }

  static BchScenario from_moments(const MomentConstraints& m, std::array<std::string, 2> a_names,
                                  std::array<std::string, 2> b_names, double tol = kTolerance) {
    if (m.domain() != Domain::ZeroOne) throw DomainMismatch("BCH scenario needs {0,1} moments");
    BchScenario s;
    s.a_names = std::move(a_names);
    s.b_names = std::move(b_names);
    for (int i = 0; i < 2; ++i) {
      s.a[i] = m.at({s.a_names[i]});
      s.b[i] = m.at({s.b_names[i]});
    }
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) s.ab[i][j] = m.at({s.a_names[i], s.b_names[j]});
    s.validate(tol);
    return s;
  }
};

/// Clauser-Horne expressions and the residuals of the eight inequalities
/// -1 <= CH <= 0. A residual <= 0 means the inequality holds.
struct FineResiduals {
  // ch[2*i + j]: the minus sign sits on <A_{1-i} B_{1-j}>
  std::array<double, 4> ch{};
  // residuals[2k] = ch[k], residuals[2k+1] = -1 - ch[k]
  std::array<double, 8> residuals{};

  bool satisfied(double tol = kTolerance) const {
    return std::all_of(residuals.begin(), residuals.end(), [tol](double r) { return r <= tol; });
  }
  double worst() const { return *std::max_element(residuals.begin(), residuals.end()); }
};

inline FineResiduals fine_inequalities(const BchScenario& s) {
  FineResiduals out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const int l = 1 - i, k = 1 - j;
      const double ch = s.ab[i][j] + s.ab[i][k] + s.ab[l][j] - s.ab[l][k] - s.a[i] - s.b[j];
      const int idx = 2 * i + j;
      out.ch[idx] = ch;
      out.residuals[2 * idx] = ch;
      out.residuals[2 * idx + 1] = -1.0 - ch;
    }
  return out;
}

struct RepresentabilityReport {
  Interval interval_b1;
  Interval interval_b2;
  Interval intersection;
  FineResiduals fine;
  bool representable = false;
  std::optional<Distribution> witness;  // over A1, A2, B1, B2 when representable
};

/// Model of {A1, A2, B_j} with <A1 A2> = x, choosing <A1 A2 B_j> mid-range.
inline Distribution triple_model(const BchScenario& s, int j, double x, double tol = kTolerance) {
  const TripleMoments t = s.with_b(j);
  const Interval t_range = triple_correlation_range(t, x, tol);
  if (t_range.empty) throw NotRealizable("no three-variable model with <A1 A2> = " + std::to_string(x));
  MomentConstraints m(VariableSet({s.a_names[0], s.a_names[1], s.b_names[j]}, Domain::ZeroOne));
  m.set({s.a_names[0]}, t.a1, tol)
      .set({s.a_names[1]}, t.a2, tol)
      .set({s.b_names[j]}, t.b, tol)
      .set({s.a_names[0], s.a_names[1]}, x, tol)
      .set({s.a_names[0], s.b_names[j]}, t.a1b, tol)
      .set({s.a_names[1], s.b_names[j]}, t.a2b, tol)
      .set({s.a_names[0], s.a_names[1], s.b_names[j]}, t_range.midpoint(), tol);
  return moments_to_distribution(m, tol);
}

/// Representable iff the <A1 A2> ranges allowed with B1 and with B2 meet.
/// A representable scenario gets a witness: the two three-variable models at
/// the intersection midpoint, glued along the {A1, A2} block.
inline RepresentabilityReport bch_check(const BchScenario& s, double tol = kTolerance) {
  s.validate(tol);
  RepresentabilityReport r;
  r.interval_b1 = bell_wigner_interval(s.with_b(0), tol);
  r.interval_b2 = bell_wigner_interval(s.with_b(1), tol);
  r.intersection = intersect(r.interval_b1, r.interval_b2, tol);
  r.fine = fine_inequalities(s);
  r.representable = !r.intersection.empty;
  if (r.representable) {
    const double x = r.intersection.midpoint();
    CompatibilityGraph g({{s.a_names[0], s.a_names[1]}, {s.b_names[0]}, {s.b_names[1]}},
                         {{0, 1, triple_model(s, 0, x, tol)}, {0, 2, triple_model(s, 1, x, tol)}});
    r.witness = reorder(extend_tree(g, tol).joint, s.vars().names());
  }
  return r;
}

/// Direct check: does one distribution on all four variables reproduce the data?
inline bool bch_lp_feasible(const BchScenario& s, double tol = kTolerance) { return lp_feasible(s.to_moments(tol), tol); }

}  // namespace bellext
