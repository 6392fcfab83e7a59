#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "bellext/core.hpp"
#include "bellext/probability.hpp"

namespace bellext {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

enum class Axis { X, Y, Z };

inline ComplexMatrix identity(Eigen::Index dim) { return ComplexMatrix::Identity(dim, dim); }

inline ComplexMatrix pauli(Axis axis) {
  ComplexMatrix m(2, 2);
  const Complex i{0.0, 1.0};
  switch (axis) {
    case Axis::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case Axis::Y: m << 0.0, -i, i, 0.0; break;
    case Axis::Z: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return m;
}

/// Kronecker product a ⊗ b.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

inline ComplexMatrix tensor(std::initializer_list<ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = tensor(out, f);
  return out;
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
  StateVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

inline double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const ComplexMatrix& m, double tol = kTolerance) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

// Spin-1/2 eigenvector along the direction at `theta` from ẑ in the xz-plane.
inline StateVector spin_state(double theta, bool up) {
  StateVector v(2);
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  if (up)
    v << c, s;
  else
    v << -s, c;
  return v;
}

// Projector onto spin-up along the unit direction n: (1 + n·σ)/2.
inline ComplexMatrix spin_up_projector(double nx, double ny, double nz) {
  return (identity(2) + nx * pauli(Axis::X) + ny * pauli(Axis::Y) + nz * pauli(Axis::Z)) / 2.0;
}

/// Unit-norm state vector.
class PureState {
 public:
  explicit PureState(StateVector amplitudes, double tol = kTolerance) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) throw DimensionMismatch("empty state vector");
    if (!amplitudes_.allFinite()) throw Error("state has non-finite amplitudes");
    const double norm = amplitudes_.norm();
    if (std::abs(norm - 1.0) > tol) throw Error("state is not normalized (norm " + std::to_string(norm) + ")");
  }

  static PureState normalized(const StateVector& v, double tol = kTolerance) {
    const double norm = v.norm();
    if (!(norm > tol)) throw DegenerateParameters("state vector vanishes");
    return PureState(v / norm);
  }

  Eigen::Index dim() const noexcept { return amplitudes_.size(); }
  const StateVector& amplitudes() const noexcept { return amplitudes_; }

 private:
  StateVector amplitudes_;
};

/// <ψ|M|ψ> for Hermitian M.
inline double expectation(const PureState& s, const ComplexMatrix& m, double tol = kTolerance) {
  if (m.rows() != s.dim() || m.cols() != s.dim())
    throw DimensionMismatch("operator is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                            ", state has dimension " + std::to_string(s.dim()));
  if (!is_hermitian(m, tol)) throw NonHermitian("expectation of a non-Hermitian operator");
  const Complex v = s.amplitudes().dot(m * s.amplitudes());  // dot conjugates the left argument
  return v.real();
}

enum class Convention { Projector, Sign };

/// Two-outcome observable: a projector (eigenvalues 0,1) or a sign operator (eigenvalues ±1).
class YesNoObservable {
 public:
  YesNoObservable(ComplexMatrix matrix, Convention convention, double tol = kTolerance)
      : matrix_(std::move(matrix)), convention_(convention) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) throw DimensionMismatch("observable must be square");
    if (!is_hermitian(matrix_, tol)) throw NonHermitian("observable is not Hermitian");
    const ComplexMatrix sq = matrix_ * matrix_;
    const ComplexMatrix expect = convention_ == Convention::Projector ? matrix_ : identity(matrix_.rows());
    if (max_abs(sq - expect) > tol)
      throw InvalidObservable(convention_ == Convention::Projector ? "projector is not idempotent"
                                                                    : "sign observable does not square to identity");
  }

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  Convention convention() const noexcept { return convention_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  // Spectral projector for the outcome 1 (or +1).
  ComplexMatrix projector() const {
    if (convention_ == Convention::Projector) return matrix_;
    return (identity(dim()) + matrix_) / 2.0;
  }

 private:
  ComplexMatrix matrix_;
  Convention convention_ = Convention::Projector;
};

inline Domain domain_of(Convention c) { return c == Convention::Projector ? Domain::ZeroOne : Domain::PlusMinus; }

/// Named, pairwise-commuting observables of one convention on a common space.
class Context {
 public:
  Context(std::vector<std::string> names, std::vector<YesNoObservable> observables, double tol = kTolerance)
      : observables_(std::move(observables)) {
    if (names.size() != observables_.size()) throw Error("context: names and observables differ in count");
    if (observables_.empty()) throw Error("context: no observables");
    const auto convention = observables_.front().convention();
    const auto dim = observables_.front().dim();
    for (const auto& o : observables_) {
      if (o.dim() != dim) throw DimensionMismatch("context observables act on different spaces");
      if (o.convention() != convention) throw Error("context mixes projector and sign observables");
    }
    for (std::size_t i = 0; i < observables_.size(); ++i)
      for (std::size_t j = i + 1; j < observables_.size(); ++j) {
        const auto& a = observables_[i].matrix();
        const auto& b = observables_[j].matrix();
        if (max_abs(a * b - b * a) > tol)
          throw NonCommutingContext("'" + names[i] + "' and '" + names[j] + "' do not commute");
      }
    vars_ = VariableSet(std::move(names), domain_of(convention));
  }

  const VariableSet& vars() const noexcept { return vars_; }
  const std::vector<YesNoObservable>& observables() const noexcept { return observables_; }
  Convention convention() const noexcept { return observables_.front().convention(); }
  Eigen::Index dim() const noexcept { return observables_.front().dim(); }

  // Operator product of the observables selected by `mask` (atom bit layout).
  ComplexMatrix product(Mask mask) const {
    ComplexMatrix out = identity(dim());
    for (std::size_t i = 0; i < observables_.size(); ++i)
      if (mask & vars_.bit(i)) out = out * observables_[i].matrix();
    return out;
  }

 private:
  VariableSet vars_;
  std::vector<YesNoObservable> observables_;
};

/// Born-rule joint outcome distribution of a commuting context.
///
/// Weight of an atom is ‖∏ P_i^{x_i} ψ‖² with P¹ = P and P⁰ = I − P. Output
/// variables carry the context's convention ({0,1} or ±1).
inline Distribution joint_distribution(const PureState& s, const Context& c, double tol = kTolerance) {
  if (c.dim() != s.dim()) throw DimensionMismatch("context and state dimensions differ");
  const auto& vars = c.vars();
  std::vector<ComplexMatrix> up, down;
  for (const auto& o : c.observables()) {
    up.push_back(o.projector());
    down.push_back(identity(c.dim()) - up.back());
  }
  std::vector<double> w(vars.atom_count());
  for (std::size_t a = 0; a < w.size(); ++a) {
    StateVector v = s.amplitudes();
    for (std::size_t i = 0; i < vars.size(); ++i) v = ((a & vars.bit(i)) ? up[i] : down[i]) * v;
    w[a] = v.squaredNorm();
  }
  return Distribution(vars, std::move(w), tol);
}

}  // namespace bellext
