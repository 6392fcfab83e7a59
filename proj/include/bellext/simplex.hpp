#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <vector>

#include "bellext/core.hpp"

namespace bellext {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd x;
  // Sum of artificial variables at the end of phase one.
  double infeasibility = 0.0;
};

/// Dense two-phase tableau simplex for
///
///   minimize cᵀx  subject to  A x = b,  x ≥ 0
///
/// Bland's rule picks both entering and leaving variables, so the method
/// terminates on degenerate problems. Intended for the small (≤ a few
/// thousand columns) equality systems that moment constraints produce.
class Simplex {
 public:
  struct Options {
    double pivot_eps = 1e-12;
    double feasibility_tol = kTolerance;
    std::size_t max_iterations = 200000;
  };

  Simplex(Eigen::MatrixXd a, Eigen::VectorXd b) : Simplex(std::move(a), std::move(b), Options{}) {}
  Simplex(Eigen::MatrixXd a, Eigen::VectorXd b, Options opt) : a_(std::move(a)), b_(std::move(b)), opt_(opt) {
    if (a_.rows() != b_.size()) throw DimensionMismatch("simplex: A and b row counts differ");
  }

  LpResult minimize(const Eigen::VectorXd& c) const {
    if (c.size() != a_.cols()) throw DimensionMismatch("simplex: cost vector has wrong length");
    Tableau t = phase_one();
    LpResult result;
    result.infeasibility = t.phase_one_value;
    if (t.phase_one_value > opt_.feasibility_tol) return result;

    const Eigen::Index n = a_.cols();
    const Eigen::Index rhs = t.m.cols() - 1;
    const Eigen::Index rows = t.m.rows() - 1;

    // phase two: reduced costs for c over original columns only
    t.m.row(rows).setZero();
    t.m.row(rows).head(n) = c.transpose();
    for (Eigen::Index i = 0; i < rows; ++i) {
      const auto j = t.basis[i];
      if (j < n && c(j) != 0.0) t.m.row(rows) -= c(j) * t.m.row(i);
    }
    if (!iterate(t, n)) {
      result.status = LpStatus::Unbounded;
      return result;
    }

    result.status = LpStatus::Optimal;
    result.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < rows; ++i)
      if (t.basis[i] < n) result.x(t.basis[i]) = t.m(i, rhs);
    result.objective = c.dot(result.x);
    return result;
  }

  LpResult maximize(const Eigen::VectorXd& c) const {
    LpResult r = minimize(-c);
    if (r.status == LpStatus::Optimal) r.objective = -r.objective;
    return r;
  }

  bool feasible() const { return phase_one().phase_one_value <= opt_.feasibility_tol; }

 private:
  struct Tableau {
    Eigen::MatrixXd m;                // constraint rows then the cost row; last column is the rhs
    std::vector<Eigen::Index> basis;  // basic column per constraint row
    double phase_one_value = 0.0;
  };

  void pivot(Tableau& t, Eigen::Index row, Eigen::Index col) const {
    t.m.row(row) /= t.m(row, col);
    for (Eigen::Index i = 0; i < t.m.rows(); ++i) {
      if (i == row) continue;
      const double f = t.m(i, col);
      if (f != 0.0) t.m.row(i) -= f * t.m.row(row);
    }
    t.basis[row] = col;
  }

  // Runs Bland-rule pivots over columns [0, allowed). Returns false if unbounded.
  bool iterate(Tableau& t, Eigen::Index allowed) const {
    const Eigen::Index rows = t.m.rows() - 1;
    const Eigen::Index rhs = t.m.cols() - 1;
    for (std::size_t iter = 0; iter < opt_.max_iterations; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < allowed; ++j)
        if (t.m(rows, j) < -opt_.pivot_eps) {
          enter = j;
          break;
        }
      if (enter < 0) return true;

      Eigen::Index leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < rows; ++i) {
        const double coef = t.m(i, enter);
        if (coef <= opt_.pivot_eps) continue;
        const double ratio = t.m(i, rhs) / coef;
        if (ratio < best - opt_.pivot_eps ||
            (std::abs(ratio - best) <= opt_.pivot_eps && t.basis[i] < t.basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(t, leave, enter);
    }
    throw Error("simplex: iteration limit reached");
  }

  Tableau phase_one() const {
    const Eigen::Index m = a_.rows();
    const Eigen::Index n = a_.cols();
    Tableau t;
    t.m = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    t.basis.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double sign = b_(i) < 0.0 ? -1.0 : 1.0;
      t.m.row(i).head(n) = sign * a_.row(i);
      t.m(i, n + i) = 1.0;
      t.m(i, n + m) = sign * b_(i);
      t.basis[i] = n + i;
      t.m.row(m) -= t.m.row(i);
    }
    t.m.row(m).segment(n, m).setZero();
    iterate(t, n + m);  // phase one is bounded below by zero
    t.phase_one_value = -t.m(m, n + m);

    if (t.phase_one_value > opt_.feasibility_tol) return t;

    // Drive artificial variables out of the basis; rows where that is impossible are redundant.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (t.basis[i] >= n) {
        Eigen::Index col = -1;
        for (Eigen::Index j = 0; j < n; ++j)
          if (std::abs(t.m(i, j)) > 1e3 * opt_.pivot_eps) {
            col = j;
            break;
          }
        if (col >= 0) pivot(t, i, col);
      }
      if (t.basis[i] < n) keep.push_back(i);
    }
    Tableau reduced;
    reduced.phase_one_value = t.phase_one_value;
    reduced.m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(keep.size()) + 1, n + 1);
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const auto i = keep[k];
      reduced.m.row(static_cast<Eigen::Index>(k)).head(n) = t.m.row(i).head(n);
      reduced.m(static_cast<Eigen::Index>(k), n) = t.m(i, n + m);
      reduced.basis.push_back(t.basis[i]);
    }
    return reduced;
  }

  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Options opt_;
};

}  // namespace bellext
