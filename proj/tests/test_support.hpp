#pragma once

// Shared helpers and independent oracles for the unit suites.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <vector>

#include "bellext/probability.hpp"
#include "bellext/sampling.hpp"

namespace bellext::test {

// Seed for randomized tests; set from --seed by the test main.
std::uint64_t& seed();

inline Rng make_rng(std::uint64_t salt = 0) { return Rng(seed() ^ (salt * 0x9E3779B97F4A7C15ull)); }

// Inverts the full moment system by a dense linear solve: rows are monomials
// (empty one first), columns are atoms. Independent of the fast transforms.
inline std::vector<double> solve_moment_system(const VariableSet& vars, const std::vector<double>& moments_by_mask) {
  const auto n = static_cast<Eigen::Index>(vars.atom_count());
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index x = 0; x < n; ++x) {
      double prod = 1.0;
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (static_cast<Mask>(s) & vars.bit(i)) prod *= vars.value(static_cast<std::size_t>(x), i);
      m(s, x) = prod;
    }
    rhs(s) = moments_by_mask[static_cast<std::size_t>(s)];
  }
  Eigen::VectorXd w = m.fullPivLu().solve(rhs);
  return {w.data(), w.data() + w.size()};
}

// Moment by direct enumeration of atom values.
inline double brute_moment(const Distribution& d, const Monomial& names) {
  double total = 0.0;
  for (std::size_t a = 0; a < d.vars().atom_count(); ++a) {
    const auto values = atom_values(d.vars(), a);
    double prod = 1.0;
    for (const auto& n : names) prod *= values[d.vars().index_of(n)];
    total += d.weight(a) * prod;
  }
  return total;
}

}  // namespace bellext::test
