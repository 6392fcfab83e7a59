#pragma once

// Random generators for property checks. All take an explicit engine so
// runs are reproducible from a seed.

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "bellext/probability.hpp"
#include "bellext/quantum.hpp"
#include "bellext/representability.hpp"
#include "bellext/tree_extension.hpp"

namespace bellext {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

using Rng = std::mt19937_64;

// Weights from a flat Dirichlet, with a few atoms zeroed now and then so
// conditioning on null events gets exercised.
inline Distribution random_distribution(Rng& rng, const VariableSet& vars) {
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution sparse(0.15);
  std::vector<double> w(vars.atom_count());
  double total = 0.0;
  for (auto& x : w) {
    x = sparse(rng) ? 0.0 : expo(rng);
    total += x;
  }
  if (total == 0.0) {
    w[0] = 1.0;
    total = 1.0;
  }
  for (auto& x : w) x /= total;
  return Distribution(vars, std::move(w));
}

inline std::vector<std::string> variable_names(std::size_t n, const std::string& prefix = "X") {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

// Pair correlation uniform over the range that admits a joint distribution.
inline double random_pair_correlation(Rng& rng, double x, double y) {
  std::uniform_real_distribution<double> u(std::max(0.0, x + y - 1.0), std::min(x, y));
  return u(rng);
}

inline TripleMoments random_triple(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TripleMoments t;
  t.a1 = u(rng);
  t.a2 = u(rng);
  t.b = u(rng);
  t.a1b = random_pair_correlation(rng, t.a1, t.b);
  t.a2b = random_pair_correlation(rng, t.a2, t.b);
  return t;
}

inline BchScenario random_bch_scenario(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BchScenario s;
  for (int i = 0; i < 2; ++i) {
    s.a[i] = u(rng);
    s.b[i] = u(rng);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.ab[i][j] = random_pair_correlation(rng, s.a[i], s.b[j]);
  return s;
}

inline StateVector random_state(Rng& rng, Eigen::Index dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  StateVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
  return v / v.norm();
}

inline ComplexMatrix random_spin_projector(Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  double x = g(rng), y = g(rng), z = g(rng);
  const double r = std::sqrt(x * x + y * y + z * z);
  return spin_up_projector(x / r, y / r, z / r);
}

/// Four-observable data from a random two-qubit pure state and random spin
/// projectors (A_i on the first qubit, B_j on the second).
inline BchScenario random_quantum_bch_scenario(Rng& rng) {
  const PureState psi(random_state(rng, 4));
  const ComplexMatrix i2 = identity(2);
  const ComplexMatrix a[2] = {tensor(random_spin_projector(rng), i2), tensor(random_spin_projector(rng), i2)};
  const ComplexMatrix b[2] = {tensor(i2, random_spin_projector(rng)), tensor(i2, random_spin_projector(rng))};
  BchScenario s;
  for (int i = 0; i < 2; ++i) {
    s.a[i] = expectation(psi, a[i]);
    s.b[i] = expectation(psi, b[i]);
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s.ab[i][j] = expectation(psi, a[i] * b[j]);
  return s;
}

/// Random tree over disjoint blocks of `total_vars` variables.
///
/// Each edge distribution is its parent block's marginal times a fresh random
/// conditional for the child block, so neighbouring edges agree on shared
/// blocks while the edges need not come from any common joint.
inline CompatibilityGraph random_tree_graph(Rng& rng, std::size_t total_vars, Domain domain = Domain::ZeroOne) {
  const auto names = variable_names(total_vars, "V");

  // split the variables into 2..total_vars contiguous blocks
  std::uniform_int_distribution<std::size_t> nblocks_dist(2, total_vars);
  const std::size_t nblocks = nblocks_dist(rng);
  std::vector<std::size_t> cuts;
  for (std::size_t i = 1; i < total_vars; ++i) cuts.push_back(i);
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(nblocks - 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(total_vars);
  std::vector<Monomial> blocks;
  std::size_t start = 0;
  for (auto end : cuts) {
    blocks.emplace_back(names.begin() + static_cast<std::ptrdiff_t>(start),
                        names.begin() + static_cast<std::ptrdiff_t>(end));
    start = end;
  }
  std::shuffle(blocks.begin(), blocks.end(), rng);

  std::vector<std::optional<Distribution>> block_marginal(blocks.size());
  block_marginal[0] = random_distribution(rng, VariableSet(blocks[0], domain));

  // node k attaches to a uniformly chosen earlier node
  std::vector<GraphEdge> edges;
  for (std::size_t k = 1; k < blocks.size(); ++k) {
    const std::size_t p = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    const Distribution& parent = *block_marginal[p];
    const VariableSet child_vars(blocks[k], domain);
    Monomial both = blocks[p];
    both.insert(both.end(), blocks[k].begin(), blocks[k].end());
    const VariableSet edge_vars(both, domain);

    std::vector<double> w(edge_vars.atom_count());
    const std::size_t child_atoms = child_vars.atom_count();
    for (std::size_t x = 0; x < parent.vars().atom_count(); ++x) {
      const Distribution cond = random_distribution(rng, child_vars);
      for (std::size_t y = 0; y < child_atoms; ++y) w[x * child_atoms + y] = parent.weight(x) * cond.weight(y);
    }
    Distribution dist(edge_vars, std::move(w));
    block_marginal[k] = marginalize(dist, blocks[k]);
    if (std::bernoulli_distribution(0.5)(rng))
      edges.push_back({p, k, std::move(dist)});
    else
      edges.push_back({k, p, std::move(dist)});
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  return CompatibilityGraph(std::move(blocks), std::move(edges));
}

}  // namespace bellext
