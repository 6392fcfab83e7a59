#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "bellext/core.hpp"
#include "bellext/probability.hpp"

namespace bellext {

/// Two distributions disagree on their common variables.
class MarginalMismatch : public Error {
 public:
  MarginalMismatch(std::string atom, double discrepancy, std::optional<std::size_t> edge = std::nullopt)
      : Error(make_message(atom, discrepancy, edge)), atom_(std::move(atom)), discrepancy_(discrepancy), edge_(edge) {}

  const std::string& atom() const noexcept { return atom_; }
  double discrepancy() const noexcept { return discrepancy_; }
  std::optional<std::size_t> edge() const noexcept { return edge_; }

  MarginalMismatch at_edge(std::size_t edge) const { return MarginalMismatch(atom_, discrepancy_, edge); }

 private:
  static std::string make_message(const std::string& atom, double d, std::optional<std::size_t> edge) {
    std::string msg = "marginal mismatch";
    if (edge) msg += " on edge " + std::to_string(*edge);
    return msg + " at overlap atom [" + atom + "]: discrepancy " + std::to_string(d);
  }

  std::string atom_;
  double discrepancy_;
  std::optional<std::size_t> edge_;
};

/// Joins p (over S1) and q (over S2) into a measure on S1 ∪ S2 in which
/// S1∖S2 and S2∖S1 are conditionally independent given S1 ∩ S2:
///   r(x) = p(x_S1) · q(x_{S2∖S1} | x_{S1∩S2}).
/// Result variables are p's followed by q's new ones.
inline Distribution glue(const Distribution& p, const Distribution& q, double tol = kTolerance) {
  if (p.domain() != q.domain()) throw DomainMismatch("glue: distributions use different value conventions");
  const auto& pv = p.vars();
  const auto& qv = q.vars();

  Monomial overlap, fresh;
  for (const auto& name : qv.names()) (pv.contains(name) ? overlap : fresh).push_back(name);

  // q's marginal on the overlap, indexed by q-overlap bits in q's variable order
  const Mask q_overlap_mask = qv.mask_of(overlap);
  const Distribution q_overlap = marginalize_mask(q, q_overlap_mask);
  const Distribution p_overlap = reorder(marginalize(p, overlap), q_overlap.vars().names());
  for (std::size_t a = 0; a < q_overlap.vars().atom_count(); ++a) {
    const double diff = std::abs(p_overlap.weight(a) - q_overlap.weight(a));
    if (diff > tol) throw MarginalMismatch(describe_atom(q_overlap.vars(), a), diff);
  }

  Monomial out_names = pv.names();
  out_names.insert(out_names.end(), fresh.begin(), fresh.end());
  const VariableSet out_vars(out_names, pv.domain());

  // For each q variable: its position in the output and, if shared, in the overlap marginal.
  struct QBit {
    Mask out_bit;
    Mask q_bit;
    std::optional<Mask> overlap_bit;
  };
  std::vector<QBit> qbits;
  for (std::size_t k = 0; k < qv.size(); ++k) {
    const auto& name = qv.names()[k];
    std::optional<Mask> ob;
    if (auto i = q_overlap.vars().find(name)) ob = q_overlap.vars().bit(*i);
    qbits.push_back({out_vars.bit(out_vars.index_of(name)), qv.bit(k), ob});
  }

  const std::size_t shift = fresh.size();
  const double fallback = 1.0 / static_cast<double>(std::size_t{1} << fresh.size());
  std::vector<double> w(out_vars.atom_count());
  for (std::size_t a = 0; a < w.size(); ++a) {
    const std::size_t p_atom = a >> shift;
    std::size_t q_atom = 0, ov_atom = 0;
    for (const auto& b : qbits) {
      if (!(a & b.out_bit)) continue;
      q_atom |= b.q_bit;
      if (b.overlap_bit) ov_atom |= *b.overlap_bit;
    }
    // no overlap: plain product, without dividing by a total that is only 1 up to rounding
    const double denom = overlap.empty() ? 1.0 : q_overlap.weight(ov_atom);
    const double cond = denom > tol ? q.weight(q_atom) / denom : fallback;
    w[a] = p.weight(p_atom) * cond;
  }
  return Distribution(out_vars, std::move(w), tol * static_cast<double>(out_vars.atom_count()));
}

struct GraphEdge {
  std::size_t a;
  std::size_t b;
  Distribution dist;
};

/// Variable blocks as nodes, supplied joint distributions as edges.
///
/// Blocks are pairwise disjoint; each edge carries a distribution over
/// exactly the union of its two endpoint blocks.
class CompatibilityGraph {
 public:
  CompatibilityGraph(std::vector<Monomial> blocks, std::vector<GraphEdge> edges)
      : blocks_(std::move(blocks)), edges_(std::move(edges)) {
    std::vector<std::string> seen;
    for (const auto& block : blocks_) {
      if (block.empty()) throw InvalidGraph("empty node block");
      for (const auto& name : block) {
        if (std::find(seen.begin(), seen.end(), name) != seen.end())
          throw InvalidGraph("variable '" + name + "' appears in more than one block");
        seen.push_back(name);
      }
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& edge = edges_[e];
      if (edge.a >= blocks_.size() || edge.b >= blocks_.size())
        throw InvalidGraph("edge " + std::to_string(e) + " references a missing node");
      if (edge.a == edge.b) throw InvalidGraph("edge " + std::to_string(e) + " is a self-loop");
      if (edge.dist.domain() != edges_.front().dist.domain())
        throw DomainMismatch("edges use different value conventions");
      Monomial expected = blocks_[edge.a];
      expected.insert(expected.end(), blocks_[edge.b].begin(), blocks_[edge.b].end());
      Monomial actual = edge.dist.vars().names();
      std::sort(expected.begin(), expected.end());
      std::sort(actual.begin(), actual.end());
      if (expected != actual)
        throw InvalidGraph("edge " + std::to_string(e) + " distribution is over {" + join_names(actual) +
                           "}, expected {" + join_names(expected) + "}");
    }
  }

  const std::vector<Monomial>& blocks() const noexcept { return blocks_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return blocks_.size(); }
  std::string label(std::size_t node) const { return join_names(blocks_.at(node)); }

  // Incident edge indices per node, in edge order.
  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(blocks_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      adj[edges_[e].a].push_back(e);
      adj[edges_[e].b].push_back(e);
    }
    return adj;
  }

 private:
  std::vector<Monomial> blocks_;
  std::vector<GraphEdge> edges_;
};

/// Connected with exactly |nodes| - 1 edges.
inline bool is_tree(const CompatibilityGraph& g) {
  const std::size_t n = g.node_count();
  if (n == 0 || g.edges().size() != n - 1) return false;
  const auto adj = g.adjacency();
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto e : adj[u]) {
      const auto& edge = g.edges()[e];
      const auto v = edge.a == u ? edge.b : edge.a;
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

struct GlueResult {
  Distribution joint;
  std::vector<std::size_t> glue_order;  // edge indices
};

inline std::size_t default_root(const CompatibilityGraph& g) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.node_count(); ++i)
    if (g.label(i) < g.label(best)) best = i;
  return best;
}

/// One joint distribution reproducing every edge distribution of a tree.
///
/// Edges are glued in BFS order from `root` (default: the node with the
/// lexicographically least label). A lone node with no edges carries no
/// data and extends to the uniform distribution on its block.
inline GlueResult extend_tree(const CompatibilityGraph& g, double tol = kTolerance,
                              std::optional<std::size_t> root = std::nullopt) {
  if (!is_tree(g)) throw NotATree("compatibility graph is not a tree");
  const std::size_t start = root.value_or(default_root(g));
  if (start >= g.node_count()) throw InvalidGraph("root node out of range");
  if (g.edges().empty()) return {Distribution::uniform(VariableSet(g.blocks()[start], Domain::ZeroOne)), {}};

  const auto adj = g.adjacency();
  std::vector<bool> visited(g.node_count(), false);
  std::vector<std::size_t> order;
  std::queue<std::size_t> frontier;
  frontier.push(start);
  visited[start] = true;
  while (!frontier.empty()) {
    const auto u = frontier.front();
    frontier.pop();
    for (auto e : adj[u]) {
      const auto& edge = g.edges()[e];
      const auto v = edge.a == u ? edge.b : edge.a;
      if (visited[v]) continue;
      visited[v] = true;
      order.push_back(e);
      frontier.push(v);
    }
  }

  std::optional<Distribution> joint;
  for (auto e : order) {
    const auto& dist = g.edges()[e].dist;
    if (!joint) {
      joint = dist;
      continue;
    }
    try {
      joint = glue(*joint, dist, tol);
    } catch (const MarginalMismatch& mm) {
      throw mm.at_edge(e);
    }
  }
  return {std::move(*joint), std::move(order)};
}

}  // namespace bellext
