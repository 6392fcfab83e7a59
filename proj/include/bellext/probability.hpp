#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bellext/core.hpp"

namespace bellext {

// Value convention of a binary variable: {0,1} or {-1,+1}.
enum class Domain { ZeroOne, PlusMinus };

inline std::string_view to_string(Domain d) { return d == Domain::ZeroOne ? "01" : "pm"; }

inline Domain parse_domain(std::string_view s) {
  if (s == "01") return Domain::ZeroOne;
  if (s == "pm") return Domain::PlusMinus;
  throw Error("unknown domain '" + std::string(s) + "' (expected \"01\" or \"pm\")");
}

// Value taken by a variable whose atom bit is `bit`.
inline int domain_value(Domain d, bool bit) {
  if (d == Domain::ZeroOne) return bit ? 1 : 0;
  return bit ? 1 : -1;
}

inline bool domain_bit(Domain d, int value) {
  if (value == 1) return true;
  if ((d == Domain::ZeroOne && value == 0) || (d == Domain::PlusMinus && value == -1)) return false;
  throw Error("value " + std::to_string(value) + " is not in domain " + std::string(to_string(d)));
}

// A monomial is a set of variable names; the empty monomial is the constant 1.
using Monomial = std::vector<std::string>;

// Subset of a VariableSet as a bit mask, using the same bit layout as atoms.
using Mask = std::uint64_t;

inline std::string join_names(const Monomial& names, std::string_view sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += sep;
    out += names[i];
  }
  return out;
}

inline Monomial split_names(std::string_view csv) {
  Monomial out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    auto token = csv.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) out.emplace_back(token);
    start = end + 1;
  }
  return out;
}

/// Ordered list of distinct binary variables sharing one value convention.
///
/// The order fixes atom indexing: the first variable is the most significant
/// bit of an atom index, and a set bit means the value 1 (or +1).
class VariableSet {
 public:
  static constexpr std::size_t kMaxVariables = 24;

  VariableSet() = default;

  VariableSet(std::vector<std::string> names, Domain domain) : names_(std::move(names)), domain_(domain) {
    if (names_.size() > kMaxVariables) throw Error("too many variables: " + std::to_string(names_.size()));
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw Error("empty variable name");
      for (std::size_t j = 0; j < i; ++j)
        if (names_[i] == names_[j]) throw Error("duplicate variable '" + names_[i] + "'");
    }
  }

  std::size_t size() const noexcept { return names_.size(); }
  std::size_t atom_count() const noexcept { return std::size_t{1} << names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  Domain domain() const noexcept { return domain_; }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return std::nullopt;
  }

  bool contains(std::string_view name) const { return find(name).has_value(); }

  std::size_t index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw UnknownVariable(std::string(name));
  }

  Mask bit(std::size_t var_index) const noexcept { return Mask{1} << (names_.size() - 1 - var_index); }

  Mask mask_of(const Monomial& monomial) const {
    Mask m = 0;
    for (const auto& name : monomial) m |= bit(index_of(name));
    return m;
  }

  Mask full_mask() const noexcept { return atom_count() - 1; }

  // Names in canonical order.
  Monomial monomial_of(Mask mask) const {
    Monomial out;
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (mask & bit(i)) out.push_back(names_[i]);
    return out;
  }

  int value(std::size_t atom, std::size_t var_index) const noexcept {
    return domain_value(domain_, (atom & bit(var_index)) != 0);
  }

  VariableSet with_domain(Domain d) const {
    VariableSet out = *this;
    out.domain_ = d;
    return out;
  }

  // Canonical-order subset selected by `mask`.
  VariableSet subset(Mask mask) const { return VariableSet(monomial_of(mask), domain_); }

  friend bool operator==(const VariableSet&, const VariableSet&) = default;

 private:
  std::vector<std::string> names_;
  Domain domain_ = Domain::ZeroOne;
};

// Values of every variable at the given atom, in VariableSet order.
inline std::vector<int> atom_values(const VariableSet& vars, std::size_t atom) {
  std::vector<int> out(vars.size());
  for (std::size_t i = 0; i < vars.size(); ++i) out[i] = vars.value(atom, i);
  return out;
}

inline std::size_t atom_index(const VariableSet& vars, std::span<const int> values) {
  if (values.size() != vars.size()) throw Error("atom has wrong number of values");
  std::size_t atom = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (domain_bit(vars.domain(), values[i])) atom |= vars.bit(i);
  return atom;
}

inline std::string describe_atom(const VariableSet& vars, std::size_t atom) {
  std::ostringstream os;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) os << ' ';
    os << vars.names()[i] << '=' << vars.value(atom, i);
  }
  return os.str();
}

// Product of the monomial's variables at `atom`.
inline double monomial_value(Domain domain, std::size_t atom, Mask mask) {
  if (domain == Domain::ZeroOne) return (atom & mask) == mask ? 1.0 : 0.0;
  return (std::popcount(mask & ~static_cast<Mask>(atom)) & 1) ? -1.0 : 1.0;
}

/// Probability table over the 2^n atoms of a VariableSet.
class Distribution {
 public:
  Distribution(VariableSet vars, std::vector<double> weights, double tol = kTolerance)
      : vars_(std::move(vars)), weights_(std::move(weights)) {
    if (weights_.size() != vars_.atom_count())
      throw InvalidDistribution("expected " + std::to_string(vars_.atom_count()) + " weights, got " +
                                std::to_string(weights_.size()));
    double total = 0.0;
    for (std::size_t a = 0; a < weights_.size(); ++a) {
      const double w = weights_[a];
      if (!std::isfinite(w)) throw InvalidDistribution("non-finite weight at atom " + std::to_string(a));
      if (w < -tol)
        throw InvalidDistribution("negative weight " + std::to_string(w) + " at atom " + describe_atom(vars_, a));
      total += w;
    }
    if (std::abs(total - 1.0) > tol) throw InvalidDistribution("weights sum to " + std::to_string(total));
  }

  static Distribution uniform(VariableSet vars) {
    const std::size_t n = vars.atom_count();
    return Distribution(std::move(vars), std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }

  static Distribution point_mass(VariableSet vars, std::size_t atom) {
    std::vector<double> w(vars.atom_count(), 0.0);
    w.at(atom) = 1.0;
    return Distribution(std::move(vars), std::move(w));
  }

  const VariableSet& vars() const noexcept { return vars_; }
  Domain domain() const noexcept { return vars_.domain(); }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::size_t atom) const { return weights_.at(atom); }

  double weight(std::span<const int> values) const { return weights_[atom_index(vars_, values)]; }

 private:
  VariableSet vars_;
  std::vector<double> weights_;
};

inline double moment(const Distribution& d, Mask mask) {
  double sum = 0.0;
  const auto w = d.weights();
  for (std::size_t a = 0; a < w.size(); ++a) sum += w[a] * monomial_value(d.domain(), a, mask);
  return sum;
}

/// Expectation of the product of the named variables; 1 for the empty monomial.
inline double moment(const Distribution& d, const Monomial& monomial) {
  if (monomial.empty()) return 1.0;
  return moment(d, d.vars().mask_of(monomial));
}

inline Distribution marginalize_mask(const Distribution& d, Mask keep) {
  const auto& vars = d.vars();
  const VariableSet out_vars = vars.subset(keep);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (keep & vars.bit(i)) kept.push_back(i);

  std::vector<double> w(out_vars.atom_count(), 0.0);
  const auto in = d.weights();
  for (std::size_t a = 0; a < in.size(); ++a) {
    std::size_t b = 0;
    for (std::size_t k = 0; k < kept.size(); ++k)
      if (a & vars.bit(kept[k])) b |= out_vars.bit(k);
    w[b] += in[a];
  }
  return Distribution(out_vars, std::move(w));
}

/// Marginal on `keep`; the result lists the kept variables in d's order.
inline Distribution marginalize(const Distribution& d, const Monomial& keep) {
  return marginalize_mask(d, d.vars().mask_of(keep));
}

/// Same measure with the variables listed in `order` (a permutation of d's variables).
inline Distribution reorder(const Distribution& d, const Monomial& order) {
  const auto& vars = d.vars();
  if (order.size() != vars.size()) throw Error("reorder: expected a permutation of the variables");
  VariableSet out_vars(order, vars.domain());
  std::vector<std::size_t> src(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) src[k] = vars.index_of(order[k]);

  std::vector<double> w(vars.atom_count(), 0.0);
  const auto in = d.weights();
  for (std::size_t a = 0; a < in.size(); ++a) {
    std::size_t b = 0;
    for (std::size_t k = 0; k < src.size(); ++k)
      if (a & vars.bit(src[k])) b |= out_vars.bit(k);
    w[b] = in[a];
  }
  return Distribution(std::move(out_vars), std::move(w));
}

/// Relabel values between {0,1} and {-1,+1}; weights are unchanged.
inline Distribution convert_domain(const Distribution& d, Domain target) {
  if (d.domain() == target) return d;
  return Distribution(d.vars().with_domain(target), std::vector<double>(d.weights().begin(), d.weights().end()));
}

using Assignment = std::vector<std::pair<std::string, int>>;

/// Distribution of the remaining variables given `fixed`.
///
/// Conditioning on an event of probability <= tol yields the uniform
/// distribution over the remaining variables.
inline Distribution condition(const Distribution& d, const Assignment& fixed, double tol = kTolerance) {
  const auto& vars = d.vars();
  Mask fixed_mask = 0;
  std::size_t fixed_bits = 0;
  for (const auto& [name, value] : fixed) {
    const Mask b = vars.bit(vars.index_of(name));
    const bool bit = domain_bit(vars.domain(), value);
    if ((fixed_mask & b) && (((fixed_bits & b) != 0) != bit)) throw Error("contradictory assignment for '" + name + "'");
    fixed_mask |= b;
    if (bit) fixed_bits |= b;
  }
  const Mask rest = vars.full_mask() & ~fixed_mask;
  const VariableSet out_vars = vars.subset(rest);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (rest & vars.bit(i)) kept.push_back(i);

  std::vector<double> w(out_vars.atom_count(), 0.0);
  double mass = 0.0;
  const auto in = d.weights();
  for (std::size_t a = 0; a < in.size(); ++a) {
    if ((a & fixed_mask) != fixed_bits) continue;
    std::size_t b = 0;
    for (std::size_t k = 0; k < kept.size(); ++k)
      if (a & vars.bit(kept[k])) b |= out_vars.bit(k);
    w[b] += in[a];
    mass += in[a];
  }
  if (mass <= tol) return Distribution::uniform(out_vars);
  for (auto& x : w) x /= mass;
  return Distribution(out_vars, std::move(w));
}

/// Partial assignment of expectation values to monomials over a VariableSet.
class MomentConstraints {
 public:
  MomentConstraints() = default;
  explicit MomentConstraints(VariableSet vars) : vars_(std::move(vars)) {}

  const VariableSet& vars() const noexcept { return vars_; }
  Domain domain() const noexcept { return vars_.domain(); }
  const std::map<Mask, double>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  MomentConstraints& set(Mask mask, double value, double tol = kTolerance) {
    if (mask & ~vars_.full_mask()) throw Error("monomial mask outside variable set");
    if (!std::isfinite(value)) throw InvalidMoments("non-finite moment value");
    const double lo = vars_.domain() == Domain::ZeroOne ? 0.0 : -1.0;
    if (mask == 0 && std::abs(value - 1.0) > tol) throw InvalidMoments("the empty monomial must have moment 1");
    if (value < lo - tol || value > 1.0 + tol)
      throw InvalidMoments("moment of {" + join_names(vars_.monomial_of(mask)) + "} = " + std::to_string(value) +
                           " is out of range");
    entries_[mask] = value;
    return *this;
  }

  MomentConstraints& set(const Monomial& monomial, double value, double tol = kTolerance) {
    return set(vars_.mask_of(monomial), value, tol);
  }

  std::optional<double> get(Mask mask) const {
    if (mask == 0) return 1.0;
    auto it = entries_.find(mask);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<double> get(const Monomial& monomial) const { return get(vars_.mask_of(monomial)); }

  // Value that must be present; throws IncompleteMoments otherwise.
  double at(const Monomial& monomial) const {
    if (auto v = get(monomial)) return *v;
    throw IncompleteMoments("missing moment for {" + join_names(monomial) + "}");
  }

  bool contains(const Monomial& monomial) const { return get(monomial).has_value(); }

 private:
  VariableSet vars_;
  std::map<Mask, double> entries_;
};

/// Every non-empty monomial's moment under d.
inline MomentConstraints full_moments(const Distribution& d) {
  MomentConstraints m(d.vars());
  // weights may dip to -tol per atom, so moments can overshoot by that much per atom
  const double slack = kTolerance * static_cast<double>(d.vars().atom_count());
  for (Mask s = 1; s <= d.vars().full_mask(); ++s) m.set(s, moment(d, s), slack);
  return m;
}

/// Unique measure with the given complete set of moments.
///
/// {0,1} data is inverted by inclusion-exclusion over supersets,
/// {-1,+1} data by a Walsh-Hadamard transform.
inline Distribution moments_to_distribution(const MomentConstraints& m, double tol = kTolerance) {
  const auto& vars = m.vars();
  const std::size_t n_atoms = vars.atom_count();
  std::vector<double> f(n_atoms);
  f[0] = 1.0;
  for (Mask s = 1; s < n_atoms; ++s) {
    auto v = m.get(s);
    if (!v) throw IncompleteMoments("missing moment for {" + join_names(vars.monomial_of(s)) + "}");
    f[s] = *v;
  }

  for (std::size_t i = 0; i < vars.size(); ++i) {
    const Mask b = vars.bit(i);
    for (std::size_t s = 0; s < n_atoms; ++s) {
      if (s & b) continue;
      if (vars.domain() == Domain::ZeroOne) {
        f[s] -= f[s | b];
      } else {
        const double lo = f[s], hi = f[s | b];
        f[s] = lo - hi;
        f[s | b] = lo + hi;
      }
    }
  }
  if (vars.domain() == Domain::PlusMinus)
    for (auto& x : f) x /= static_cast<double>(n_atoms);

  for (std::size_t a = 0; a < n_atoms; ++a)
    if (f[a] < -tol)
      throw NotRealizable("moments give weight " + std::to_string(f[a]) + " to atom " + describe_atom(vars, a));
  return Distribution(vars, std::move(f), tol);
}

inline double max_abs_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("size mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace bellext
