#pragma once

// JSON encodings of distributions, graphs, quantum data and scenarios.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "bellext/core.hpp"
#include "bellext/probability.hpp"
#include "bellext/quantum.hpp"
#include "bellext/representability.hpp"
#include "bellext/scenarios.hpp"
#include "bellext/tree_extension.hpp"

namespace bellext {

using Json = nlohmann::json;

/// Input document does not match the expected layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline const Json& require(const Json& j, const char* key) {
  if (!j.is_object()) throw SchemaError(std::string("expected an object holding '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

inline std::vector<std::string> string_list(const Json& j, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string(what) + " must be an array of names");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw SchemaError(std::string(what) + " must contain strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

inline double number(const Json& j, const char* what) {
  if (!j.is_number()) throw SchemaError(std::string(what) + " must be a number");
  return j.get<double>();
}

inline Complex complex_pair(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw SchemaError("complex values are [re, im] pairs");
  return {number(j[0], "re"), number(j[1], "im")};
}

inline bool is_index(const Json& j) { return j.is_number_integer() && j.get<std::int64_t>() >= 0; }

inline Json pair_of(Complex c) { return Json::array({c.real(), c.imag()}); }

inline Domain domain_field(const Json& j) {
  const auto& d = require(j, "domain");
  if (!d.is_string()) throw SchemaError("domain must be \"01\" or \"pm\"");
  try {
    return parse_domain(d.get<std::string>());
  } catch (const Error& e) {
    throw SchemaError(e.what());
  }
}

}  // namespace detail

// {"vars": [names], "domain": "01"|"pm", "weights": [2^n floats in atom order]}
inline Json to_json(const Distribution& d) {
  return Json{{"vars", d.vars().names()},
              {"domain", std::string(to_string(d.domain()))},
              {"weights", std::vector<double>(d.weights().begin(), d.weights().end())}};
}

inline Distribution distribution_from_json(const Json& j, double tol = kTolerance) {
  const auto names = detail::string_list(detail::require(j, "vars"), "vars");
  const auto& jw = detail::require(j, "weights");
  if (!jw.is_array()) throw SchemaError("weights must be an array");
  std::vector<double> w;
  for (const auto& x : jw) w.push_back(detail::number(x, "weight"));
  return Distribution(VariableSet(names, detail::domain_field(j)), std::move(w), tol);
}

// Matrices: {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order.
inline Json to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(detail::pair_of(m(r, c)));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  const auto& jr = detail::require(j, "rows");
  const auto& jc = detail::require(j, "cols");
  if (!detail::is_index(jr) || !detail::is_index(jc)) throw SchemaError("rows/cols must be non-negative integers");
  const auto rows = jr.get<Eigen::Index>(), cols = jc.get<Eigen::Index>();
  const auto& data = detail::require(j, "data");
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw SchemaError("matrix data must hold rows*cols [re, im] pairs");
  ComplexMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = detail::complex_pair(data[static_cast<std::size_t>(r * cols + c)]);
  return m;
}

// States: [[re, im], ...]
inline Json to_json(const PureState& s) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < s.dim(); ++i) out.push_back(detail::pair_of(s.amplitudes()(i)));
  return out;
}

inline PureState state_from_json(const Json& j, double tol = kTolerance) {
  if (!j.is_array()) throw SchemaError("state must be an array of [re, im] pairs");
  StateVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = detail::complex_pair(j[i]);
  return PureState(v, tol);
}

inline Json to_json(const YesNoObservable& o) {
  return Json{{"convention", o.convention() == Convention::Projector ? "projector" : "sign"},
              {"matrix", to_json(o.matrix())}};
}

inline YesNoObservable observable_from_json(const Json& j, double tol = kTolerance) {
  const auto& conv = detail::require(j, "convention");
  Convention c;
  if (conv == "projector")
    c = Convention::Projector;
  else if (conv == "sign")
    c = Convention::Sign;
  else
    throw SchemaError("convention must be \"projector\" or \"sign\"");
  return YesNoObservable(matrix_from_json(detail::require(j, "matrix")), c, tol);
}

// Moment entries keyed by comma-joined monomials: {"A1": 0.5, "A1,B1": 0.42}.
inline Json entries_to_json(const MomentConstraints& m) {
  Json out = Json::object();
  for (const auto& [mask, value] : m.entries()) out[join_names(m.vars().monomial_of(mask))] = value;
  return out;
}

inline MomentConstraints moments_from_json(const Json& entries, const VariableSet& vars, double tol = kTolerance) {
  if (!entries.is_object()) throw SchemaError("moment entries must be an object");
  MomentConstraints m(vars);
  for (const auto& [key, value] : entries.items()) m.set(split_names(key), detail::number(value, "moment"), tol);
  return m;
}

inline Json to_json(const CompatibilityGraph& g) {
  Json nodes = Json::array(), edges = Json::array();
  for (const auto& b : g.blocks()) nodes.push_back(Json{{"block", b}});
  for (const auto& e : g.edges()) edges.push_back(Json{{"a", e.a}, {"b", e.b}, {"dist", to_json(e.dist)}});
  return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

inline CompatibilityGraph graph_from_json(const Json& j, double tol = kTolerance) {
  const auto& jn = detail::require(j, "nodes");
  const auto& je = detail::require(j, "edges");
  if (!jn.is_array() || !je.is_array()) throw SchemaError("nodes and edges must be arrays");
  std::vector<Monomial> blocks;
  for (const auto& n : jn) blocks.push_back(detail::string_list(detail::require(n, "block"), "block"));
  std::vector<GraphEdge> edges;
  for (const auto& e : je) {
    const auto& a = detail::require(e, "a");
    const auto& b = detail::require(e, "b");
    if (!detail::is_index(a) || !detail::is_index(b)) throw SchemaError("edge endpoints must be node indices");
    edges.push_back({a.get<std::size_t>(), b.get<std::size_t>(), distribution_from_json(detail::require(e, "dist"), tol)});
  }
  return CompatibilityGraph(std::move(blocks), std::move(edges));
}

inline Json to_json(const Scenario& s) {
  Json contexts = Json::array();
  for (const auto& c : s.contexts()) contexts.push_back(c);
  Json source;
  if (const auto* q = std::get_if<QuantumSource>(&s.source())) {
    Json obs = Json::object();
    for (std::size_t i = 0; i < s.vars().size(); ++i) obs[s.vars().names()[i]] = to_json(q->observables[i]);
    source = Json{{"type", "quantum"}, {"state", to_json(q->state)}, {"observables", std::move(obs)}};
  } else {
    source = Json{{"type", "moments"}, {"entries", entries_to_json(std::get<MomentSource>(s.source()).moments)}};
  }
  return Json{{"name", s.name()},
              {"domain", std::string(to_string(s.domain()))},
              {"variables", s.vars().names()},
              {"contexts", std::move(contexts)},
              {"source", std::move(source)}};
}

inline Scenario scenario_from_json(const Json& j, double tol = kTolerance) {
  const auto& jname = detail::require(j, "name");
  if (!jname.is_string()) throw SchemaError("name must be a string");
  const VariableSet vars(detail::string_list(detail::require(j, "variables"), "variables"), detail::domain_field(j));
  const auto& jctx = detail::require(j, "contexts");
  if (!jctx.is_array()) throw SchemaError("contexts must be an array");
  std::vector<Monomial> contexts;
  for (const auto& c : jctx) contexts.push_back(detail::string_list(c, "context"));

  const auto& src = detail::require(j, "source");
  const auto& type = detail::require(src, "type");
  if (type == "quantum") {
    const auto& jobs = detail::require(src, "observables");
    if (!jobs.is_object()) throw SchemaError("observables must be an object keyed by variable");
    std::vector<YesNoObservable> obs;
    for (const auto& name : vars.names()) {
      auto it = jobs.find(name);
      if (it == jobs.end()) throw SchemaError("no observable for variable '" + name + "'");
      obs.push_back(observable_from_json(*it, tol));
    }
    return Scenario(jname.get<std::string>(), vars, std::move(contexts),
                    QuantumSource{state_from_json(detail::require(src, "state"), tol), std::move(obs)}, tol);
  }
  if (type == "moments")
    return Scenario(jname.get<std::string>(), vars, std::move(contexts),
                    MomentSource{moments_from_json(detail::require(src, "entries"), vars, tol)}, tol);
  throw SchemaError("source type must be \"quantum\" or \"moments\"");
}

// {"range": [lo, hi], "empty": bool, "reason": "none"|"bounds"|"infeasible"}; NaN endpoints become null.
inline Json to_json(const Interval& iv) {
  auto num = [](double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); };
  return Json{{"range", Json::array({num(iv.lo), num(iv.hi)})},
              {"empty", iv.empty},
              {"reason", std::string(to_string(iv.reason))}};
}

}  // namespace bellext
