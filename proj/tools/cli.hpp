#pragma once

// Command implementations for the `bellext` tool. Kept in a header so the
// test suite can drive them in-process.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bellext/json_io.hpp"
#include "bellext/probability.hpp"
#include "bellext/representability.hpp"
#include "bellext/sampling.hpp"
#include "bellext/scenarios.hpp"
#include "bellext/tree_extension.hpp"

namespace bellext::cli {

enum ExitCode : int { kRepresentable = 0, kViolation = 1, kInputError = 2, kInternalError = 3 };

// Bad command-line or file input.
class InputError : public Error {
 public:
  using Error::Error;
};

// A cross-check between independent computations failed.
class InvariantFailure : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string builtin;
  std::string file;
  std::string json_path;
  std::string target;
  std::string with;
  std::uint64_t seed = kDefaultSeed;
  std::size_t samples = 1000;
  double tolerance = kTolerance;
};

inline std::string fixed9(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9f", x);
  std::string s = buf;
  if (s == "-0.000000000") s.erase(0, 1);
  return s;
}

// Report scalars carry nine decimals, like the text rendering.
inline double round9(double x) {
  if (!std::isfinite(x)) return x;
  const double r = std::round(x * 1e9) / 1e9;
  return r == 0.0 ? 0.0 : r;
}

inline Json num9(double x) { return std::isfinite(x) ? Json(round9(x)) : Json(nullptr); }

inline Json interval_json(const Interval& iv) {
  Json j = to_json(iv);
  j["range"] = Json::array({num9(iv.lo), num9(iv.hi)});
  return j;
}

inline std::string interval_text(const Interval& iv) {
  if (iv.empty && iv.reason == EmptyReason::Infeasible) return "empty (infeasible)";
  std::string s = "[" + fixed9(iv.lo) + ", " + fixed9(iv.hi) + "]";
  return iv.empty ? s + " empty" : s;
}

inline std::string bracket(const Monomial& m) { return "<" + join_names(m, " ") + ">"; }

// Entries ordered by degree, then by variable order.
inline std::vector<std::pair<Mask, double>> by_degree(const MomentConstraints& m) {
  std::vector<std::pair<Mask, double>> out(m.entries().begin(), m.entries().end());
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    const int px = std::popcount(x.first), py = std::popcount(y.first);
    return px != py ? px < py : x.first > y.first;
  });
  return out;
}

inline Scenario load_scenario(const Options& opt) {
  if (!opt.builtin.empty() && !opt.file.empty()) throw InputError("use either --builtin or --file, not both");
  try {
    if (!opt.builtin.empty()) {
      if (auto s = builtin_scenario(opt.builtin)) return *s;
      throw InputError("unknown builtin '" + opt.builtin + "' (expected singlet, hardy or ghsz)");
    }
    if (opt.file.empty()) throw InputError("a scenario is required: --builtin NAME or --file PATH");
    std::ifstream in(opt.file);
    if (!in) throw InputError("cannot open '" + opt.file + "'");
    return scenario_from_json(Json::parse(in), opt.tolerance);
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(e.what());
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

inline void write_json(const Options& opt, const Json& report) {
  if (opt.json_path.empty()) return;
  std::ofstream out(opt.json_path);
  if (!out) throw InputError("cannot write '" + opt.json_path + "'");
  out << report.dump(2) << '\n';
}

inline void print_header(std::ostream& out, const Scenario& s) {
  out << "scenario: " << s.name() << " (" << (s.is_quantum() ? "quantum" : "moments") << ", domain "
      << to_string(s.domain()) << ")\n";
}

// ---------------------------------------------------------------------------
// predict
// ---------------------------------------------------------------------------

inline int cmd_predict(const Options& opt, std::ostream& out) {
  const Scenario s = load_scenario(opt);
  const double tol = opt.tolerance;
  print_header(out, s);

  Json contexts = Json::array();
  for (std::size_t k = 0; k < s.contexts().size(); ++k) {
    const auto& ctx = s.contexts()[k];
    Json jc{{"variables", ctx}};
    out << "context {" << join_names(ctx, ", ") << "}\n";
    const MomentConstraints m = s.measurable_moments(ctx, tol);
    if (s.is_quantum()) jc["distribution"] = to_json(s.context_distribution(k, tol));
    Json jm = Json::object();
    for (const auto& [mask, value] : by_degree(m)) {
      const auto mono = m.vars().monomial_of(mask);
      out << "  " << std::left << std::setw(18) << bracket(mono) << fixed9(value) << '\n';
      jm[join_names(mono)] = num9(value);
    }
    jc["moments"] = std::move(jm);
    contexts.push_back(std::move(jc));
  }
  write_json(opt, Json{{"command", "predict"},
                       {"scenario", s.name()},
                       {"domain", std::string(to_string(s.domain()))},
                       {"contexts", std::move(contexts)}});
  return kRepresentable;
}

// ---------------------------------------------------------------------------
// range
// ---------------------------------------------------------------------------

inline int cmd_range(const Options& opt, std::ostream& out) {
  const Scenario s = load_scenario(opt);
  const double tol = opt.tolerance;
  const Monomial target = split_names(opt.target);
  const Monomial with = split_names(opt.with);
  if (target.empty()) throw InputError("--target needs at least one variable");
  Monomial over;
  for (const auto& name : s.vars().names())
    if (std::find(target.begin(), target.end(), name) != target.end() ||
        std::find(with.begin(), with.end(), name) != with.end())
      over.push_back(name);
  for (const auto& name : target) {
    if (!s.vars().contains(name)) throw InputError("unknown variable '" + name + "' in --target");
  }
  for (const auto& name : with) {
    if (!s.vars().contains(name)) throw InputError("unknown variable '" + name + "' in --with");
  }

  const MomentConstraints m = s.measurable_moments(over, tol);
  const Interval lp = lp_interval(target, m, tol);

  std::optional<Interval> closed;
  if (s.domain() == Domain::ZeroOne && target.size() == 2 && with.size() == 1) {
    const bool have = m.contains({target[0]}) && m.contains({target[1]}) && m.contains({with[0]}) &&
                      m.contains({target[0], with[0]}) && m.contains({target[1], with[0]});
    if (have) closed = bell_wigner_interval(m, target[0], target[1], with[0], tol);
  }
  bool agree = true;
  if (closed) {
    if (closed->empty != lp.empty)
      agree = false;
    else if (!lp.empty)
      agree = std::abs(closed->lo - lp.lo) <= tol && std::abs(closed->hi - lp.hi) <= tol;
  }

  print_header(out, s);
  out << "target:      " << bracket(target) << "   with: " << join_names(with, ", ") << '\n';
  out << "constraints: " << m.size() << " measurable moments\n";
  if (closed) out << "closed form: " << interval_text(*closed) << '\n';
  out << "LP:          " << interval_text(lp) << '\n';
  if (closed) out << "agreement:   " << (agree ? "yes" : "NO") << '\n';

  Json report{{"command", "range"},
              {"scenario", s.name()},
              {"target", target},
              {"with", with},
              {"constraints", m.size()},
              {"lp", interval_json(lp)},
              {"agree", agree}};
  report["closed_form"] = closed ? interval_json(*closed) : Json(nullptr);
  write_json(opt, report);
  if (!agree) throw InvariantFailure("closed-form and LP intervals disagree");
  return kRepresentable;
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

// Recognizes the four-observable layout: four variables, four two-variable
// contexts forming a 4-cycle. Returns A1, A2, B1, B2 in role order.
inline std::optional<std::array<std::string, 4>> bch_roles(const Scenario& s) {
  if (s.domain() != Domain::ZeroOne || s.vars().size() != 4 || s.contexts().size() != 4) return std::nullopt;
  const auto& names = s.vars().names();
  std::vector<std::vector<std::size_t>> adj(4);
  for (const auto& c : s.contexts()) {
    if (c.size() != 2 || c[0] == c[1]) return std::nullopt;
    const auto i = s.vars().index_of(c[0]), j = s.vars().index_of(c[1]);
    if (std::find(adj[i].begin(), adj[i].end(), j) != adj[i].end()) return std::nullopt;
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (const auto& a : adj)
    if (a.size() != 2) return std::nullopt;
  // a 2-regular simple graph on four nodes is the 4-cycle
  const std::size_t a1 = 0;
  std::size_t b1 = std::min(adj[a1][0], adj[a1][1]), b2 = std::max(adj[a1][0], adj[a1][1]);
  std::size_t a2 = 0;
  for (std::size_t v = 1; v < 4; ++v)
    if (v != b1 && v != b2) a2 = v;
  return std::array<std::string, 4>{names[a1], names[a2], names[b1], names[b2]};
}

inline Json residuals_json(const FineResiduals& f) {
  Json ch = Json::array(), res = Json::array();
  for (double x : f.ch) ch.push_back(num9(x));
  for (double x : f.residuals) res.push_back(num9(x));
  return Json{{"ch", std::move(ch)}, {"residuals", std::move(res)}};
}

inline int cmd_check(const Options& opt, std::ostream& out) {
  const Scenario s = load_scenario(opt);
  const double tol = opt.tolerance;
  print_header(out, s);
  const MomentConstraints all = s.measurable_moments(tol);
  Json report{{"command", "check"}, {"scenario", s.name()}};

  const bool lp_ok = lp_feasible(all, tol);
  bool representable = lp_ok;

  if (auto roles = bch_roles(s)) {
    const auto& r = *roles;
    const BchScenario bch = BchScenario::from_moments(all, {r[0], r[1]}, {r[2], r[3]}, tol);
    const RepresentabilityReport rep = bch_check(bch, tol);
    const bool fine_ok = rep.fine.satisfied(tol);
    const std::string x = bracket({r[0], r[1]});
    out << "range of " << x << " with " << r[2] << ": " << interval_text(rep.interval_b1) << '\n';
    out << "range of " << x << " with " << r[3] << ": " << interval_text(rep.interval_b2) << '\n';
    out << "intersection:       " << interval_text(rep.intersection) << '\n';
    out << "CH expressions:    ";
    for (double c : rep.fine.ch) out << ' ' << fixed9(c);
    out << "\nFine inequalities:  " << (fine_ok ? "satisfied" : "violated") << " (worst residual "
        << fixed9(rep.fine.worst()) << ")\n";
    out << "joint LP:           " << (lp_ok ? "feasible" : "infeasible") << '\n';

    report["roles"] = r;
    report["interval_B1"] = interval_json(rep.interval_b1);
    report["interval_B2"] = interval_json(rep.interval_b2);
    report["intersection"] = interval_json(rep.intersection);
    report["fine"] = residuals_json(rep.fine);
    report["fine_satisfied"] = fine_ok;
    report["lp_feasible"] = lp_ok;
    report["witness"] = rep.witness ? to_json(*rep.witness) : Json(nullptr);
    representable = rep.representable;
    if (fine_ok != representable || lp_ok != representable) {
      report["representable"] = representable;
      write_json(opt, report);
      throw InvariantFailure("interval intersection, Fine inequalities and LP feasibility disagree");
    }
  } else {
    out << "joint LP over " << s.vars().size() << " variables, " << all.size()
        << " measurable moments: " << (lp_ok ? "feasible" : "infeasible") << '\n';
    report["lp_feasible"] = lp_ok;
    std::optional<Distribution> witness;
    if (lp_ok) witness = lp_witness(all, tol);
    report["witness"] = witness ? to_json(*witness) : Json(nullptr);
  }

  if (opt.builtin == "ghsz") {
    const GhszAnalysis g = analyze_ghsz(tol);
    out << "four-fold <A1 A2 B1 B2>: model 1 " << fixed9(g.four_correlation.first) << ", model 2 "
        << fixed9(g.four_correlation.second) << '\n';
    out << "forced by C1 data:  " << interval_text(g.forced_range1) << '\n';
    out << "forced by C2 data:  " << interval_text(g.forced_range2) << '\n';
    out << "other A/B moments agree: " << (g.shared_moments_agree ? "yes" : "no") << '\n';
    out << "parity assignments solving all four constraints: " << g.parity_solutions << " of 64"
        << (g.parity_obstruction ? " (obstruction)" : "") << '\n';
    report["ghsz"] = Json{{"four_correlation", Json::array({num9(g.four_correlation.first), num9(g.four_correlation.second)})},
                          {"forced_range_C1", interval_json(g.forced_range1)},
                          {"forced_range_C2", interval_json(g.forced_range2)},
                          {"shared_moments_agree", g.shared_moments_agree},
                          {"parity_solutions", g.parity_solutions},
                          {"parity_obstruction", g.parity_obstruction},
                          {"atomwise", g.atomwise}};
    if (g.parity_obstruction && lp_ok) {
      write_json(opt, report);
      throw InvariantFailure("parity obstruction found but the joint LP is feasible");
    }
  }

  out << "verdict: " << (representable ? "classically representable" : "NOT classically representable") << '\n';
  report["representable"] = representable;
  write_json(opt, report);
  return representable ? kRepresentable : kViolation;
}

// ---------------------------------------------------------------------------
// extend
// ---------------------------------------------------------------------------

inline int cmd_extend(const Options& opt, std::ostream& out) {
  if (opt.file.empty()) throw InputError("extend needs --file GRAPH.json");
  const double tol = opt.tolerance;
  std::optional<CompatibilityGraph> g;
  try {
    std::ifstream in(opt.file);
    if (!in) throw InputError("cannot open '" + opt.file + "'");
    g = graph_from_json(Json::parse(in), tol);
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(e.what());
  } catch (const Json::exception& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
  if (!is_tree(*g)) throw InputError("compatibility graph is not a tree");

  Json report{{"command", "extend"}};
  try {
    const GlueResult r = extend_tree(*g, tol);
    double worst = 0.0;
    for (const auto& e : g->edges()) {
      const auto& names = e.dist.vars().names();
      const Distribution m = reorder(marginalize(r.joint, names), names);
      worst = std::max(worst, max_abs_difference(m.weights(), e.dist.weights()));
    }
    out << "joint over {" << join_names(r.joint.vars().names(), ", ") << "}\n";
    out << "glue order:";
    for (auto e : r.glue_order) out << ' ' << e;
    out << "\nmax edge marginal error: " << fixed9(worst) << '\n';
    for (std::size_t a = 0; a < r.joint.vars().atom_count(); ++a)
      out << "  " << std::left << std::setw(40) << describe_atom(r.joint.vars(), a) << fixed9(r.joint.weight(a)) << '\n';
    report["joint"] = to_json(r.joint);
    report["glue_order"] = r.glue_order;
    report["max_marginal_error"] = worst;
    write_json(opt, report);
    if (worst > tol) throw InvariantFailure("joint does not reproduce an edge distribution");
    return kRepresentable;
  } catch (const MarginalMismatch& e) {
    out << "no extension: " << e.what() << '\n';
    report["error"] = e.what();
    write_json(opt, report);
    return kViolation;
  }
}

// ---------------------------------------------------------------------------
// export / selfcheck
// ---------------------------------------------------------------------------

inline int cmd_export(const Options& opt, std::ostream& out) {
  const Scenario s = load_scenario(opt);
  const Json j = to_json(s);
  if (opt.json_path.empty())
    out << j.dump(2) << '\n';
  else
    write_json(opt, j);
  return kRepresentable;
}

inline int cmd_selfcheck(const Options& opt, std::ostream& out) {
  const double tol = opt.tolerance;
  Rng rng(opt.seed);
  std::size_t bch_disagree = 0, triple_disagree = 0, violations = 0;
  for (std::size_t k = 0; k < opt.samples; ++k) {
    const BchScenario s = k % 2 ? random_quantum_bch_scenario(rng) : random_bch_scenario(rng);
    const bool by_interval = bch_check(s, tol).representable;
    if (!by_interval) ++violations;
    if (by_interval != fine_inequalities(s).satisfied(tol) || by_interval != bch_lp_feasible(s, tol)) ++bch_disagree;

    const TripleMoments t = random_triple(rng);
    const Interval cf = bell_wigner_interval(t, tol);
    MomentConstraints m(VariableSet({"A1", "A2", "B"}, Domain::ZeroOne));
    m.set({"A1"}, t.a1).set({"A2"}, t.a2).set({"B"}, t.b).set({"A1", "B"}, t.a1b).set({"A2", "B"}, t.a2b);
    const Interval lp = lp_interval({"A1", "A2"}, m, tol);
    if (cf.empty || lp.empty || std::abs(cf.lo - lp.lo) > tol || std::abs(cf.hi - lp.hi) > tol) ++triple_disagree;
  }
  out << "seed " << opt.seed << ", " << opt.samples << " samples\n";
  out << "four-variable scenarios: " << violations << " not representable, " << bch_disagree
      << " verdict disagreements\n";
  out << "three-variable ranges:   " << triple_disagree << " closed-form/LP disagreements\n";
  write_json(opt, Json{{"command", "selfcheck"},
                       {"seed", opt.seed},
                       {"samples", opt.samples},
                       {"not_representable", violations},
                       {"verdict_disagreements", bch_disagree},
                       {"interval_disagreements", triple_disagree}});
  return bch_disagree == 0 && triple_disagree == 0 ? kRepresentable : kInternalError;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Classical representability of partial quantum correlation data"};
  app.require_subcommand(1);
  Options opt;

  auto add_scenario = [&opt](CLI::App* cmd) {
    auto* b = cmd->add_option("--builtin", opt.builtin, "Built-in scenario: singlet, hardy or ghsz");
    auto* f = cmd->add_option("--file", opt.file, "Scenario JSON file");
    b->excludes(f);
  };
  auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("--json", opt.json_path, "Write the machine-readable report here");
    cmd->add_option("--tolerance", opt.tolerance, "Comparison tolerance")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opt.seed, "Seed for randomized checks");
  };

  auto* predict = app.add_subcommand("predict", "Per-context moments of a scenario");
  add_scenario(predict);
  add_common(predict);

  auto* range = app.add_subcommand("range", "Feasible range of an unmeasurable correlation");
  add_scenario(range);
  add_common(range);
  range->add_option("--target", opt.target, "Target monomial, e.g. A1,A2")->required();
  range->add_option("--with", opt.with, "Additional variables whose correlations constrain the target");

  auto* check = app.add_subcommand("check", "Decide classical representability");
  add_scenario(check);
  add_common(check);

  auto* extend = app.add_subcommand("extend", "Glue a tree compatibility graph into one joint distribution");
  extend->add_option("--file", opt.file, "Graph JSON file")->required();
  add_common(extend);

  auto* exp = app.add_subcommand("export", "Write a scenario as JSON");
  add_scenario(exp);
  add_common(exp);

  auto* self = app.add_subcommand("selfcheck", "Randomized agreement checks between independent deciders");
  add_common(self);
  self->add_option("--samples", opt.samples, "Number of random scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (predict->parsed()) return cmd_predict(opt, out);
    if (range->parsed()) return cmd_range(opt, out);
    if (check->parsed()) return cmd_check(opt, out);
    if (extend->parsed()) return cmd_extend(opt, out);
    if (exp->parsed()) return cmd_export(opt, out);
    if (self->parsed()) return cmd_selfcheck(opt, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const UnknownVariable& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
  return kInputError;
}

}  // namespace bellext::cli
