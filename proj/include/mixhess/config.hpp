#pragma once

// Run configuration: a JSON object, optionally starting from a built-in
// problem ("problem": name) whose settings the remaining keys override.
//
//   n, k          integers, 2 <= k <= n, 2 <= n <= 4
//   alphas        k-1 entries, each a number or a field expression
//   rhs           number | expression | {"manufactured": "<u* expression>"}
//   phi           number | expression (omitted for manufactured problems)
//   chi           "zero" | "z-identity" | "neg-p-squared" | {"constant": c} | {"linear-z": c}
//   box           {"lower": [...], "upper": [...]}
//   resolution    integer or per-axis array (>= 5)
//   subsolution   expression | {"expr": "<expression>", "bump": eps}
//   solver        {"tol_newton", "max_newton", "max_halvings", "armijo_beta", "tau",
//                  "dt", "dt_min", "krylov_restart", "krylov_max_iters",
//                  "krylov_tol", "direct_threshold"}
//   seed, samples, grids, out, verbosity

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mixhess/chi.hpp"
#include "mixhess/continuation.hpp"
#include "mixhess/errors.hpp"
#include "mixhess/expression.hpp"
#include "mixhess/mms.hpp"

namespace mixhess {

using FieldValue = std::variant<double, std::string>;

struct ChiConfig {
  std::string kind = "zero";  ///< zero | z-identity | neg-p-squared | constant | linear-z
  double parameter = 0.0;
  friend bool operator==(const ChiConfig&, const ChiConfig&) = default;
};

struct SubsolutionConfig {
  std::optional<std::string> expr;  ///< defaults to u* for manufactured problems
  double bump = 0.0;
  friend bool operator==(const SubsolutionConfig&, const SubsolutionConfig&) = default;
};

struct RunConfig {
  std::optional<std::string> problem;
  int n = 3;
  int k = 3;
  std::vector<FieldValue> alphas;
  std::optional<FieldValue> rhs;
  std::optional<std::string> manufactured;
  std::optional<FieldValue> phi;
  ChiConfig chi;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> resolution;
  SubsolutionConfig subsolution;
  SolverOptions solver;
  std::uint64_t seed = 1;
  std::optional<std::size_t> samples;
  std::vector<int> grids;
  std::string out = "mixhess_out";
  int verbosity = 1;

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    const auto& sa = a.solver;
    const auto& sb = b.solver;
    const bool solver_eq = sa.tol_newton == sb.tol_newton && sa.max_newton == sb.max_newton &&
                           sa.max_halvings == sb.max_halvings && sa.armijo_beta == sb.armijo_beta &&
                           sa.tau == sb.tau && sa.dt == sb.dt && sa.dt_min == sb.dt_min &&
                           sa.krylov.restart == sb.krylov.restart &&
                           sa.krylov.max_iterations == sb.krylov.max_iterations &&
                           sa.krylov.relative_tolerance == sb.krylov.relative_tolerance &&
                           sa.krylov.direct_threshold == sb.krylov.direct_threshold;
    return solver_eq && a.problem == b.problem && a.n == b.n && a.k == b.k && a.alphas == b.alphas &&
           a.rhs == b.rhs && a.manufactured == b.manufactured && a.phi == b.phi && a.chi == b.chi &&
           a.lower == b.lower && a.upper == b.upper && a.resolution == b.resolution &&
           a.subsolution == b.subsolution && a.seed == b.seed && a.samples == b.samples && a.grids == b.grids &&
           a.out == b.out && a.verbosity == b.verbosity;
  }
};

/// Built-in problem library.
inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"quadratic-mms", "trig-perturbed-mms", "chi-linear-z",
                                              "degeneracy-sweep", "convergence-study"};
  return names;
}

inline constexpr const char* kQuadraticStar = "(x1^2 + x2^2 + x3^2)/2";
inline constexpr const char* kTrigStar = "(x1^2 + x2^2 + x3^2)/2 + 0.05*sin(x1)*sin(x2)*sin(x3)";

/// quadratic-mms: u* = |x|^2/2 on [-1,1]^3, chi = 0, alphas (0.3, 0.1), 17^3.
/// trig-perturbed-mms: u* + 0.05 sin(x1) sin(x2) sin(x3).
/// chi-linear-z: the trig problem with chi = z * identity.
/// degeneracy-sweep: quadratic problem with alphas 1e-3, close to the
///   degenerate regime alpha_l = 0.
/// convergence-study: trig problem solved on grids 9 and 17.
inline RunConfig builtin_config(const std::string& name) {
  RunConfig c;
  c.problem = name;
  c.n = 3;
  c.k = 3;
  c.alphas = {0.3, 0.1};
  c.manufactured = kQuadraticStar;
  c.lower = {-1.0, -1.0, -1.0};
  c.upper = {1.0, 1.0, 1.0};
  c.resolution = {17, 17, 17};
  c.subsolution.bump = 0.05;
  c.grids = {9, 17};
  if (name == "quadratic-mms") return c;
  if (name == "trig-perturbed-mms" || name == "convergence-study") {
    c.manufactured = kTrigStar;
    return c;
  }
  if (name == "chi-linear-z") {
    c.manufactured = kTrigStar;
    c.chi.kind = "z-identity";
    return c;
  }
  if (name == "degeneracy-sweep") {
    c.alphas = {1e-3, 1e-3};
    c.subsolution.bump = 0.01;
    return c;
  }
  throw ConfigError("unknown built-in problem '" + name + "'");
}

namespace detail {

inline FieldValue field_value(const nlohmann::json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw ConfigError("key '" + key + "': expected a number or an expression string");
}

inline nlohmann::ordered_json field_json(const FieldValue& f) {
  return std::visit([](const auto& v) { return nlohmann::ordered_json(v); }, f);
}

template <class T>
T get_as(const nlohmann::json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + key + "': wrong type (" + std::string(j.type_name()) + ")");
  }
}

inline void apply_solver(const nlohmann::json& j, SolverOptions& s) {
  if (!j.is_object()) throw ConfigError("key 'solver': expected an object");
  for (const auto& [key, v] : j.items()) {
    const std::string ctx = "solver." + key;
    if (key == "tol_newton") s.tol_newton = get_as<double>(v, ctx);
    else if (key == "max_newton") s.max_newton = get_as<int>(v, ctx);
    else if (key == "max_halvings") s.max_halvings = get_as<int>(v, ctx);
    else if (key == "armijo_beta") s.armijo_beta = get_as<double>(v, ctx);
    else if (key == "tau") s.tau = get_as<double>(v, ctx);
    else if (key == "dt") s.dt = get_as<double>(v, ctx);
    else if (key == "dt_min") s.dt_min = get_as<double>(v, ctx);
    else if (key == "krylov_restart") s.krylov.restart = get_as<std::size_t>(v, ctx);
    else if (key == "krylov_max_iters") s.krylov.max_iterations = get_as<std::size_t>(v, ctx);
    else if (key == "krylov_tol") s.krylov.relative_tolerance = get_as<double>(v, ctx);
    else if (key == "direct_threshold") s.krylov.direct_threshold = get_as<std::size_t>(v, ctx);
    else throw ConfigError("unknown key '" + ctx + "'");
  }
}

}  // namespace detail

/// Throws ConfigError naming the violated rule.
inline void validate(const RunConfig& c) {
  if (c.n < 2 || c.n > 4) throw ConfigError("2 <= n <= 4 required (n = " + std::to_string(c.n) + ")");
  if (c.k > c.n) throw ConfigError("k <= n required (k = " + std::to_string(c.k) + ", n = " + std::to_string(c.n) + ")");
  if (c.k < 2) throw ConfigError("k >= 2 required");
  if (c.alphas.size() != static_cast<std::size_t>(c.k - 1)) {
    throw ConfigError("alphas must have k-1 = " + std::to_string(c.k - 1) + " entries");
  }
  for (const auto& a : c.alphas) {
    if (const double* v = std::get_if<double>(&a); v && *v < 0.0) throw ConfigError("alphas must be nonnegative");
  }
  if (c.lower.size() != static_cast<std::size_t>(c.n) || c.upper.size() != static_cast<std::size_t>(c.n)) {
    throw ConfigError("box bounds must have n entries");
  }
  for (int a = 0; a < c.n; ++a) {
    if (!(c.upper[a] > c.lower[a])) throw ConfigError("box: upper > lower required on every axis");
  }
  if (c.resolution.size() != static_cast<std::size_t>(c.n)) throw ConfigError("resolution must have n entries");
  for (int r : c.resolution) {
    if (r < 5) throw ConfigError("resolution >= 5 required on every axis");
  }
  for (int g : c.grids) {
    if (g < 5) throw ConfigError("grids: every level needs >= 5 points");
  }
  if (!c.manufactured) {
    if (!c.rhs) throw ConfigError("rhs is required unless the problem is manufactured");
    if (!c.phi) throw ConfigError("phi is required unless the problem is manufactured");
    if (!c.subsolution.expr) throw ConfigError("subsolution is required unless the problem is manufactured");
  }
  static const std::set<std::string> chis{"zero", "z-identity", "neg-p-squared", "constant", "linear-z"};
  if (!chis.count(c.chi.kind)) throw ConfigError("chi: unknown kind '" + c.chi.kind + "'");
  const auto& s = c.solver;
  if (!(s.tol_newton > 0.0)) throw ConfigError("solver.tol_newton > 0 required");
  if (s.max_newton < 0 || s.max_halvings < 0) throw ConfigError("solver iteration limits must be nonnegative");
  if (!(s.dt > 0.0 && s.dt <= 1.0)) throw ConfigError("solver.dt must lie in (0, 1]");
  if (!(s.dt_min > 0.0)) throw ConfigError("solver.dt_min > 0 required");
  if (!(s.tau >= 0.0)) throw ConfigError("solver.tau >= 0 required");
  // Expressions must parse in dimension n.
  auto check_expr = [&](const FieldValue& f) {
    if (const auto* e = std::get_if<std::string>(&f)) (void)Expr::parse(*e, static_cast<std::size_t>(c.n));
  };
  for (const auto& a : c.alphas) check_expr(a);
  if (c.rhs) check_expr(*c.rhs);
  if (c.phi) check_expr(*c.phi);
  if (c.manufactured) check_expr(*c.manufactured);
  if (c.subsolution.expr) check_expr(*c.subsolution.expr);
}

inline RunConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
  RunConfig c;
  if (j.contains("problem")) c = builtin_config(detail::get_as<std::string>(j.at("problem"), "problem"));
  bool resolution_set = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "problem") continue;
    if (key == "n") c.n = detail::get_as<int>(v, key);
    else if (key == "k") c.k = detail::get_as<int>(v, key);
    else if (key == "alphas") {
      if (!v.is_array()) throw ConfigError("key 'alphas': expected an array");
      c.alphas.clear();
      for (const auto& a : v) c.alphas.push_back(detail::field_value(a, key));
    } else if (key == "rhs") {
      if (v.is_object()) {
        if (v.size() != 1 || !v.contains("manufactured")) throw ConfigError("key 'rhs': object form is {\"manufactured\": expr}");
        c.manufactured = detail::get_as<std::string>(v.at("manufactured"), "rhs.manufactured");
        c.rhs.reset();
      } else {
        c.rhs = detail::field_value(v, key);
        c.manufactured.reset();
      }
    } else if (key == "phi") {
      c.phi = detail::field_value(v, key);
    } else if (key == "chi") {
      if (v.is_string()) {
        c.chi = {v.get<std::string>(), 0.0};
      } else if (v.is_object() && v.size() == 1) {
        const auto& [kind, param] = *v.items().begin();
        c.chi = {kind, detail::get_as<double>(param, "chi." + kind)};
        if (kind != "constant" && kind != "linear-z") throw ConfigError("chi: unknown kind '" + kind + "'");
      } else {
        throw ConfigError("key 'chi': expected a name or {\"constant\": c} / {\"linear-z\": c}");
      }
    } else if (key == "box") {
      if (!v.is_object()) throw ConfigError("key 'box': expected {\"lower\": [...], \"upper\": [...]}");
      for (const auto& [bk, bv] : v.items()) {
        if (bk == "lower") c.lower = detail::get_as<std::vector<double>>(bv, "box.lower");
        else if (bk == "upper") c.upper = detail::get_as<std::vector<double>>(bv, "box.upper");
        else throw ConfigError("unknown key 'box." + bk + "'");
      }
    } else if (key == "resolution") {
      resolution_set = true;
      if (v.is_number_integer()) c.resolution.assign(1, v.get<int>());
      else c.resolution = detail::get_as<std::vector<int>>(v, key);
    } else if (key == "subsolution") {
      if (v.is_string()) {
        c.subsolution = {v.get<std::string>(), 0.0};
      } else if (v.is_object()) {
        c.subsolution = {};
        for (const auto& [sk, sv] : v.items()) {
          if (sk == "expr") c.subsolution.expr = detail::get_as<std::string>(sv, "subsolution.expr");
          else if (sk == "bump") c.subsolution.bump = detail::get_as<double>(sv, "subsolution.bump");
          else throw ConfigError("unknown key 'subsolution." + sk + "'");
        }
      } else {
        throw ConfigError("key 'subsolution': expected an expression or {\"expr\", \"bump\"}");
      }
    } else if (key == "solver") {
      detail::apply_solver(v, c.solver);
    } else if (key == "seed") {
      c.seed = detail::get_as<std::uint64_t>(v, key);
    } else if (key == "samples") {
      c.samples = detail::get_as<std::size_t>(v, key);
    } else if (key == "grids") {
      c.grids = detail::get_as<std::vector<int>>(v, key);
    } else if (key == "out") {
      c.out = detail::get_as<std::string>(v, key);
    } else if (key == "verbosity") {
      c.verbosity = detail::get_as<int>(v, key);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  if (resolution_set && c.resolution.size() == 1) c.resolution.assign(static_cast<std::size_t>(c.n), c.resolution[0]);
  validate(c);
  return c;
}

inline RunConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("configuration parse error: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig parse_config(const char* text) { return parse_config(std::string(text)); }

/// Fully explicit form; parse_config(serialize(c)) == c.
inline nlohmann::ordered_json serialize(const RunConfig& c) {
  nlohmann::ordered_json j;
  if (c.problem) j["problem"] = *c.problem;
  j["n"] = c.n;
  j["k"] = c.k;
  auto alphas = nlohmann::ordered_json::array();
  for (const auto& a : c.alphas) alphas.push_back(detail::field_json(a));
  j["alphas"] = alphas;
  if (c.manufactured) j["rhs"] = {{"manufactured", *c.manufactured}};
  else if (c.rhs) j["rhs"] = detail::field_json(*c.rhs);
  if (c.phi) j["phi"] = detail::field_json(*c.phi);
  if (c.chi.kind == "constant" || c.chi.kind == "linear-z") j["chi"] = {{c.chi.kind, c.chi.parameter}};
  else j["chi"] = c.chi.kind;
  j["box"] = {{"lower", c.lower}, {"upper", c.upper}};
  j["resolution"] = c.resolution;
  nlohmann::ordered_json sub;
  if (c.subsolution.expr) sub["expr"] = *c.subsolution.expr;
  sub["bump"] = c.subsolution.bump;
  j["subsolution"] = sub;
  const auto& s = c.solver;
  j["solver"] = {{"tol_newton", s.tol_newton},
                 {"max_newton", s.max_newton},
                 {"max_halvings", s.max_halvings},
                 {"armijo_beta", s.armijo_beta},
                 {"tau", s.tau},
                 {"dt", s.dt},
                 {"dt_min", s.dt_min},
                 {"krylov_restart", s.krylov.restart},
                 {"krylov_max_iters", s.krylov.max_iterations},
                 {"krylov_tol", s.krylov.relative_tolerance},
                 {"direct_threshold", s.krylov.direct_threshold}};
  j["seed"] = c.seed;
  if (c.samples) j["samples"] = *c.samples;
  j["grids"] = c.grids;
  j["out"] = c.out;
  j["verbosity"] = c.verbosity;
  return j;
}

inline ScalarField make_field(const FieldValue& f, std::size_t n) {
  if (const double* v = std::get_if<double>(&f)) return ScalarField::from_constant(*v, n);
  return ScalarField::from_expression(std::get<std::string>(f), n);
}

inline ChiSpec make_chi(const ChiConfig& c, std::size_t n) {
  if (c.kind == "zero") return ChiSpec::zero(n);
  if (c.kind == "z-identity") return ChiSpec::linear_z(n, 1.0);
  if (c.kind == "linear-z") return ChiSpec::linear_z(n, c.parameter);
  if (c.kind == "neg-p-squared") return ChiSpec::neg_p_squared(n);
  if (c.kind == "constant") return ChiSpec::constant(SymTensor::scaled_identity(n, c.parameter), "constant");
  throw ConfigError("chi: unknown kind '" + c.kind + "'");
}

/// Build the discrete problem; resolution overrides the configured grid.
inline ProblemSpec build_problem(const RunConfig& c, std::optional<int> resolution = std::nullopt) {
  const std::size_t n = static_cast<std::size_t>(c.n);
  std::vector<int> counts = c.resolution;
  if (resolution) counts.assign(n, *resolution);
  const Box box(c.lower, c.upper, counts);
  std::vector<ScalarField> alphas;
  for (const auto& a : c.alphas) alphas.push_back(make_field(a, n));
  const ChiSpec chi = make_chi(c.chi, n);
  const std::string name = c.problem.value_or("custom");

  if (c.manufactured) {
    const auto u_star = ScalarField::from_expression(*c.manufactured, n);
    std::optional<ScalarField> sub;
    const ScalarField base = c.subsolution.expr ? ScalarField::from_expression(*c.subsolution.expr, n) : u_star;
    if (c.subsolution.expr || c.subsolution.bump != 0.0) sub = bump_subsolution(base, box, c.subsolution.bump);
    return mms_problem(u_star, chi, c.k, alphas, box, sub, name);
  }

  ProblemSpec spec;
  spec.name = name;
  spec.box = box;
  spec.k = c.k;
  spec.alphas = std::move(alphas);
  spec.rhs = make_field(*c.rhs, n);
  spec.boundary = make_field(*c.phi, n);
  spec.chi = chi;
  const auto sub = bump_subsolution(ScalarField::from_expression(*c.subsolution.expr, n), box, c.subsolution.bump);
  spec.subsolution = GridFunction::sample(box, sub.value);
  return spec;
}

}  // namespace mixhess
