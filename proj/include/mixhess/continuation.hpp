#pragma once

// Discrete Dirichlet problem G(U[u]) = alpha_{k-1}(x) on a box grid, solved by
// continuation in the right-hand side from an admissible subsolution, each
// stage by damped Newton that keeps every node inside Gamma_{k-1}.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mixhess/chi.hpp"
#include "mixhess/errors.hpp"
#include "mixhess/expression.hpp"
#include "mixhess/grid.hpp"
#include "mixhess/hessian_operator.hpp"
#include "mixhess/krylov.hpp"

namespace mixhess {

struct ProblemSpec {
  std::string name;
  Box box;
  int k = 3;
  std::vector<ScalarField> alphas;  ///< alpha_0 .. alpha_{k-2}
  ScalarField rhs;                  ///< alpha_{k-1}
  ScalarField boundary;             ///< phi
  ChiSpec chi;
  GridFunction subsolution;
  std::optional<ScalarField> exact;  ///< manufactured solution, when known

  std::size_t n() const { return box.dim(); }

  OperatorParams params_at(std::span<const double> x) const {
    OperatorParams p{static_cast<int>(n()), k, {}};
    p.alphas.reserve(alphas.size());
    for (const auto& a : alphas) p.alphas.push_back(a(x));
    return p;
  }
};

struct SolverOptions {
  double tol_newton = 1e-10;
  int max_newton = 50;
  int max_halvings = 30;
  double armijo_beta = 1e-4;
  double tau = 1e-10;  ///< admissibility margin factor: sigma_i > tau (1 + |U|_F)
  double dt = 0.1;
  double dt_min = 1e-4;
  KrylovOptions krylov;
};

struct IterationLogEntry {
  double t = 0.0;
  int iter = 0;
  double residual = 0.0;
  double step = 0.0;
  double min_sigma_margin = 0.0;
  double wall_time = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["t"] = t;
    j["iter"] = iter;
    j["residual"] = residual;
    j["step"] = step;
    j["min_sigma_margin"] = min_sigma_margin;
    j["wall_time"] = wall_time;
    return j;
  }
};

struct ContinuationRecord {
  double t = 0.0;
  int newton_iters = 0;
  double residual = 0.0;
  Norms norms;
  double min_sigma_margin = 0.0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["t"] = t;
    j["newton_iters"] = newton_iters;
    j["residual"] = residual;
    j["norms"] = {{"c0", norms.c0}, {"c1", norms.c1}, {"c2", norms.c2}};
    j["min_sigma_margin"] = min_sigma_margin;
    return j;
  }
};

/// Pointwise residual evaluation over all interior nodes.
struct ResidualEval {
  std::vector<double> residual;  ///< full grid size; zero on the boundary
  double max_residual = 0.0;
  double min_sigma_margin = INFINITY;  ///< min over nodes of min_{i<=k-1} sigma_i
  std::vector<std::size_t> inadmissible;
  bool admissible() const { return inadmissible.empty(); }
};

struct Linearization {
  CsrMatrix jacobian;            ///< identity rows on the boundary
  std::vector<double> residual;  ///< G(U[u]) - target; zero on the boundary
  double max_residual = 0.0;
  double min_sigma_margin = INFINITY;
};

namespace detail {

inline double node_tau(double tau, const SymTensor& u) { return tau > 0.0 ? tau * (1.0 + u.frobenius_norm()) : 0.0; }

inline std::string node_list(const std::vector<std::size_t>& nodes) {
  std::string s;
  for (std::size_t i = 0; i < nodes.size() && i < 8; ++i) s += (i ? ", " : "") + std::to_string(nodes[i]);
  if (nodes.size() > 8) s += ", ... (" + std::to_string(nodes.size()) + " total)";
  return s;
}

/// Per-node coordinates and operator parameters, evaluated once per solve.
class NodeCache {
 public:
  explicit NodeCache(const ProblemSpec& spec) : interior_(spec.box.interior_nodes()) {
    points_.reserve(interior_.size());
    params_.reserve(interior_.size());
    for (std::size_t idx : interior_) {
      points_.push_back(spec.box.point(idx));
      params_.push_back(spec.params_at(points_.back()));
    }
  }
  const std::vector<std::size_t>& interior() const { return interior_; }
  const std::vector<double>& point(std::size_t i) const { return points_[i]; }
  const OperatorParams& params(std::size_t i) const { return params_[i]; }

 private:
  std::vector<std::size_t> interior_;
  std::vector<std::vector<double>> points_;
  std::vector<OperatorParams> params_;
};

inline SymTensor node_U(const GridFunction& u, const ChiSpec& chi, std::size_t idx, std::span<const double> x,
                        std::vector<double>* grad_out = nullptr) {
  SymTensor h = hessian_at(u, idx);
  auto p = gradient_at(u, idx);
  h += chi.value(x, u[idx], p);
  if (grad_out) *grad_out = std::move(p);
  return h;
}

inline ResidualEval evaluate_residual(const GridFunction& u, const ProblemSpec& spec, const NodeCache& cache,
                                      std::span<const double> target, double tau) {
  ResidualEval out;
  out.residual.assign(u.size(), 0.0);
  for (std::size_t i = 0; i < cache.interior().size(); ++i) {
    const std::size_t idx = cache.interior()[i];
    const SymTensor U = node_U(u, spec.chi, idx, cache.point(i));
    try {
      const auto dec = eigen(U);
      double margin = 0.0;
      const double g = operator_from_eigenvalues(dec.eigenvalues.values(), cache.params(i), node_tau(tau, U),
                                                 nullptr, nullptr, &margin);
      out.residual[idx] = g - target[idx];
      out.max_residual = std::max(out.max_residual, std::abs(out.residual[idx]));
      out.min_sigma_margin = std::min(out.min_sigma_margin, margin);
    } catch (const DomainError&) {
      out.inadmissible.push_back(idx);
    }
  }
  if (!std::isfinite(out.max_residual)) out.max_residual = INFINITY;
  return out;
}

inline Linearization linearize_cached(const GridFunction& u, const ProblemSpec& spec, const NodeCache& cache,
                                      std::span<const double> target, double tau) {
  const Box& box = u.box();
  const std::size_t n = box.dim();
  Linearization lin;
  lin.residual.assign(u.size(), 0.0);
  std::vector<Triplet> trip;
  trip.reserve(u.size() * (1 + 2 * n + 2 * n * (n - 1)));
  std::vector<std::size_t> bad;

  for (std::size_t idx : box.boundary_nodes()) trip.push_back({idx, idx, 1.0});

  for (std::size_t i = 0; i < cache.interior().size(); ++i) {
    const std::size_t idx = cache.interior()[i];
    const auto& x = cache.point(i);
    std::vector<double> p;
    const SymTensor U = node_U(u, spec.chi, idx, x, &p);
    OperatorEval ev;
    try {
      ev = eval_G(U, cache.params(i), node_tau(tau, U));
    } catch (const DomainError&) {
      bad.push_back(idx);
      continue;
    }
    lin.residual[idx] = ev.value - target[idx];
    lin.max_residual = std::max(lin.max_residual, std::abs(lin.residual[idx]));
    lin.min_sigma_margin = std::min(lin.min_sigma_margin, ev.sigma_margin);

    const SymTensor& a = ev.gradient;
    // Second-order part: G^{ij} times the Hessian stencil.
    double center = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      const double h2 = box.spacing(d) * box.spacing(d);
      const double c = a(d, d) / h2;
      trip.push_back({idx, idx + box.stride(d), c});
      trip.push_back({idx, idx - box.stride(d), c});
      center -= 2.0 * c;
      for (std::size_t e = d + 1; e < n; ++e) {
        // U_de and U_ed share the cross stencil, hence the factor 2.
        const double cc = 2.0 * a(d, e) / (4.0 * box.spacing(d) * box.spacing(e));
        const std::size_t sd = box.stride(d), se = box.stride(e);
        trip.push_back({idx, idx + sd + se, cc});
        trip.push_back({idx, idx - sd - se, cc});
        trip.push_back({idx, idx + sd - se, -cc});
        trip.push_back({idx, idx - sd + se, -cc});
      }
    }
    // First-order part: G^{ij} chi^{ij}_{p_s} times the gradient stencil.
    if (spec.chi.depends_on_p) {
      const auto dp = spec.chi.dp(x, u[idx], p);
      for (std::size_t s = 0; s < n; ++s) {
        const double b = a.dot(dp[s]) / (2.0 * box.spacing(s));
        if (b == 0.0) continue;
        trip.push_back({idx, idx + box.stride(s), b});
        trip.push_back({idx, idx - box.stride(s), -b});
      }
    }
    // Zeroth-order part: G^{ij} chi^{ij}_z.
    if (spec.chi.depends_on_z) center += a.dot(spec.chi.dz(x, u[idx], p));
    trip.push_back({idx, idx, center});
  }
  if (!bad.empty()) {
    throw AdmissibilityError("linearize: inadmissible nodes " + node_list(bad), {}, bad);
  }
  lin.jacobian = CsrMatrix::from_triplets(u.size(), u.size(), std::move(trip));
  return lin;
}

}  // namespace detail

/// Jacobian of u -> G(U[u]) - target at interior nodes, identity rows on the
/// boundary. Throws AdmissibilityError listing inadmissible nodes.
inline Linearization linearize(const GridFunction& u, const ProblemSpec& spec, std::span<const double> target,
                               double tau = 0.0) {
  return detail::linearize_cached(u, spec, detail::NodeCache(spec), target, tau);
}

/// Residual G(U[u]) - target (zero on the boundary).
inline ResidualEval residual_map(const GridFunction& u, const ProblemSpec& spec, std::span<const double> target,
                                 double tau = 0.0) {
  return detail::evaluate_residual(u, spec, detail::NodeCache(spec), target, tau);
}

struct NewtonResult {
  GridFunction u;
  int iterations = 0;  ///< accepted steps
  double residual = 0.0;
  double min_sigma_margin = 0.0;
  std::vector<IterationLogEntry> log;
};

namespace detail {

inline NewtonResult newton_cached(const GridFunction& u0, std::span<const double> target, const ProblemSpec& spec,
                                  const NodeCache& cache, const SolverOptions& opts, double t) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  NewtonResult out;
  out.u = u0;
  auto eval = evaluate_residual(out.u, spec, cache, target, opts.tau);
  if (!eval.admissible()) {
    throw AdmissibilityError("newton_solve: initial iterate inadmissible at nodes " + node_list(eval.inadmissible),
                             {}, eval.inadmissible);
  }
  double step = 0.0;
  for (int iter = 0;; ++iter) {
    out.log.push_back({t, iter, eval.max_residual, step, eval.min_sigma_margin, elapsed()});
    if (eval.max_residual <= opts.tol_newton) break;
    if (iter >= opts.max_newton) {
      throw NewtonFailure("newton_solve: no convergence in " + std::to_string(opts.max_newton) +
                          " iterations (residual " + std::to_string(eval.max_residual) + ")");
    }
    const auto lin = linearize_cached(out.u, spec, cache, target, opts.tau);
    std::vector<double> rhs(lin.residual.size());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = -lin.residual[i];
    const auto sol = solve_linear(lin.jacobian, rhs, opts.krylov);

    double s = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= opts.max_halvings; ++halving, s *= 0.5) {
      GridFunction trial = out.u;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] += s * sol.x[i];
      auto te = evaluate_residual(trial, spec, cache, target, opts.tau);
      if (te.admissible() && te.max_residual <= (1.0 - opts.armijo_beta * s) * eval.max_residual) {
        out.u = std::move(trial);
        eval = std::move(te);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw StepFailure("newton_solve: line search exhausted " + std::to_string(opts.max_halvings) + " halvings");
    }
    step = s;
    ++out.iterations;
  }
  out.residual = eval.max_residual;
  out.min_sigma_margin = eval.min_sigma_margin;
  return out;
}

}  // namespace detail

/// One continuation stage: damped Newton for G(U[u]) = target from u0.
inline NewtonResult newton_solve(const GridFunction& u0, std::span<const double> target, const ProblemSpec& spec,
                                 const SolverOptions& opts = {}, double t = 1.0) {
  return detail::newton_cached(u0, target, spec, detail::NodeCache(spec), opts, t);
}

/// G(U[u]) at interior nodes (zero elsewhere); throws SpecError when a node
/// is inadmissible.
inline std::vector<double> operator_field(const GridFunction& u, const ProblemSpec& spec) {
  const detail::NodeCache cache(spec);
  std::vector<double> g(u.size(), 0.0);
  for (std::size_t i = 0; i < cache.interior().size(); ++i) {
    const std::size_t idx = cache.interior()[i];
    try {
      g[idx] = eval_G_value(detail::node_U(u, spec.chi, idx, cache.point(i)), cache.params(i));
    } catch (const DomainError& e) {
      throw SpecError("node " + std::to_string(idx) + " inadmissible: " + e.what());
    }
  }
  return g;
}

/// Right-hand side alpha_{k-1} sampled on the grid.
inline std::vector<double> rhs_field(const ProblemSpec& spec) {
  std::vector<double> r(spec.box.size(), 0.0);
  for (std::size_t idx : spec.box.interior_nodes()) r[idx] = spec.rhs(spec.box.point(idx));
  return r;
}

/// Throws SpecError unless the subsolution matches phi exactly on the
/// boundary, is admissible at every interior node and satisfies
/// G(U_sub) >= alpha_{k-1} - 1e-12. Returns G(U_sub).
inline std::vector<double> check_subsolution(const ProblemSpec& spec) {
  const Box& box = spec.box;
  if (!(spec.subsolution.box() == box)) throw SpecError("subsolution grid differs from problem grid");
  if (spec.alphas.size() != static_cast<std::size_t>(spec.k - 1)) throw SpecError("expected k-1 alpha fields");
  if (spec.k < 2 || spec.k > static_cast<int>(box.dim())) throw SpecError("k <= n required");
  for (std::size_t idx : box.boundary_nodes()) {
    if (spec.subsolution[idx] != spec.boundary(box.point(idx))) {
      throw SpecError("subsolution differs from boundary data at node " + std::to_string(idx));
    }
  }
  const auto g = operator_field(spec.subsolution, spec);
  const auto rhs = rhs_field(spec);
  for (std::size_t idx : box.interior_nodes()) {
    if (g[idx] < rhs[idx] - 1e-12) {
      throw SpecError("subsolution condition fails at node " + std::to_string(idx) + ": G(U_sub) = " +
                      std::to_string(g[idx]) + " < alpha_{k-1} = " + std::to_string(rhs[idx]));
    }
  }
  return g;
}

struct ContinuationResult {
  GridFunction u;
  std::vector<ContinuationRecord> records;
  std::vector<IterationLogEntry> iterations;
  int total_newton = 0;
  /// Nodes where u < u_sub - 10 tol although chi_z >= 0 (discrete comparison
  /// is not guaranteed for this scheme; reported, not enforced).
  std::size_t comparison_violations = 0;
};

inline ContinuationResult continuity_solve(const ProblemSpec& spec, const SolverOptions& opts = {}) {
  const auto g_sub = check_subsolution(spec);
  const auto alpha = rhs_field(spec);
  const detail::NodeCache cache(spec);

  ContinuationResult out;
  out.u = spec.subsolution;
  {
    const auto e0 = detail::evaluate_residual(out.u, spec, cache, g_sub, 0.0);
    out.records.push_back({0.0, 0, e0.max_residual, norms(out.u), e0.min_sigma_margin});
  }
  double t = 0.0;
  double dt = opts.dt;
  std::vector<double> target(alpha.size());
  while (t < 1.0) {
    double t_next = t + dt;
    if (t_next > 1.0 - 1e-12) t_next = 1.0;
    for (std::size_t i = 0; i < target.size(); ++i) target[i] = (1.0 - t_next) * g_sub[i] + t_next * alpha[i];
    try {
      auto stage = detail::newton_cached(out.u, target, spec, cache, opts, t_next);
      out.u = std::move(stage.u);
      out.total_newton += stage.iterations;
      out.iterations.insert(out.iterations.end(), stage.log.begin(), stage.log.end());
      out.records.push_back({t_next, stage.iterations, stage.residual, norms(out.u), stage.min_sigma_margin});
      t = t_next;
      dt = std::min(opts.dt, 2.0 * dt);
    } catch (const SolverError&) {
      dt *= 0.5;
    } catch (const AdmissibilityError&) {
      dt *= 0.5;
    }
    if (t < 1.0 && dt < opts.dt_min) {
      throw ContinuationFailure("continuation step underflow at t = " + std::to_string(t), t);
    }
  }

  bool monotone_chi = true;
  if (spec.chi.depends_on_z) {
    for (std::size_t i = 0; i < cache.interior().size() && monotone_chi; ++i) {
      const std::size_t idx = cache.interior()[i];
      const auto dec = eigen(spec.chi.dz(cache.point(i), out.u[idx], gradient_at(out.u, idx)));
      monotone_chi = dec.eigenvalues[0] >= 0.0;
    }
  }
  if (monotone_chi) {
    for (std::size_t i = 0; i < out.u.size(); ++i) {
      if (out.u[i] < spec.subsolution[i] - 10.0 * opts.tol_newton) ++out.comparison_violations;
    }
  }
  return out;
}

/// Max nodal error against the manufactured solution.
inline double max_error(const GridFunction& u, const ScalarField& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) e = std::max(e, std::abs(u[i] - exact(u.box().point(i))));
  return e;
}

}  // namespace mixhess
