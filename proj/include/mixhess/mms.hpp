#pragma once

// Manufactured problems: pick u*, set alpha_{k-1} := G(D^2 u* + chi(x, u*, Du*))
// pointwise, phi := u*, and seed the continuation with u* itself or with a
// strict subsolution u* - eps * bump.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "mixhess/continuation.hpp"
#include "mixhess/expression.hpp"

namespace mixhess {

/// Exact U* = D^2 u* + chi(x, u*, Du*) at x; uses exact derivatives when the
/// field carries them and fourth-order differences otherwise.
inline SymTensor manufactured_U(const ScalarField& u_star, const ChiSpec& chi, std::span<const double> x) {
  SymTensor u = field_hessian(u_star, x);
  u += chi.value(x, u_star(x), field_gradient(u_star, x));
  return u;
}

/// Product bump prod_a 4 (x_a - lo_a)(hi_a - x_a) / (hi_a - lo_a)^2, which is
/// exactly zero on the box boundary and 1 at the centre.
inline double box_bump(const Box& box, std::span<const double> x) {
  double b = 1.0;
  for (std::size_t a = 0; a < box.dim(); ++a) {
    const double w = box.upper()[a] - box.lower()[a];
    b *= 4.0 * (x[a] - box.lower()[a]) * (box.upper()[a] - x[a]) / (w * w);
  }
  return b;
}

/// u* - eps * bump: equals u* bitwise on the boundary.
inline ScalarField bump_subsolution(const ScalarField& u_star, const Box& box, double eps) {
  return ScalarField::from_function(
      [u_star, box, eps](std::span<const double> x) { return u_star(x) - eps * box_bump(box, x); });
}

/// Build the manufactured problem. Throws SpecError when u* is inadmissible
/// at an interior grid node, or when the supplied subsolution is not one.
inline ProblemSpec mms_problem(const ScalarField& u_star, const ChiSpec& chi, int k,
                               const std::vector<ScalarField>& alphas, const Box& box,
                               const std::optional<ScalarField>& subsolution = std::nullopt,
                               std::string name = "mms") {
  ProblemSpec spec;
  spec.name = std::move(name);
  spec.box = box;
  spec.k = k;
  spec.alphas = alphas;
  spec.chi = chi;
  spec.boundary = u_star;
  spec.exact = u_star;
  if (static_cast<int>(box.dim()) < k || k < 2) throw SpecError("k <= n required");
  if (alphas.size() != static_cast<std::size_t>(k - 1)) throw SpecError("expected k-1 alpha fields");
  if (chi.n != box.dim()) throw SpecError("chi dimension differs from box dimension");

  auto params_at = [n = static_cast<int>(box.dim()), k, alphas](std::span<const double> x) {
    OperatorParams p{n, k, {}};
    for (const auto& a : alphas) p.alphas.push_back(a(x));
    return p;
  };
  spec.rhs = ScalarField::from_function([u_star, chi, params_at](std::span<const double> x) {
    return eval_G_value(manufactured_U(u_star, chi, x), params_at(x));
  });

  for (std::size_t idx : box.interior_nodes()) {
    const auto x = box.point(idx);
    try {
      (void)eval_G_value(manufactured_U(u_star, chi, x), params_at(x));
    } catch (const DomainError& e) {
      throw SpecError("manufactured solution inadmissible at node " + std::to_string(idx) + ": " + e.what());
    }
  }

  spec.subsolution = GridFunction::sample(box, subsolution ? subsolution->value : u_star.value);
  return spec;
}

struct ConvergenceLevel {
  int count = 0;
  double h = 0.0;
  double error = 0.0;
  double order = NAN;  ///< log2-type rate against the previous level
  int newton_iterations = 0;
};

/// Solve on each grid and measure the observed order between consecutive levels.
template <class MakeSpec>
std::vector<ConvergenceLevel> convergence_study(MakeSpec&& make_spec, const std::vector<int>& counts,
                                                const SolverOptions& opts) {
  std::vector<ConvergenceLevel> levels;
  for (int c : counts) {
    const ProblemSpec spec = make_spec(c);
    if (!spec.exact) throw SpecError("convergence study needs a manufactured solution");
    const auto res = continuity_solve(spec, opts);
    ConvergenceLevel lvl;
    lvl.count = c;
    lvl.h = spec.box.spacing(0);
    lvl.error = max_error(res.u, *spec.exact);
    lvl.newton_iterations = res.total_newton;
    if (!levels.empty()) {
      lvl.order = std::log(levels.back().error / lvl.error) / std::log(levels.back().h / lvl.h);
    }
    levels.push_back(lvl);
  }
  return levels;
}

}  // namespace mixhess
