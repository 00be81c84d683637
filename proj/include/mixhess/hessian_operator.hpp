#pragma once

// The mixed Hessian operator in quotient form
//
//   G(U) = sigma_k(U)/sigma_{k-1}(U) - sum_{l=0}^{k-2} alpha_l sigma_l(U)/sigma_{k-1}(U),
//
// defined on U with lambda(U) in Gamma_{k-1}. The equation
// sigma_k = sum_{l<k} alpha_l sigma_l is equivalent to G(U) = alpha_{k-1}.

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mixhess/errors.hpp"
#include "mixhess/spectral.hpp"
#include "mixhess/sym_tensor.hpp"
#include "mixhess/symmetric_functions.hpp"

namespace mixhess {

/// Pointwise operator parameters: dimension, order and alpha_0..alpha_{k-2}.
struct OperatorParams {
  int n = 3;
  int k = 3;
  std::vector<double> alphas;  ///< alpha_0 .. alpha_{k-2}

  /// Nondegenerate regime: 3 <= k and every alpha_l strictly positive.
  bool paper_regime() const {
    return k >= 3 && std::all_of(alphas.begin(), alphas.end(), [](double a) { return a > 0.0; });
  }

  /// Throws DomainError on a structural violation. With require_positive the
  /// alphas must all be strictly positive.
  void validate(bool require_positive = false) const {
    if (k < 2) throw DomainError("OperatorParams: k >= 2 required");
    if (k > n) throw DomainError("OperatorParams: k <= n required");
    if (alphas.size() != static_cast<std::size_t>(k - 1)) {
      throw DomainError("OperatorParams: expected " + std::to_string(k - 1) + " alphas, got " +
                        std::to_string(alphas.size()));
    }
    for (double a : alphas) {
      if (!std::isfinite(a)) throw DomainError("OperatorParams: non-finite alpha");
      if (a < 0.0) throw DomainError("OperatorParams: alphas must be nonnegative");
      if (require_positive && !(a > 0.0)) throw DomainError("OperatorParams: alphas must be positive");
    }
  }
};

struct OperatorEval {
  double value = 0.0;              ///< G(U)
  SymTensor gradient;              ///< G^{ij} = dG/dU_ij
  std::vector<double> quotients;   ///< sigma_l / sigma_{k-1}, l = 0..k
  double min_ellipticity = 0.0;    ///< smallest eigenvalue of G^{ij}
  double trace = 0.0;              ///< sum_i G^{ii}
  EigenvalueVector eigenvalues;    ///< lambda(U), ascending
  std::vector<double> dG_dlambda;  ///< f_m = dG/dlambda_m, the eigenvalues of G^{ij}
  double sigma_margin = 0.0;       ///< min_{1<=i<=k-1} sigma_i(lambda(U))
};

namespace detail {

inline std::string format_sigmas(std::span<const double> s) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? ", " : "") << "sigma_" << i + 1 << "=" << s[i];
  return os.str();
}

/// G and dG/dlambda from eigenvalues. Throws AdmissibilityError unless
/// sigma_i(lambda) > tau for 1 <= i <= k-1.
inline double operator_from_eigenvalues(std::span<const double> lambda, const OperatorParams& p,
                                        double tau, std::vector<double>* quotients,
                                        std::vector<double>* f, double* margin) {
  const int k = p.k;
  const auto s = elementary_symmetric(lambda, k);
  double min_sigma = s[1];
  for (int i = 1; i <= k - 1; ++i) min_sigma = std::min(min_sigma, s[i]);
  if (!(min_sigma > tau)) {
    std::vector<double> head(s.begin() + 1, s.begin() + k);
    throw AdmissibilityError("lambda(U) outside Gamma_{k-1}: " + format_sigmas(head), head);
  }
  if (margin) *margin = min_sigma;

  const double sk1 = s[k - 1];
  double value = s[k] / sk1;
  for (int l = 0; l <= k - 2; ++l) value -= p.alphas[l] * s[l] / sk1;

  if (quotients) {
    quotients->resize(k + 1);
    for (int l = 0; l <= k; ++l) (*quotients)[l] = s[l] / sk1;
  }
  if (f) {
    const auto r = restricted_table(lambda, k - 1);
    const double denom = sk1 * sk1;
    f->resize(lambda.size());
    for (std::size_t m = 0; m < lambda.size(); ++m) {
      // d/dlambda_m of sigma_j/sigma_{k-1}, using d sigma_j/d lambda_m = sigma_{j-1}(lambda|m).
      auto dquot = [&](int j) {
        const double dnum = j >= 1 ? r[m][j - 1] : 0.0;
        return (dnum * sk1 - s[j] * r[m][k - 2]) / denom;
      };
      double fm = dquot(k);
      for (int l = 0; l <= k - 2; ++l) fm -= p.alphas[l] * dquot(l);
      (*f)[m] = fm;
    }
  }
  return value;
}

}  // namespace detail

/// Evaluate G, its matrix derivative and diagnostics. Requires
/// sigma_i(lambda(U)) > tau for i <= k-1 (tau = 0 is plain Gamma_{k-1}).
inline OperatorEval eval_G(const SymTensor& u, const OperatorParams& params, double tau = 0.0) {
  if (u.dim() != static_cast<std::size_t>(params.n)) throw DomainError("eval_G: tensor dimension != n");
  auto dec = eigen(u);
  OperatorEval out;
  out.value = detail::operator_from_eigenvalues(dec.eigenvalues.values(), params, tau, &out.quotients,
                                                &out.dG_dlambda, &out.sigma_margin);
  out.gradient = dec.compose(out.dG_dlambda);
  out.min_ellipticity = *std::min_element(out.dG_dlambda.begin(), out.dG_dlambda.end());
  out.trace = 0.0;
  for (double fm : out.dG_dlambda) out.trace += fm;
  out.eigenvalues = std::move(dec.eigenvalues);
  return out;
}

/// G value only.
inline double eval_G_value(const SymTensor& u, const OperatorParams& params, double tau = 0.0) {
  const auto dec = eigen(u);
  return detail::operator_from_eigenvalues(dec.eigenvalues.values(), params, tau, nullptr, nullptr, nullptr);
}

/// G from eigenvalues directly (no decomposition).
inline double eval_G_eigenvalues(std::span<const double> lambda, const OperatorParams& params) {
  return detail::operator_from_eigenvalues(lambda, params, 0.0, nullptr, nullptr, nullptr);
}

/// Lower bound (n-k+1)/k for sum_i G^{ii} on Gamma_{k-1} with alphas >= 0.
inline double trace_lower_bound(const OperatorParams& params) {
  return static_cast<double>(params.n - params.k + 1) / static_cast<double>(params.k);
}

/// G(t U1 + (1-t) U2) - [t G(U1) + (1-t) G(U2)]; nonnegative by concavity.
inline double concavity_gap(const SymTensor& u1, const SymTensor& u2, double t, const OperatorParams& params) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("concavity_gap: t must lie in [0, 1]");
  const double g1 = eval_G_value(u1, params);
  const double g2 = eval_G_value(u2, params);
  const double gm = eval_G_value(t * u1 + (1.0 - t) * u2, params);
  return gm - (t * g1 + (1.0 - t) * g2);
}

/// G along a path of eigenvalue vectors, each of which must lie in Gamma_{k-1}.
inline std::vector<double> degeneracy_probe(std::span<const EigenvalueVector> path, const OperatorParams& params) {
  std::vector<double> values;
  values.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (!in_cone(params.k - 1, path[i])) {
      throw DomainError("degeneracy_probe: path point " + std::to_string(i) + " is outside Gamma_{k-1}");
    }
    values.push_back(eval_G_eigenvalues(path[i].values(), params));
  }
  return values;
}

}  // namespace mixhess
