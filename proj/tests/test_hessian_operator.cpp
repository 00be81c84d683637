#include <gtest/gtest.h>

#include "mixhess/chi.hpp"
#include "mixhess/chi_validation.hpp"
#include "mixhess/hessian_operator.hpp"
#include "mixhess/properties.hpp"
#include "mixhess/sampling.hpp"
#include "oracles.hpp"

using namespace mixhess;

TEST(OperatorParams, Validation) {
  EXPECT_THROW((OperatorParams{3, 4, {0.1, 0.1, 0.1}}.validate()), DomainError);
  EXPECT_THROW((OperatorParams{3, 3, {0.1}}.validate()), DomainError);
  EXPECT_THROW((OperatorParams{3, 3, {-0.1, 0.1}}.validate()), DomainError);
  EXPECT_THROW((OperatorParams{3, 3, {0.0, 0.1}}.validate(true)), DomainError);
  EXPECT_NO_THROW((OperatorParams{3, 2, {0.0}}.validate()));
  EXPECT_FALSE((OperatorParams{3, 2, {0.5}}.paper_regime()));
  EXPECT_TRUE((OperatorParams{3, 3, {0.5, 0.5}}.paper_regime()));
}

TEST(EvalG, IdentityValues) {
  const auto e = eval_G(SymTensor::identity(3), {3, 3, {0.3, 0.1}});
  EXPECT_NEAR(e.value, 0.4 / 3.0, 1e-15);
  EXPECT_NEAR(e.value, 0.133333333333333333, 1e-15);
  EXPECT_DOUBLE_EQ(eval_G_value(SymTensor::identity(3), {3, 3, {0.0, 0.0}}), 1.0 / 3.0);
}

TEST(EvalG, QuotientIdentity) {
  const OperatorParams p{3, 3, {0.3, 0.1}};
  const auto e = eval_G(SymTensor::diagonal({1.0, 2.0, 3.0}), p);
  // sigma = (1, 6, 11, 6): G = (6 - 0.3 - 0.6) / 11.
  EXPECT_NEAR(e.value, 5.1 / 11.0, 1e-15);
  ASSERT_EQ(e.quotients.size(), 4u);
  double v = e.quotients[3];
  for (int l = 0; l < 2; ++l) v -= p.alphas[l] * e.quotients[l];
  EXPECT_NEAR(v, e.value, 1e-12 * std::abs(e.value));
}

TEST(EvalG, IsotropicGradientAtScaledIdentity) {
  for (double c : {0.5, 1.0, 3.0}) {
    const auto e = eval_G(SymTensor::scaled_identity(4, c), {4, 3, {0.2, 0.7}});
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        if (i == j) EXPECT_NEAR(e.gradient(i, j), e.gradient(0, 0), 1e-14);
        else EXPECT_NEAR(e.gradient(i, j), 0.0, 1e-14);
      }
    }
    EXPECT_GT(e.min_ellipticity, 0.0);
  }
}

TEST(EvalG, MatchesEnumerationOracle) {
  Rng rng(31);
  for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 3}, {4, 3}, {5, 4}, {4, 2}}) {
    for (int s = 0; s < 100; ++s) {
      const auto l = ConeSampler{}(k - 1, static_cast<std::size_t>(n), rng);
      std::vector<double> a;
      for (int j = 0; j + 1 < k; ++j) a.push_back(rng.uniform(0.0, 1.0));
      const OperatorParams p{n, k, a};
      const auto q = random_orthogonal(static_cast<std::size_t>(n), rng);
      const auto u = rotate_diagonal(l.values(), q);
      const auto e = eval_G(u, p);
      const double ref = oracle::G(l.vector(), k, a);
      EXPECT_NEAR(e.value, ref, 1e-10 * std::max(1.0, std::abs(ref)));
      auto f_ref = oracle::dG(e.eigenvalues.vector(), k, a);
      for (std::size_t m = 0; m < f_ref.size(); ++m) EXPECT_NEAR(e.dG_dlambda[m], f_ref[m], 1e-9 * std::max(1.0, std::abs(f_ref[m])));
    }
  }
}

TEST(EvalG, AdmissibilityError) {
  const OperatorParams p{3, 3, {0.3, 0.1}};
  try {
    (void)eval_G(SymTensor::diagonal({-1.0, -1.0, 1.0}), p);
    FAIL() << "expected AdmissibilityError";
  } catch (const AdmissibilityError& e) {
    ASSERT_EQ(e.sigmas().size(), 2u);
    EXPECT_DOUBLE_EQ(e.sigmas()[0], -1.0);
    EXPECT_DOUBLE_EQ(e.sigmas()[1], -1.0);
  }
  // Open cone: sigma_2 = 0 exactly is outside.
  EXPECT_THROW(eval_G(SymTensor::diagonal({1.0, 1.0, -0.5}), p), AdmissibilityError);
  // tau margin.
  EXPECT_NO_THROW(eval_G(SymTensor::diagonal({1.0, 1.0, -0.49}), p));
  EXPECT_THROW(eval_G(SymTensor::diagonal({1.0, 1.0, -0.49}), p, 0.1), AdmissibilityError);
}

TEST(TraceLowerBound, Values) {
  EXPECT_DOUBLE_EQ(trace_lower_bound({3, 3, {0, 0}}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(trace_lower_bound({5, 3, {0, 0}}), 1.0);
  for (int n = 2; n <= 6; ++n) EXPECT_DOUBLE_EQ(trace_lower_bound({n, n, std::vector<double>(n - 1, 0.0)}), 1.0 / n);
  // Equality for the pure quotient at the identity.
  EXPECT_NEAR(eval_G(SymTensor::identity(3), {3, 3, {0, 0}}).trace, 1.0 / 3.0, 1e-15);
}

TEST(ConcavityGap, Trivial) {
  Rng rng(32);
  const OperatorParams p{3, 3, {0.3, 0.1}};
  const auto u1 = random_admissible(3, 3, rng);
  const auto u2 = random_admissible(3, 3, rng);
  EXPECT_NEAR(concavity_gap(u1, u1, 0.3, p), 0.0, 1e-14);
  EXPECT_NEAR(concavity_gap(u1, u2, 0.0, p), 0.0, 1e-14);
  EXPECT_NEAR(concavity_gap(u1, u2, 1.0, p), 0.0, 1e-14);
  EXPECT_THROW(concavity_gap(u1, u2, 1.5, p), DomainError);
}

TEST(OperatorProperties, SeededSamples) {
  Rng rng(33);
  for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 3}, {5, 3}, {5, 4}}) {
    for (int s = 0; s < 300; ++s) {
      std::vector<double> a;
      for (int j = 0; j + 1 < k; ++j) a.push_back(rng.uniform(0.01, 1.0));
      const OperatorParams p{n, k, a};
      const auto u1 = random_admissible(static_cast<std::size_t>(n), k, rng);
      const auto u2 = random_admissible(static_cast<std::size_t>(n), k, rng);
      const auto e = eval_G(u1, p);
      EXPECT_GE(e.trace, trace_lower_bound(p) - 1e-10);
      EXPECT_GT(e.min_ellipticity, 0.0);
      EXPECT_GE(concavity_gap(u1, u2, 0.5, p), -1e-10);
      EXPECT_LE(operator_gradient_error(u1, p), 1e-6);
      const auto q = random_orthogonal(static_cast<std::size_t>(n), rng);
      EXPECT_NEAR(eval_G_value(rotate(u1, q), p), e.value, 1e-10);
    }
  }
}

TEST(DegeneracyProbe, Examples) {
  const auto path = degeneracy_path();
  const auto g = degeneracy_probe(path, {3, 3, {0.5, 0.5}});
  for (std::size_t i = path.size() / 2; i + 1 < g.size(); ++i) EXPECT_LT(g[i + 1], g[i]);
  EXPECT_LT(g.back(), -1e3);
  // Closed form along (1,1,t): G = (0.5 t - 1.5) / (1 + 2t).
  for (std::size_t i = 0; i < path.size(); i += 37) {
    const double t = path[i][2];
    EXPECT_NEAR(g[i], (0.5 * t - 1.5) / (1.0 + 2.0 * t), 1e-9 * std::abs(g[i]));
  }
  const auto q = degeneracy_probe(path, {3, 3, {0.0, 0.0}});
  EXPECT_LE(q.back(), 0.0);
  const std::vector<EigenvalueVector> flat(5, EigenvalueVector{1.0, 2.0, 3.0});
  const auto c = degeneracy_probe(flat, {3, 3, {0.3, 0.1}});
  for (double v : c) EXPECT_EQ(v, c[0]);
  const std::vector<EigenvalueVector> outside{EigenvalueVector{1.0, 1.0, -0.6}};
  EXPECT_THROW(degeneracy_probe(outside, {3, 3, {0.3, 0.1}}), DomainError);
}

TEST(ValidateChi, BuiltIns) {
  SamplePlan plan;
  const auto zero = validate_chi(ChiSpec::zero(3), plan);
  EXPECT_TRUE(zero.structure_ok());
  const auto lin = validate_chi(ChiSpec::linear_z(3), plan);
  EXPECT_TRUE(lin.structure_ok());
  const auto neg = validate_chi(ChiSpec::linear_z(3, -1.0), plan);
  EXPECT_TRUE(neg.passed("p-concavity"));
  EXPECT_FALSE(neg.passed("z-monotone"));

  auto quad = ChiSpec::neg_p_squared(3);
  quad.growth = GrowthBounds{1.0, 1.0, 1.0, 1.0};
  const auto rep = validate_chi(quad, plan);
  EXPECT_TRUE(rep.structure_ok());
  EXPECT_FALSE(rep.passed("growth-magnitude"));
  EXPECT_FALSE(rep.growth_ok());
  const auto j = rep.to_json();
  EXPECT_TRUE(j.contains("checks"));
}

TEST(ValidateChi, CallbackErrorsCarryCoordinates) {
  auto chi = ChiSpec::zero(3);
  chi.value = [](ChiSpec::Point, double, ChiSpec::Point) -> SymTensor { throw std::runtime_error("boom"); };
  try {
    (void)validate_chi(chi, SamplePlan{});
    FAIL() << "expected ChiCallbackError";
  } catch (const ChiCallbackError& e) {
    EXPECT_NE(std::string(e.what()).find("x="), std::string::npos) << e.what();
  }
}
