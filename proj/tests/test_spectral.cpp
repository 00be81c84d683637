#include <gtest/gtest.h>

#include "mixhess/random.hpp"
#include "mixhess/sampling.hpp"
#include "mixhess/spectral.hpp"
#include "oracles.hpp"

using namespace mixhess;

namespace {

double orthonormality_error(const SpectralDecomposition& d) {
  const std::size_t n = d.dim();
  double e = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += d.vector(i, a) * d.vector(i, b);
      e = std::max(e, std::abs(s - (a == b ? 1.0 : 0.0)));
    }
  }
  return e;
}

}  // namespace

TEST(SymTensor, Invariants) {
  EXPECT_THROW(SymTensor(2, {1.0, 2.0, 3.0, 4.0}), DomainError);
  EXPECT_THROW(SymTensor(2, {1.0, NAN, NAN, 4.0}), DomainError);
  SymTensor t(3);
  t.set(0, 2, 5.0);
  EXPECT_EQ(t(2, 0), 5.0);
  t.add(2, 0, 1.0);
  EXPECT_EQ(t(0, 2), 6.0);
  EXPECT_EQ(SymTensor::identity(3).trace(), 3.0);
}

TEST(Eigen, Identity) {
  const auto d = eigen(SymTensor::identity(4));
  EXPECT_EQ(d.eigenvalues.vector(), std::vector<double>(4, 1.0));
}

TEST(Eigen, DiagonalGivesAxes) {
  const auto d = eigen(SymTensor::diagonal({3.0, 1.0, 2.0}));
  EXPECT_EQ(d.eigenvalues.vector(), (std::vector<double>{1.0, 2.0, 3.0}));
  // Column m is +-e_{original index}.
  EXPECT_EQ(std::abs(d.vector(1, 0)), 1.0);
  EXPECT_EQ(std::abs(d.vector(2, 1)), 1.0);
  EXPECT_EQ(std::abs(d.vector(0, 2)), 1.0);
}

TEST(Eigen, BlockExample) {
  const SymTensor w{{2, 1, 0}, {1, 2, 0}, {0, 0, 5}};
  const auto d = eigen(w);
  EXPECT_NEAR(d.eigenvalues[0], 1.0, 1e-14);
  EXPECT_NEAR(d.eigenvalues[1], 3.0, 1e-14);
  EXPECT_NEAR(d.eigenvalues[2], 5.0, 1e-14);
}

TEST(Eigen, NonFiniteRejected) {
  SymTensor w(2);
  w.set(0, 0, INFINITY);
  EXPECT_THROW(eigen(w), DomainError);
}

TEST(Eigen, ReconstructionAndOrthonormality) {
  Rng rng(21);
  for (int s = 0; s < 1000; ++s) {
    const std::size_t n = 2 + rng.index(5);
    const auto w = random_symmetric(n, rng, 3.0);
    const auto d = eigen(w);
    EXPECT_LE((d.reconstruct() - w).frobenius_norm(), 1e-12 * std::max(1.0, w.frobenius_norm()));
    EXPECT_LE(orthonormality_error(d), 1e-12);
    for (std::size_t i = 1; i < n; ++i) EXPECT_LE(d.eigenvalues[i - 1], d.eigenvalues[i]);
  }
}

TEST(Eigen, MatchesClosedForm3x3) {
  Rng rng(22);
  for (int s = 0; s < 300; ++s) {
    const auto w = random_symmetric(3, rng, 2.0);
    double a[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) a[i][j] = w(i, j);
    }
    const auto ref = oracle::eig3(a);
    const auto d = eigen(w);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(d.eigenvalues[i], ref[i], 1e-10 * std::max(1.0, w.frobenius_norm()));
  }
}

TEST(Eigen, TraceAndDeterminant) {
  Rng rng(23);
  for (int s = 0; s < 300; ++s) {
    const auto w = random_symmetric(3, rng, 2.0);
    const auto d = eigen(w);
    double sum = 0.0, prod = 1.0;
    for (double l : d.eigenvalues) {
      sum += l;
      prod *= l;
    }
    const double det = w(0, 0) * (w(1, 1) * w(2, 2) - w(1, 2) * w(2, 1)) - w(0, 1) * (w(1, 0) * w(2, 2) - w(1, 2) * w(2, 0)) +
                       w(0, 2) * (w(1, 0) * w(2, 1) - w(1, 1) * w(2, 0));
    const double scale = std::max(1.0, w.frobenius_norm());
    EXPECT_NEAR(sum, w.trace(), 1e-10 * scale);
    EXPECT_NEAR(prod, det, 1e-10 * scale * scale * scale);
  }
}

TEST(Eigen, Deterministic) {
  Rng rng(24);
  const auto w = random_symmetric(5, rng);
  const auto a = eigen(w), b = eigen(w);
  EXPECT_EQ(a.eigenvalues.vector(), b.eigenvalues.vector());
  EXPECT_EQ(a.vectors, b.vectors);
}

TEST(MetricSqrtInverse, Examples) {
  EXPECT_LE(max_abs_diff(metric_sqrt_inverse(SymTensor::identity(3)), SymTensor::identity(3)), 1e-15);
  EXPECT_LE(max_abs_diff(metric_sqrt_inverse(SymTensor::scaled_identity(3, 4.0)), SymTensor::scaled_identity(3, 0.5)), 1e-15);
  const auto g = metric_sqrt_inverse(SymTensor::diagonal({1.0, 4.0, 9.0}));
  EXPECT_LE(max_abs_diff(g, SymTensor::diagonal({1.0, 0.5, 1.0 / 3.0})), 1e-15);
}

TEST(MetricSqrtInverse, SquaresToInverse) {
  Rng rng(25);
  for (int s = 0; s < 100; ++s) {
    const auto q = random_orthogonal(3, rng);
    const auto l = rng.uniform_vector(3, 0.5, 4.0);
    const auto g = rotate_diagonal(l, q);
    const auto gamma = metric_sqrt_inverse(g);
    const auto prod = congruence(gamma, g);  // gamma g gamma = identity
    EXPECT_LE(max_abs_diff(prod, SymTensor::identity(3)), 1e-12);
  }
}

TEST(MetricSqrtInverse, RejectsNonPositive) {
  EXPECT_THROW(metric_sqrt_inverse(SymTensor::diagonal({1.0, 0.0, 2.0})), DomainError);
  EXPECT_THROW(metric_sqrt_inverse(SymTensor::diagonal({1.0, -1.0})), DomainError);
  EXPECT_THROW(metric_sqrt_inverse(SymTensor::diagonal({1.0, 1e-13})), DomainError);
}

TEST(EigenWrtMetric, Examples) {
  Rng rng(26);
  const auto w = random_symmetric(4, rng);
  const auto a = eigen_wrt_metric(w, SymTensor::identity(4));
  const auto b = eigen(w);
  EXPECT_EQ(a.eigenvalues.vector(), b.eigenvalues.vector());
  EXPECT_EQ(a.vectors, b.vectors);

  const auto g = SymTensor::diagonal({2.0, 3.0, 5.0});
  for (double l : eigen_wrt_metric(g, g).eigenvalues) EXPECT_NEAR(l, 1.0, 1e-15);
  for (double l : eigen_wrt_metric(SymTensor::scaled_identity(3, 2.0), SymTensor::scaled_identity(3, 4.0)).eigenvalues) {
    EXPECT_NEAR(l, 0.5, 1e-15);
  }
}
