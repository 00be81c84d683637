#include <gtest/gtest.h>

#include <numbers>
#include <sstream>

#include "mixhess/chi.hpp"
#include "mixhess/expression.hpp"
#include "mixhess/grid.hpp"
#include "mixhess/grid_io.hpp"

using namespace mixhess;

TEST(Box, Invariants) {
  EXPECT_THROW(Box({0.0}, {1.0}, {4}), DomainError);
  EXPECT_THROW(Box({0.0, 1.0}, {1.0, 1.0}, {5, 5}), DomainError);
  EXPECT_THROW(Box({0.0, 0.0}, {1.0}, {5, 5}), DomainError);
  const Box b({0.0, -1.0}, {1.0, 1.0}, {5, 9});
  EXPECT_EQ(b.size(), 45u);
  EXPECT_DOUBLE_EQ(b.spacing(0), 0.25);
  EXPECT_DOUBLE_EQ(b.spacing(1), 0.25);
  EXPECT_EQ(b.point(44)[0], 1.0);
  EXPECT_EQ(b.point(44)[1], 1.0);
  EXPECT_EQ(b.interior_nodes().size(), 3u * 7u);
  EXPECT_EQ(b.boundary_nodes().size(), 45u - 21u);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto mi = b.multi_index(i);
    EXPECT_EQ(b.linear_index(mi), i);
  }
}

TEST(Gradient, ConstantLinearQuadratic) {
  const Box box = Box::cube(3, -1.0, 1.0, 7);
  const auto c = GridFunction::sample(box, [](auto) { return 4.2; });
  const auto lin = GridFunction::sample(box, [](auto x) { return 0.5 * x[0] - 2.0 * x[1] + 3.0 * x[2]; });
  for (std::size_t idx : box.interior_nodes()) {
    for (double g : gradient_at(c, idx)) EXPECT_EQ(g, 0.0);
    const auto g = gradient_at(lin, idx);
    EXPECT_NEAR(g[0], 0.5, 1e-13);
    EXPECT_NEAR(g[1], -2.0, 1e-13);
    EXPECT_NEAR(g[2], 3.0, 1e-13);
  }
  const Box unit = Box::cube(2, 0.0, 1.0, 5);
  const auto sq = GridFunction::sample(unit, [](auto x) { return x[0] * x[0]; });
  const std::vector<int> at{2, 2};
  EXPECT_DOUBLE_EQ(gradient_at(sq, std::span<const int>(at))[0], 1.0);
}

TEST(Gradient, BoundaryRejected) {
  const Box box = Box::cube(2, 0.0, 1.0, 5);
  const GridFunction f(box);
  EXPECT_THROW(gradient_at(f, 0), DomainError);
  EXPECT_THROW(hessian_at(f, 4), DomainError);
}

TEST(Hessian, ExactOnQuadratics) {
  const Box box({-1.0, 0.0, -2.0}, {1.0, 2.0, 1.0}, {7, 9, 11});
  const SymTensor a{{2.0, 0.5, -1.0}, {0.5, 1.0, 0.25}, {-1.0, 0.25, 3.0}};
  const auto f = GridFunction::sample(box, [&](auto x) {
    double s = 0.7 * x[0] - 0.1;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 3; ++j) s += 0.5 * x[i] * a(i, j) * x[j];
    }
    return s;
  });
  for (std::size_t idx : box.interior_nodes()) EXPECT_LE(max_abs_diff(hessian_at(f, idx), a), 1e-11);
  const auto c = GridFunction::sample(box, [](auto) { return -3.0; });
  for (std::size_t idx : box.interior_nodes()) EXPECT_EQ(hessian_at(c, idx).frobenius_norm(), 0.0);
}

TEST(Hessian, SecondOrderOnSine) {
  // d^2/dx^2 sin(pi x) at x = 0.5 on [0,1] with h and h/2.
  auto err = [](int count) {
    const Box box = Box::cube(2, 0.0, 1.0, count);
    const auto f = GridFunction::sample(box, [](auto x) { return std::sin(std::numbers::pi * x[0]) * (1.0 + x[1]); });
    const std::vector<int> mid{(count - 1) / 2, (count - 1) / 2};
    const double exact = -std::numbers::pi * std::numbers::pi * std::sin(std::numbers::pi * 0.5) * 1.5;
    return std::abs(hessian_at(f, std::span<const int>(mid))(0, 0) - exact);
  };
  const double ratio = err(9) / err(17);
  EXPECT_NEAR(ratio, 4.0, 0.2);
  const double order = std::log2(ratio);
  EXPECT_GE(order, 1.7);
  EXPECT_LE(order, 2.3);
}

TEST(AssembleU, Examples) {
  const Box box = Box::cube(3, -1.0, 1.0, 5);
  const auto q = GridFunction::sample(box, [](auto x) { return 0.5 * (x[0] * x[0] + 2 * x[1] * x[1] + 3 * x[2] * x[2]); });
  const std::size_t idx = box.interior_nodes()[7];
  const auto h = hessian_at(q, idx);
  EXPECT_LE(max_abs_diff(assemble_U(q, ChiSpec::zero(3), idx), h), 0.0);
  const auto with_z = assemble_U(q, ChiSpec::linear_z(3), idx);
  EXPECT_LE(max_abs_diff(with_z, SymTensor::diagonal({1.0, 2.0, 3.0}) + SymTensor::scaled_identity(3, q[idx])), 1e-12);
  const auto with_c = assemble_U(q, ChiSpec::constant(SymTensor::identity(3)), idx);
  EXPECT_LE(max_abs_diff(with_c, h + SymTensor::identity(3)), 0.0);
}

TEST(Norms, Examples) {
  const Box unit = Box::cube(3, 0.0, 1.0, 9);
  const auto zero = norms(GridFunction(unit));
  EXPECT_EQ(zero.c0, 0.0);
  EXPECT_EQ(zero.c1, 0.0);
  EXPECT_EQ(zero.c2, 0.0);
  const auto x1 = norms(GridFunction::sample(unit, [](auto x) { return x[0]; }));
  EXPECT_EQ(x1.c0, 1.0);
  EXPECT_NEAR(x1.c1, 1.0, 1e-14);
  EXPECT_NEAR(x1.c2, 0.0, 1e-12);

  // |x|^2/2 on [-1,1]^3: c0 from the corners; c1 is attained at the outermost
  // interior nodes, |x| = sqrt(3) (1 - h).
  const Box cube = Box::cube(3, -1.0, 1.0, 17);
  const auto q = norms(GridFunction::sample(cube, [](auto x) { return 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }));
  EXPECT_DOUBLE_EQ(q.c0, 1.5);
  EXPECT_NEAR(q.c1, std::sqrt(3.0) * (1.0 - 0.125), 1e-13);
  EXPECT_NEAR(q.c2, 1.0, 1e-12);
}

TEST(GridFunction, BoundaryValuesExact) {
  const Box box({-1.0, 0.0}, {2.0, 0.7}, {11, 13});
  auto phi = [](std::span<const double> x) { return std::exp(x[0]) * std::cos(3.0 * x[1]); };
  const auto f = GridFunction::sample(box, phi);
  for (std::size_t idx : box.boundary_nodes()) EXPECT_EQ(f[idx], phi(box.point(idx)));
  EXPECT_THROW(GridFunction(box, std::vector<double>(3)), DomainError);
  EXPECT_THROW(GridFunction(box, std::vector<double>(box.size(), NAN)), DomainError);
}

TEST(GridIo, TextRoundTrip) {
  const Box box({-1.0, 0.0, 0.5}, {1.0, 0.3, 2.0}, {5, 6, 7});
  const auto f = GridFunction::sample(box, [](auto x) { return std::sin(x[0]) + x[1] / 3.0 - x[2] * 1e-7; });
  std::stringstream ss;
  write_text_dump(ss, f, 3);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header.substr(0, 14), "3 3 5 6 7 -1 0");
  const auto back = read_text_dump(ss);
  EXPECT_EQ(back.k, 3);
  EXPECT_TRUE(back.function.box() == box);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back.function[i], f[i]);
}

TEST(GridIo, JsonRoundTrip) {
  const Box box = Box::cube(2, -1.0, 1.0, 5);
  const auto f = GridFunction::sample(box, [](auto x) { return x[0] * x[1] + 1.0 / 3.0; });
  const auto j = to_json(f, 2);
  const auto back = grid_from_json(nlohmann::json::parse(j.dump()));
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_EQ(back.function[i], f[i]);
}

TEST(GridIo, MalformedInput) {
  std::stringstream empty;
  EXPECT_THROW(read_text_dump(empty), SpecError);
  std::stringstream short_body("2 2 5 5 0 0 1 1\n1\n2\n");
  EXPECT_THROW(read_text_dump(short_body), SpecError);
}

TEST(Expression, ParseAndDifferentiate) {
  const auto f = ScalarField::from_expression("(x1^2 + x2^2 + x3^2)/2 + 0.05*sin(x1)*sin(x2)*sin(x3)", 3);
  const std::vector<double> x{0.3, -0.2, 0.7};
  const double v = 0.5 * (0.09 + 0.04 + 0.49) + 0.05 * std::sin(0.3) * std::sin(-0.2) * std::sin(0.7);
  EXPECT_NEAR(f(x), v, 1e-15);
  const auto g = f.gradient(x);
  EXPECT_NEAR(g[0], 0.3 + 0.05 * std::cos(0.3) * std::sin(-0.2) * std::sin(0.7), 1e-15);
  const auto h = f.hessian(x);
  EXPECT_NEAR(h(0, 0), 1.0 - 0.05 * std::sin(0.3) * std::sin(-0.2) * std::sin(0.7), 1e-15);
  EXPECT_NEAR(h(0, 1), 0.05 * std::cos(0.3) * std::cos(-0.2) * std::sin(0.7), 1e-15);
  const auto fd = fd_hessian(f.value, x);
  EXPECT_LE(max_abs_diff(fd, h), 1e-8);
}

TEST(Expression, Grammar) {
  const std::vector<double> x{2.0, -3.0};
  EXPECT_DOUBLE_EQ(Expr::parse("x^2 - y", 2)(x), 7.0);
  EXPECT_DOUBLE_EQ(Expr::parse("|y| + abs(x)", 2)(x), 5.0);
  EXPECT_DOUBLE_EQ(Expr::parse("-x^2", 2)(x), -4.0);
  EXPECT_DOUBLE_EQ(Expr::parse("exp(0)*cos(0) + 2*pi/pi", 2)(x), 3.0);
  EXPECT_DOUBLE_EQ(Expr::parse("1.5e1", 2)(x), 15.0);
  EXPECT_TRUE(Expr::parse("3*2", 2).is_constant());
  EXPECT_THROW(Expr::parse("x3", 2), ConfigError);
  EXPECT_THROW(Expr::parse("x +", 2), ConfigError);
  EXPECT_THROW(Expr::parse("foo(x)", 2), ConfigError);
  EXPECT_THROW(Expr::parse("x^y", 2), ConfigError);
  EXPECT_THROW(Expr::parse("(x", 2), ConfigError);
}
