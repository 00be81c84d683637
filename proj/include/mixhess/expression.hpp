#pragma once

// Closed-form coefficient fields over x = (x1, ..., xn).
//
// Grammar:
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          exponent must be constant
//   primary := number | 'pi' | var | func '(' expr ')' | '(' expr ')' | '|' expr '|'
//   var     := 'x1'..'x9', or 'x', 'y', 'z', 'w' for axes 1..4
//   func    := sin | cos | exp | abs
//
// Expressions are differentiated symbolically, so fields built from them
// carry exact gradients and Hessians.

#include <cctype>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixhess/errors.hpp"
#include "mixhess/sym_tensor.hpp"

namespace mixhess {

class Expr {
 public:
  enum class Kind { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Abs, Sign };

  static Expr constant(double c) { return Expr(std::make_shared<Node>(Node{Kind::Const, c, 0, {}, {}})); }
  static Expr variable(std::size_t axis) { return Expr(std::make_shared<Node>(Node{Kind::Var, 0.0, axis, {}, {}})); }

  static Expr parse(const std::string& text, std::size_t n);

  double operator()(std::span<const double> x) const { return eval(*node_, x); }

  Expr derivative(std::size_t axis) const { return Expr(diff(node_, axis)); }

  bool is_constant() const { return node_->kind == Kind::Const; }
  double constant_value() const { return node_->value; }

 private:
  struct Node;
  using Ptr = std::shared_ptr<const Node>;
  struct Node {
    Kind kind;
    double value;
    std::size_t axis;
    Ptr a, b;
  };

  explicit Expr(Ptr p) : node_(std::move(p)) {}

  static Ptr make(Kind k, Ptr a, Ptr b = nullptr) {
    // Light constant folding keeps derivative trees small.
    const bool ca = a && a->kind == Kind::Const;
    const bool cb = b && b->kind == Kind::Const;
    auto c = [](double v) { return std::make_shared<const Node>(Node{Kind::Const, v, 0, {}, {}}); };
    switch (k) {
      case Kind::Add:
        if (ca && a->value == 0.0) return b;
        if (cb && b->value == 0.0) return a;
        if (ca && cb) return c(a->value + b->value);
        break;
      case Kind::Sub:
        if (cb && b->value == 0.0) return a;
        if (ca && cb) return c(a->value - b->value);
        if (ca && a->value == 0.0) return make(Kind::Neg, b);
        break;
      case Kind::Mul:
        if ((ca && a->value == 0.0) || (cb && b->value == 0.0)) return c(0.0);
        if (ca && a->value == 1.0) return b;
        if (cb && b->value == 1.0) return a;
        if (ca && cb) return c(a->value * b->value);
        break;
      case Kind::Div:
        if (ca && a->value == 0.0) return c(0.0);
        if (cb && b->value == 1.0) return a;
        break;
      case Kind::Neg:
        if (ca) return c(-a->value);
        break;
      default:
        break;
    }
    return std::make_shared<const Node>(Node{k, 0.0, 0, std::move(a), std::move(b)});
  }

  static double eval(const Node& n, std::span<const double> x) {
    switch (n.kind) {
      case Kind::Const: return n.value;
      case Kind::Var: return x[n.axis];
      case Kind::Add: return eval(*n.a, x) + eval(*n.b, x);
      case Kind::Sub: return eval(*n.a, x) - eval(*n.b, x);
      case Kind::Mul: return eval(*n.a, x) * eval(*n.b, x);
      case Kind::Div: return eval(*n.a, x) / eval(*n.b, x);
      case Kind::Pow: {
        const double e = n.b->value;
        const double base = eval(*n.a, x);
        if (e == 2.0) return base * base;
        return std::pow(base, e);
      }
      case Kind::Neg: return -eval(*n.a, x);
      case Kind::Sin: return std::sin(eval(*n.a, x));
      case Kind::Cos: return std::cos(eval(*n.a, x));
      case Kind::Exp: return std::exp(eval(*n.a, x));
      case Kind::Abs: return std::abs(eval(*n.a, x));
      case Kind::Sign: {
        const double v = eval(*n.a, x);
        return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      }
    }
    return 0.0;
  }

  static Ptr diff(const Ptr& n, std::size_t axis) {
    auto c = [](double v) { return std::make_shared<const Node>(Node{Kind::Const, v, 0, {}, {}}); };
    switch (n->kind) {
      case Kind::Const: return c(0.0);
      case Kind::Var: return c(n->axis == axis ? 1.0 : 0.0);
      case Kind::Add: return make(Kind::Add, diff(n->a, axis), diff(n->b, axis));
      case Kind::Sub: return make(Kind::Sub, diff(n->a, axis), diff(n->b, axis));
      case Kind::Mul:
        return make(Kind::Add, make(Kind::Mul, diff(n->a, axis), n->b), make(Kind::Mul, n->a, diff(n->b, axis)));
      case Kind::Div: {
        // (a' b - a b') / b^2
        auto num = make(Kind::Sub, make(Kind::Mul, diff(n->a, axis), n->b), make(Kind::Mul, n->a, diff(n->b, axis)));
        return make(Kind::Div, num, make(Kind::Pow, n->b, c(2.0)));
      }
      case Kind::Pow: {
        const double e = n->b->value;
        auto lowered = e - 1.0 == 1.0 ? n->a : (e - 1.0 == 0.0 ? c(1.0) : make(Kind::Pow, n->a, c(e - 1.0)));
        return make(Kind::Mul, make(Kind::Mul, c(e), lowered), diff(n->a, axis));
      }
      case Kind::Neg: return make(Kind::Neg, diff(n->a, axis));
      case Kind::Sin: return make(Kind::Mul, make(Kind::Cos, n->a), diff(n->a, axis));
      case Kind::Cos: return make(Kind::Neg, make(Kind::Mul, make(Kind::Sin, n->a), diff(n->a, axis)));
      case Kind::Exp: return make(Kind::Mul, n, diff(n->a, axis));
      case Kind::Abs: return make(Kind::Mul, make(Kind::Sign, n->a), diff(n->a, axis));
      case Kind::Sign: return c(0.0);
    }
    return c(0.0);
  }

  class Parser;
  Ptr node_;
};

class Expr::Parser {
 public:
  Parser(const std::string& text, std::size_t n) : s_(text), n_(n) {}

  Ptr parse() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression '" + s_ + "' at column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char ch) {
    if (!accept(ch)) fail(std::string("expected '") + ch + "'");
  }

  Ptr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Kind::Add, lhs, term());
      else if (accept('-')) lhs = make(Kind::Sub, lhs, term());
      else return lhs;
    }
  }

  Ptr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Kind::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Kind::Div, lhs, unary());
      else return lhs;
    }
  }

  Ptr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  Ptr power() {
    auto base = primary();
    if (accept('^')) {
      auto e = unary();
      if (e->kind != Kind::Const) fail("exponent must be a constant");
      return std::make_shared<const Node>(Node{Kind::Pow, 0.0, 0, base, e});
    }
    return base;
  }

  Ptr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char ch = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      return std::make_shared<const Node>(Node{Kind::Const, v, 0, {}, {}});
    }
    if (accept('(')) {
      auto e = expr();
      expect(')');
      return e;
    }
    if (accept('|')) {
      auto e = expr();
      expect('|');
      return make(Kind::Abs, e);
    }
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "pi") return std::make_shared<const Node>(Node{Kind::Const, std::numbers::pi, 0, {}, {}});
      for (auto [name, kind] : {std::pair{"sin", Kind::Sin}, std::pair{"cos", Kind::Cos},
                                std::pair{"exp", Kind::Exp}, std::pair{"abs", Kind::Abs}}) {
        if (id == name) {
          expect('(');
          auto e = expr();
          expect(')');
          return make(kind, e);
        }
      }
      std::optional<std::size_t> axis;
      if (id.size() == 2 && id[0] == 'x' && id[1] >= '1' && id[1] <= '9') axis = static_cast<std::size_t>(id[1] - '1');
      else if (id == "x") axis = 0;
      else if (id == "y") axis = 1;
      else if (id == "z") axis = 2;
      else if (id == "w") axis = 3;
      if (!axis) {
        pos_ = start;
        fail("unknown identifier '" + id + "'");
      }
      if (*axis >= n_) {
        pos_ = start;
        fail("variable '" + id + "' exceeds dimension " + std::to_string(n_));
      }
      return std::make_shared<const Node>(Node{Kind::Var, 0.0, *axis, {}, {}});
    }
    fail("unexpected '" + std::string(1, ch) + "'");
  }

  std::string s_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

inline Expr Expr::parse(const std::string& text, std::size_t n) { return Expr(Parser(text, n).parse()); }

/// Scalar field on R^n, optionally with exact first and second derivatives.
struct ScalarField {
  using Fn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<std::vector<double>(std::span<const double>)>;
  using HessFn = std::function<SymTensor(std::span<const double>)>;

  Fn value;
  GradFn gradient;  ///< may be empty
  HessFn hessian;   ///< may be empty
  std::optional<double> constant;  ///< set when the field is a constant
  std::string text;                ///< source expression, if any

  double operator()(std::span<const double> x) const { return value(x); }
  bool has_derivatives() const { return static_cast<bool>(gradient) && static_cast<bool>(hessian); }

  static ScalarField from_constant(double c, std::size_t n) {
    ScalarField f;
    f.value = [c](std::span<const double>) { return c; };
    f.gradient = [n](std::span<const double>) { return std::vector<double>(n, 0.0); };
    f.hessian = [n](std::span<const double>) { return SymTensor(n); };
    f.constant = c;
    return f;
  }

  static ScalarField from_expression(const std::string& text, std::size_t n) {
    const Expr e = Expr::parse(text, n);
    if (e.is_constant()) {
      auto f = from_constant(e.constant_value(), n);
      f.text = text;
      return f;
    }
    std::vector<Expr> d1;
    std::vector<Expr> d2;  // upper triangle, row-major
    for (std::size_t i = 0; i < n; ++i) d1.push_back(e.derivative(i));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) d2.push_back(d1[i].derivative(j));
    }
    ScalarField f;
    f.text = text;
    f.value = [e](std::span<const double> x) { return e(x); };
    f.gradient = [d1](std::span<const double> x) {
      std::vector<double> g(d1.size());
      for (std::size_t i = 0; i < d1.size(); ++i) g[i] = d1[i](x);
      return g;
    };
    f.hessian = [d2, n](std::span<const double> x) {
      SymTensor h(n);
      std::size_t c = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) h.set(i, j, d2[c++](x));
      }
      return h;
    };
    return f;
  }

  /// Bare callback; derivatives fall back to finite differences where needed.
  static ScalarField from_function(Fn fn) {
    ScalarField f;
    f.value = std::move(fn);
    return f;
  }
};

/// Fourth-order central differences for fields without exact derivatives.
inline std::vector<double> fd_gradient(const ScalarField::Fn& f, std::span<const double> x, double h = 1e-3) {
  std::vector<double> g(x.size());
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto at = [&](double d) {
      y[i] = x[i] + d;
      const double v = f(y);
      y[i] = x[i];
      return v;
    };
    g[i] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
  }
  return g;
}

inline SymTensor fd_hessian(const ScalarField::Fn& f, std::span<const double> x, double h = 1e-3) {
  const std::size_t n = x.size();
  SymTensor out(n);
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    auto at = [&](double d) {
      y[i] = x[i] + d;
      const double v = f(y);
      y[i] = x[i];
      return v;
    };
    const double f0 = f(x);
    out.set(i, i, (-at(2 * h) + 16 * at(h) - 30 * f0 + 16 * at(-h) - at(-2 * h)) / (12 * h * h));
    for (std::size_t j = i + 1; j < n; ++j) {
      // Fourth-order mixed derivative from the gradient stencil applied twice.
      auto gj = [&](double di) {
        y[i] = x[i] + di;
        auto g = fd_gradient(f, y, h);
        y[i] = x[i];
        return g[j];
      };
      out.set(i, j, (-gj(2 * h) + 8 * gj(h) - 8 * gj(-h) + gj(-2 * h)) / (12 * h));
    }
  }
  return out;
}

inline std::vector<double> field_gradient(const ScalarField& f, std::span<const double> x) {
  return f.gradient ? f.gradient(x) : fd_gradient(f.value, x);
}

inline SymTensor field_hessian(const ScalarField& f, std::span<const double> x) {
  return f.hessian ? f.hessian(x) : fd_hessian(f.value, x);
}

}  // namespace mixhess
