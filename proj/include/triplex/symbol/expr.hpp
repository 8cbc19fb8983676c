#pragma once

// Immutable expression trees over the variables t, x, xi.
//
// Nodes are shared and never mutated after construction, so an Expr is cheap
// to copy and safe to evaluate from several threads at once.

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <system_error>

#include "triplex/errors.hpp"

namespace triplex {

enum class Var : std::uint8_t { t, x, xi };
enum class Func : std::uint8_t { sin, cos, exp, sqrt, jp };

inline std::string_view name_of(Var v) {
  switch (v) {
    case Var::t: return "t";
    case Var::x: return "x";
    case Var::xi: return "xi";
  }
  return "?";
}

inline std::string_view name_of(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::sqrt: return "sqrt";
    case Func::jp: return "jp";
  }
  return "?";
}

/// Japanese bracket (1 + xi^2)^{1/2}.
inline double japanese_bracket(double xi) { return std::sqrt(1.0 + xi * xi); }

class Expr {
 public:
  enum class Kind : std::uint8_t { constant, variable, neg, add, sub, mul, div, pow, call };

  Expr() : Expr(0.0) {}
  Expr(double c) : node_(std::make_shared<const Node>(Node{Kind::constant, c, Var::t, Func::sin, 0, {}, {}})) {}
  Expr(int c) : Expr(static_cast<double>(c)) {}

  static Expr variable(Var v) { return Expr(Node{Kind::variable, 0.0, v, Func::sin, 0, {}, {}}); }
  static Expr t() { return variable(Var::t); }
  static Expr x() { return variable(Var::x); }
  static Expr xi() { return variable(Var::xi); }

  // Raw constructors: build exactly the requested node, no simplification.
  static Expr raw_unary_minus(Expr e) { return Expr(Node{Kind::neg, 0.0, Var::t, Func::sin, 0, e.node_, {}}); }
  static Expr raw_binary(Kind k, Expr l, Expr r) { return Expr(Node{k, 0.0, Var::t, Func::sin, 0, l.node_, r.node_}); }
  static Expr raw_pow(Expr base, int n) { return Expr(Node{Kind::pow, 0.0, Var::t, Func::sin, n, base.node_, {}}); }
  static Expr raw_call(Func f, Expr arg) { return Expr(Node{Kind::call, 0.0, Var::t, f, 0, arg.node_, {}}); }

  Kind kind() const { return node_->kind; }
  double value() const { return node_->value; }
  Var var() const { return node_->var; }
  Func func() const { return node_->func; }
  int exponent() const { return node_->exponent; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }
  Expr arg() const { return Expr(node_->lhs); }

  bool is_constant() const { return kind() == Kind::constant; }
  bool is_constant(double c) const { return is_constant() && value() == c; }

  bool depends_on(Var v) const {
    switch (kind()) {
      case Kind::constant: return false;
      case Kind::variable: return var() == v;
      case Kind::neg:
      case Kind::pow:
      case Kind::call: return lhs().depends_on(v);
      default: return lhs().depends_on(v) || rhs().depends_on(v);
    }
  }

  /// Evaluates the expression. Throws DomainError instead of returning a
  /// non-finite value.
  double eval(const Point& p) const { return eval_node(*node_, p); }
  double operator()(double t, double x, double xi) const { return eval(Point{t, x, xi}); }

  /// Number of nodes in the tree.
  std::size_t size() const {
    switch (kind()) {
      case Kind::constant:
      case Kind::variable: return 1;
      case Kind::neg:
      case Kind::pow:
      case Kind::call: return 1 + lhs().size();
      default: return 1 + lhs().size() + rhs().size();
    }
  }

 private:
  struct Node {
    Kind kind;
    double value;
    Var var;
    Func func;
    int exponent;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit Expr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
  }

  static double eval_node(const Node& n, const Point& p) {
    switch (n.kind) {
      case Kind::constant: return n.value;
      case Kind::variable:
        switch (n.var) {
          case Var::t: return p.t;
          case Var::x: return p.x;
          case Var::xi: return p.xi;
        }
        return 0.0;
      case Kind::neg: return -eval_node(*n.lhs, p);
      case Kind::add: return checked(eval_node(*n.lhs, p) + eval_node(*n.rhs, p), "addition");
      case Kind::sub: return checked(eval_node(*n.lhs, p) - eval_node(*n.rhs, p), "subtraction");
      case Kind::mul: return checked(eval_node(*n.lhs, p) * eval_node(*n.rhs, p), "multiplication");
      case Kind::div: {
        const double den = eval_node(*n.rhs, p);
        if (den == 0.0) throw DomainError("division by zero");
        return checked(eval_node(*n.lhs, p) / den, "division");
      }
      case Kind::pow: {
        const double b = eval_node(*n.lhs, p);
        double r = 1.0;
        for (int i = 0; i < n.exponent; ++i) r *= b;
        return checked(r, "power");
      }
      case Kind::call: {
        const double u = eval_node(*n.lhs, p);
        switch (n.func) {
          case Func::sin: return std::sin(u);
          case Func::cos: return std::cos(u);
          case Func::exp: return checked(std::exp(u), "exp");
          case Func::sqrt:
            if (u < 0.0) throw DomainError("sqrt of negative argument");
            return std::sqrt(u);
          case Func::jp: return checked(japanese_bracket(u), "jp");
        }
      }
    }
    return 0.0;
  }

  std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Simplifying constructors. These fold constants and drop neutral elements;
// the parser uses the raw constructors instead so printed forms round-trip.

inline Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr(-a.value());
  if (a.kind() == Expr::Kind::neg) return a.arg();
  return Expr::raw_unary_minus(a);
}

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.value() + b.value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (b.kind() == Expr::Kind::neg) return Expr::raw_binary(Expr::Kind::sub, a, b.arg());
  if (b.is_constant() && b.value() < 0.0) return Expr::raw_binary(Expr::Kind::sub, a, Expr(-b.value()));
  return Expr::raw_binary(Expr::Kind::add, a, b);
}

inline Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.value() - b.value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  if (b.kind() == Expr::Kind::neg) return Expr::raw_binary(Expr::Kind::add, a, b.arg());
  return Expr::raw_binary(Expr::Kind::sub, a, b);
}

inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr(a.value() * b.value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  if (b.is_constant()) return b * a;
  if (a.is_constant() && b.kind() == Expr::Kind::mul && b.lhs().is_constant())
    return Expr(a.value() * b.lhs().value()) * b.rhs();
  if (a.kind() == Expr::Kind::neg) return -(a.arg() * b);
  if (b.kind() == Expr::Kind::neg) return -(a * b.arg());
  return Expr::raw_binary(Expr::Kind::mul, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0.0) return Expr(a.value() / b.value());
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr(0.0);
  return Expr::raw_binary(Expr::Kind::div, a, b);
}

inline Expr pow(const Expr& base, int n) {
  if (n < 0) throw InvalidArgument("negative integer exponent");
  if (n == 0) return Expr(1.0);
  if (n == 1) return base;
  if (base.is_constant()) return Expr(std::pow(base.value(), n));
  if (base.kind() == Expr::Kind::pow) return Expr::raw_pow(base.lhs(), base.exponent() * n);
  return Expr::raw_pow(base, n);
}

inline Expr call(Func f, const Expr& arg) {
  if (arg.is_constant()) {
    const double v = arg.value();
    switch (f) {
      case Func::sin: return Expr(std::sin(v));
      case Func::cos: return Expr(std::cos(v));
      case Func::exp: return Expr(std::exp(v));
      case Func::sqrt:
        if (v >= 0.0) return Expr(std::sqrt(v));
        break;
      case Func::jp: return Expr(japanese_bracket(v));
    }
  }
  return Expr::raw_call(f, arg);
}

inline Expr sin(const Expr& e) { return call(Func::sin, e); }
inline Expr cos(const Expr& e) { return call(Func::cos, e); }
inline Expr exp(const Expr& e) { return call(Func::exp, e); }
inline Expr sqrt(const Expr& e) { return call(Func::sqrt, e); }
inline Expr jp(const Expr& e) { return call(Func::jp, e); }

// ---------------------------------------------------------------------------
// Differentiation

inline Expr derivative(const Expr& e, Var v) {
  using K = Expr::Kind;
  if (!e.depends_on(v)) return Expr(0.0);
  switch (e.kind()) {
    case K::constant: return Expr(0.0);
    case K::variable: return Expr(e.var() == v ? 1.0 : 0.0);
    case K::neg: return -derivative(e.arg(), v);
    case K::add: return derivative(e.lhs(), v) + derivative(e.rhs(), v);
    case K::sub: return derivative(e.lhs(), v) - derivative(e.rhs(), v);
    case K::mul: return derivative(e.lhs(), v) * e.rhs() + e.lhs() * derivative(e.rhs(), v);
    case K::div: {
      const Expr& u = e.lhs();
      const Expr& w = e.rhs();
      if (!w.depends_on(v)) return derivative(u, v) / w;
      return (derivative(u, v) * w - u * derivative(w, v)) / pow(w, 2);
    }
    case K::pow: {
      const int n = e.exponent();
      return Expr(static_cast<double>(n)) * pow(e.lhs(), n - 1) * derivative(e.lhs(), v);
    }
    case K::call: {
      const Expr& u = e.arg();
      const Expr du = derivative(u, v);
      switch (e.func()) {
        case Func::sin: return cos(u) * du;
        case Func::cos: return -(sin(u) * du);
        case Func::exp: return e * du;
        case Func::sqrt: return du / (Expr(2.0) * e);
        case Func::jp: return u * du / e;
      }
    }
  }
  return Expr(0.0);
}

/// Exact symbolic derivative of the given order (0..4).
inline Expr differentiate(const Expr& e, Var v, int order = 1) {
  if (order < 0 || order > 4) throw InvalidArgument("derivative order must lie in [0, 4]");
  Expr r = e;
  for (int i = 0; i < order; ++i) r = derivative(r, v);
  return r;
}

/// Degree of e as a polynomial in `v`, or -1 when e is not a polynomial in v
/// of degree <= max_degree (detected by repeated symbolic differentiation).
inline int polynomial_degree(const Expr& e, Var v, int max_degree = 8) {
  Expr d = e;
  for (int deg = 0; deg <= max_degree; ++deg) {
    if (!d.depends_on(v)) return deg;
    d = derivative(d, v);
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw InvalidArgument("cannot format number");
  return std::string(buf.data(), end);
}

enum Prec : int { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

inline std::string print(const Expr& e, int& prec);

inline std::string wrap(const Expr& e, int min_prec) {
  int p = 0;
  std::string s = print(e, p);
  return p >= min_prec ? s : "(" + s + ")";
}

inline std::string print(const Expr& e, int& prec) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::constant:
      if (e.value() < 0.0) {
        prec = kUnary;
        return "-" + format_number(-e.value());
      }
      prec = kAtom;
      return format_number(e.value());
    case K::variable: prec = kAtom; return std::string(name_of(e.var()));
    case K::neg: prec = kUnary; return "-" + wrap(e.arg(), kUnary);
    case K::add: prec = kSum; return wrap(e.lhs(), kSum) + "+" + wrap(e.rhs(), kProduct);
    case K::sub: prec = kSum; return wrap(e.lhs(), kSum) + "-" + wrap(e.rhs(), kProduct);
    case K::mul: prec = kProduct; return wrap(e.lhs(), kProduct) + "*" + wrap(e.rhs(), kUnary);
    case K::div: prec = kProduct; return wrap(e.lhs(), kProduct) + "/" + wrap(e.rhs(), kUnary);
    case K::pow: prec = kPower; return wrap(e.lhs(), kAtom) + "^" + std::to_string(e.exponent());
    case K::call: prec = kAtom; return std::string(name_of(e.func())) + "(" + wrap(e.arg(), 0) + ")";
  }
  return {};
}

}  // namespace detail

/// Canonical text form, parseable by parse_symbol.
inline std::string to_string(const Expr& e) {
  int p = 0;
  return detail::print(e, p);
}

}  // namespace triplex
