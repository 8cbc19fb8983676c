#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "triplex/errors.hpp"
#include "triplex/symbol/expr.hpp"
#include "triplex/symbol/parser.hpp"

namespace triplex {

/// Order-zero lower-order terms b10, b11, b12.
struct LowerOrderTerms {
  Expr b10{0.0};
  Expr b11{0.0};
  Expr b12{0.0};
};

struct ValidationGrid {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> xi;

  std::size_t size() const { return t.size() * x.size() * xi.size(); }

  template <class F>
  void for_each(F&& f) const {
    for (double tt : t)
      for (double xx : x)
        for (double zz : xi) f(Point{tt, xx, zz});
  }
};

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = a;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

/// n equispaced points on [0, period), endpoint excluded.
inline std::vector<double> periodic_points(double period, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = period * static_cast<double>(i) / static_cast<double>(n);
  return v;
}

inline std::vector<double> logspace(double a, double b, std::size_t n) {
  auto e = linspace(std::log(a), std::log(b), n);
  for (auto& v : e) v = std::exp(v);
  if (n > 1) {
    e.front() = a;
    e.back() = b;
  }
  return e;
}

inline ValidationGrid default_validation_grid(double T, double period) {
  return ValidationGrid{linspace(0.0, T, 64), periodic_points(period, 64), logspace(1.0, 64.0, 17)};
}

struct ValidationReport {
  std::size_t points = 0;
  double min_alpha = 0.0;
  double min_atilde = 0.0;
  double min_scaled_discriminant = 0.0;  // min of Delta / (1 + |a|^3)
  Point min_discriminant_at{};
  double max_lower_order = 0.0;
};

class HyperbolicModel {
 public:
  static constexpr double tol_val = 1e-10;

  HyperbolicModel(Expr alpha, Expr atilde, Expr b, double c0, double T, double period = 2.0 * std::numbers::pi,
                  LowerOrderTerms lower = {})
      : alpha_(std::move(alpha)),
        atilde_(std::move(atilde)),
        b_(std::move(b)),
        lower_(std::move(lower)),
        c0_(c0),
        T_(T),
        period_(period) {
    if (!(c0 > 0.0)) throw InvalidArgument("c0 must be positive");
    if (!(T > 0.0)) throw InvalidArgument("time horizon T must be positive");
    if (!(period > 0.0)) throw InvalidArgument("period must be positive");
    if (alpha_.depends_on(Var::t)) throw InvalidArgument("alpha must not depend on t");
    a_ = (Expr::t() + alpha_) * atilde_;
    validate(default_validation_grid(T_, period_));
  }

  const Expr& alpha() const { return alpha_; }
  const Expr& atilde() const { return atilde_; }
  const Expr& b() const { return b_; }
  /// a = (t + alpha) * atilde
  const Expr& a() const { return a_; }
  const LowerOrderTerms& lower() const { return lower_; }
  double c0() const { return c0_; }
  double T() const { return T_; }
  double period() const { return period_; }
  const ValidationReport& validation() const { return report_; }
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  double eval_a(const Point& p) const { return a_.eval(p); }
  double eval_b(const Point& p) const { return b_.eval(p); }
  double discriminant(const Point& p) const {
    const double a = eval_a(p), b = eval_b(p);
    return 4.0 * a * a * a - 27.0 * b * b;
  }

  bool has_lower_order_terms() const {
    return !(lower_.b10.is_constant(0.0) && lower_.b11.is_constant(0.0) && lower_.b12.is_constant(0.0));
  }

  /// Same model with alpha replaced by alpha + eps.
  HyperbolicModel with_alpha_shift(double eps) const {
    HyperbolicModel m(alpha_ + Expr(eps), atilde_, b_, c0_, T_, period_, lower_);
    return m;
  }

  HyperbolicModel with_lower_order(LowerOrderTerms lower) const {
    HyperbolicModel m(alpha_, atilde_, b_, c0_, T_, period_, std::move(lower));
    m.name_ = name_;
    return m;
  }

  HyperbolicModel with_horizon(double T) const {
    HyperbolicModel m(alpha_, atilde_, b_, c0_, T, period_, lower_);
    m.name_ = name_;
    return m;
  }

 private:
  void validate(const ValidationGrid& grid) {
    report_ = ValidationReport{};
    report_.points = grid.size();
    report_.min_alpha = INFINITY;
    report_.min_atilde = INFINITY;
    report_.min_scaled_discriminant = INFINITY;
    grid.for_each([&](const Point& p) {
      const double al = alpha_.eval(p);
      if (al < -tol_val) throw PositivityViolation("alpha", p, al);
      const double at = atilde_.eval(p);
      if (at < c0_ * (1.0 - tol_val)) throw PositivityViolation("atilde", p, at);
      const double a = (p.t + al) * at;
      const double b = b_.eval(p);
      const double disc = 4.0 * a * a * a - 27.0 * b * b;
      const double scale = 1.0 + std::abs(a * a * a);
      if (disc < -tol_val * scale) throw HyperbolicityViolation(p, disc);
      report_.min_alpha = std::min(report_.min_alpha, al);
      report_.min_atilde = std::min(report_.min_atilde, at);
      if (disc / scale < report_.min_scaled_discriminant) {
        report_.min_scaled_discriminant = disc / scale;
        report_.min_discriminant_at = p;
      }
      for (const Expr* e : {&lower_.b10, &lower_.b11, &lower_.b12})
        report_.max_lower_order = std::max(report_.max_lower_order, std::abs(e->eval(p)));
    });
  }

  Expr alpha_, atilde_, b_, a_;
  LowerOrderTerms lower_;
  double c0_, T_, period_;
  ValidationReport report_;
  std::string name_;
};

/// Builds and validates a model from expression text.
inline HyperbolicModel build_model(std::string_view alpha, std::string_view atilde, std::string_view b, double c0,
                                   double T, double period = 2.0 * std::numbers::pi) {
  return HyperbolicModel(parse_symbol(alpha), parse_symbol(atilde), parse_symbol(b), c0, T, period);
}

namespace detail {

inline std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("model key '" + key + "': expected a number, got '" + value + "'");
  }
}

}  // namespace detail

/// Reads a model from key=value text. Keys: alpha, atilde, b, c0, T, period,
/// b10, b11, b12. Lines starting with '#' are comments.
inline HyperbolicModel read_model(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("model line " + std::to_string(lineno) + ": missing '='");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    static const char* known[] = {"alpha", "atilde", "b", "c0", "T", "period", "b10", "b11", "b12"};
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) == std::end(known))
      throw InvalidArgument("model line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    kv[key] = value;
  }
  auto get = [&](const std::string& k, const std::string& def) { return kv.count(k) ? kv[k] : def; };
  if (!kv.count("alpha") || !kv.count("b")) throw InvalidArgument("model requires at least 'alpha' and 'b'");
  LowerOrderTerms lower{parse_symbol(get("b10", "0")), parse_symbol(get("b11", "0")), parse_symbol(get("b12", "0"))};
  return HyperbolicModel(parse_symbol(kv["alpha"]), parse_symbol(get("atilde", "1")), parse_symbol(kv["b"]),
                         kv.count("c0") ? detail::parse_real("c0", kv["c0"]) : 1.0,
                         kv.count("T") ? detail::parse_real("T", kv["T"]) : 1.0,
                         kv.count("period") ? detail::parse_real("period", kv["period"]) : 2.0 * std::numbers::pi,
                         std::move(lower));
}

inline HyperbolicModel read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open model file '" + path + "'");
  return read_model(in);
}

inline void write_model(std::ostream& out, const HyperbolicModel& m) {
  std::ostringstream s;
  s.precision(17);
  out << "alpha = " << to_string(m.alpha()) << "\n";
  out << "atilde = " << to_string(m.atilde()) << "\n";
  out << "b = " << to_string(m.b()) << "\n";
  s << "c0 = " << m.c0() << "\nT = " << m.T() << "\nperiod = " << m.period() << "\n";
  out << s.str();
  if (m.has_lower_order_terms()) {
    out << "b10 = " << to_string(m.lower().b10) << "\n";
    out << "b11 = " << to_string(m.lower().b11) << "\n";
    out << "b12 = " << to_string(m.lower().b12) << "\n";
  }
}

}  // namespace triplex
