#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "triplex/symbol/gallery.hpp"

using namespace triplex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double fd5(const Expr& e, Var v, const Point& p, double h) {
  auto shifted = [&](double s) {
    Point q = p;
    if (v == Var::t) q.t += s;
    if (v == Var::x) q.x += s;
    if (v == Var::xi) q.xi += s;
    return e.eval(q);
  };
  return (-shifted(2 * h) + 8 * shifted(h) - 8 * shifted(-h) + shifted(-2 * h)) / (12 * h);
}

}  // namespace

TEST_CASE("parse and evaluate", "[symbol]") {
  SECTION("basic forms") {
    CHECK_THAT(parse_symbol("(1-cos(x))^2")(0, std::numbers::pi, 0), WithinAbs(4.0, 1e-15));
    CHECK(parse_symbol("jp(xi)")(0, 0, 0) == 1.0);
    CHECK_THAT(parse_symbol("2*t - x/4 + xi^3")(1, 2, 3), WithinAbs(2 - 0.5 + 27, 1e-14));
    CHECK_THAT(parse_symbol("  exp( 0 ) + sqrt(4)")(0, 0, 0), WithinAbs(3.0, 1e-15));
    CHECK_THAT(parse_symbol("-x^2")(0, 3, 0), WithinAbs(-9.0, 1e-15));
    CHECK_THAT(parse_symbol("1.5e-3*t")(2, 0, 0), WithinAbs(3e-3, 1e-18));
  }
  SECTION("left associativity") {
    CHECK(parse_symbol("8-4-2")(0, 0, 0) == 2.0);
    CHECK(parse_symbol("8/4/2")(0, 0, 0) == 1.0);
  }
  SECTION("syntax errors carry byte offsets") {
    try {
      parse_symbol("sin(");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset() == 4);
    }
    try {
      parse_symbol("x + foo(1)");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.offset() == 4);
      CHECK(std::string(e.what()).find("unknown identifier") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_symbol("x^-1"), ParseError);
    CHECK_THROWS_AS(parse_symbol("(x"), ParseError);
    CHECK_THROWS_AS(parse_symbol("x y"), ParseError);
    CHECK_THROWS_AS(parse_symbol(""), ParseError);
  }
  SECTION("domain errors instead of non-finite values") {
    CHECK_THROWS_AS(parse_symbol("1/x")(0, 0, 0), DomainError);
    CHECK_THROWS_AS(parse_symbol("sqrt(x)")(0, -1, 0), DomainError);
    CHECK_THROWS_AS(parse_symbol("exp(xi)")(0, 0, 1000), DomainError);
    CHECK(parse_symbol("sqrt(x)")(0, 0, 0) == 0.0);
  }
}

TEST_CASE("printing round-trips", "[symbol]") {
  const char* inputs[] = {"(1-cos(x))^2", "t*sin(x)", "-(t*sin(x))", "(t^6/2-t)*(1-cos(x))", "x-(t-xi)",
                          "x/(t*xi)", "(-2)^3", "jp(xi)^2*exp(-t)", "1e-3+0.25*x", "--x"};
  for (const char* in : inputs) {
    const Expr e = parse_symbol(in);
    const std::string once = to_string(e);
    const std::string twice = to_string(parse_symbol(once));
    INFO(in << " -> " << once);
    CHECK(once == twice);
    const Point p{0.3, 1.1, 2.5};
    CHECK_THAT(parse_symbol(once).eval(p), WithinRel(e.eval(p), 1e-15));
  }
}

TEST_CASE("symbolic derivatives", "[symbol]") {
  SECTION("spot values") {
    CHECK_THAT(differentiate(parse_symbol("jp(xi)"), Var::xi).eval({0, 0, 1}), WithinAbs(1 / std::sqrt(2.0), 1e-15));
    CHECK_THAT(differentiate(parse_symbol("(1-cos(x))^2"), Var::x, 2).eval({0, 0, 0}), WithinAbs(0.0, 1e-15));
    const Expr no_t = parse_symbol("sin(x)*jp(xi)+exp(x)");
    CHECK(differentiate(no_t, Var::t).is_constant(0.0));
    CHECK_THROWS_AS(differentiate(no_t, Var::x, 5), InvalidArgument);
  }
  SECTION("sqrt at zero is flagged on evaluation") {
    const Expr d = differentiate(parse_symbol("sqrt(x)"), Var::x);
    CHECK_THROWS_AS(d.eval({0, 0, 0}), DomainError);
  }
  SECTION("polynomial degree in t") {
    CHECK(polynomial_degree(parse_symbol("(t^6/2-t)*(1-cos(x))"), Var::t) == 6);
    CHECK(polynomial_degree(parse_symbol("sin(x)"), Var::t) == 0);
    CHECK(polynomial_degree(parse_symbol("exp(t)"), Var::t) == -1);
  }
  SECTION("agree with five-point differences on gallery symbols") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(0.05, 0.95), ux(0.0, 2 * std::numbers::pi), uxi(-8.0, 8.0);
    for (const auto& name : gallery_names()) {
      const HyperbolicModel m = gallery(name);
      for (const Expr& sym : {m.a(), m.b()}) {
        for (Var v : {Var::t, Var::x, Var::xi}) {
          const Expr d = differentiate(sym, v);
          for (int i = 0; i < 100; ++i) {
            const Point p{ut(rng), ux(rng), uxi(rng)};
            const double exact = d.eval(p);
            const double approx = fd5(sym, v, p, 1e-3);
            INFO(name << " " << to_string(sym) << " d/" << name_of(v));
            CHECK(std::abs(exact - approx) <= 1e-6 * (1.0 + std::abs(exact)));
          }
        }
      }
    }
  }
  SECTION("higher orders against repeated differences") {
    const Expr e = parse_symbol("sin(x)*exp(t*x)/jp(xi)");
    const Point p{0.4, 0.7, 1.3};
    const Expr d1 = differentiate(e, Var::x);
    const Expr d2 = differentiate(e, Var::x, 2);
    CHECK_THAT(d2.eval(p), WithinRel(fd5(d1, Var::x, p, 1e-3), 1e-8));
  }
}

TEST_CASE("model construction", "[symbol]") {
  SECTION("accepted models") {
    CHECK_NOTHROW(build_model("(1-cos(x))^2", "1", "0", 1.0, 1.0));
    CHECK_NOTHROW(build_model("sin(x)^2", "1", "t*sin(x)", 1.0, 1.0));
  }
  SECTION("rejected models carry witnesses") {
    try {
      build_model("0", "1", "1", 1.0, 1.0);
      FAIL("expected HyperbolicityViolation");
    } catch (const HyperbolicityViolation& e) {
      CHECK_THAT(e.discriminant(), WithinAbs(-27.0, 1e-12));
    }
    CHECK_THROWS_AS(build_model("-1", "1", "0", 1.0, 1.0), PositivityViolation);
    CHECK_THROWS_AS(build_model("1", "0.5", "0", 1.0, 1.0), PositivityViolation);
    CHECK_THROWS_AS(build_model("1", "1", "0", 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(build_model("t", "1", "0", 1.0, 1.0), InvalidArgument);
  }
  SECTION("model files") {
    std::istringstream in("# a comment\nalpha = (1-cos(x))^2\nb = t*0.5*(1-cos(x))  # trailing\nT=0.5\nb11 = sin(x)\n");
    const HyperbolicModel m = read_model(in);
    CHECK(m.T() == 0.5);
    CHECK(m.has_lower_order_terms());
    std::ostringstream out;
    write_model(out, m);
    std::istringstream back(out.str());
    const HyperbolicModel m2 = read_model(back);
    CHECK(to_string(m2.b()) == to_string(m.b()));
    std::istringstream bad("alpha=1\nb=0\ngamma=3\n");
    CHECK_THROWS_AS(read_model(bad), InvalidArgument);
  }
}

TEST_CASE("gallery", "[symbol]") {
  SECTION("names and parameters") {
    for (const auto& name : gallery_names()) CHECK_NOTHROW(gallery(name));
    CHECK_THROWS_AS(gallery("g_nope"), InvalidArgument);
    CHECK_THROWS_AS(gallery("g_ex22", {{"m", "2"}}), InvalidArgument);
    CHECK_THROWS_AS(gallery("g_eps", {{"eps", "0"}}), InvalidArgument);
    CHECK_THROWS_AS(gallery("g_strict", {{"q", "1"}}), InvalidArgument);
    CHECK(gallery_from_spec("g_eps:base=g_E,eps=0.1").name() == "g_eps(g_E)");
    CHECK(gallery_from_spec("g_ex22:m=4,T=0.5").T() == 0.5);
  }
  SECTION("g_ex22 discriminant at t = 2 alpha") {
    const HyperbolicModel m = gallery("g_ex22", {{"m", "6"}});
    const double alpha = 0.1;
    const double x = std::acos(1.0 - std::sqrt(alpha));
    const double expected = 27.0 * std::pow(2.0, 7) * std::pow(alpha, 8) * (1.0 - 8.0 * std::pow(alpha, 5));
    CHECK_THAT(m.discriminant({2 * alpha, x, 0.0}), WithinRel(expected, 1e-9));
    CHECK_THAT(expected, WithinRel(3.455724e-5, 1e-6));
  }
  SECTION("g_ex21p double root set") {
    const HyperbolicModel m = gallery("g_ex21p");
    const double x = std::numbers::pi / 4;
    const double s = std::sin(x) * std::sin(x);
    CHECK_THAT(m.discriminant({2 * s, x, 3.0}), WithinAbs(0.0, 1e-14));
  }
  SECTION("g_zero_b lower bound") {
    const HyperbolicModel m = gallery("g_zero_b");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ut(1e-4, 1.0), ux(0.0, 2 * std::numbers::pi);
    for (int i = 0; i < 1000; ++i) {
      const Point p{ut(rng), ux(rng), 0.0};
      const double al = m.alpha().eval(p);
      CHECK(m.discriminant(p) / (p.t * (p.t + al) * (p.t + al)) >= 4.0 * (1 - 1e-12));
    }
  }
  SECTION("discriminant is nonnegative on random points") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ut(0.0, 1.0), ux(0.0, 2 * std::numbers::pi), uxi(-50.0, 50.0);
    for (const auto& name : gallery_names()) {
      const HyperbolicModel m = gallery(name);
      for (int i = 0; i < 1000; ++i) {
        const Point p{ut(rng), ux(rng), uxi(rng)};
        const double a = m.eval_a(p);
        CHECK(m.discriminant(p) >= -1e-12 * (1.0 + std::abs(a * a * a)));
      }
    }
  }
  SECTION("g_eps shifts alpha") {
    const HyperbolicModel base = gallery("g_zero_b");
    const HyperbolicModel m = gallery("g_eps", {{"base", "g_zero_b"}, {"eps", "0.01"}});
    const Point p{0.2, 1.0, 0.0};
    CHECK_THAT(m.alpha().eval(p), WithinAbs(base.alpha().eval(p) + 0.01, 1e-15));
  }
}
