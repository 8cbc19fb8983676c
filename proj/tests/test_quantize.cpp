#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "triplex/quantize/fp_check.hpp"
#include "triplex/quantize/friedrichs.hpp"
#include "triplex/symbol/gallery.hpp"
#include "triplex/symmetrizer/symmetrizer.hpp"

using namespace triplex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Weyl matrix from the definition, with a plain exponential sum on M points.
CMat weyl_oracle(const Expr& q, double t, const FourierGrid& g, int M) {
  const int N = g.N();
  CMat out(N, N);
  for (int i = 0; i < N; ++i)
    for (int ip = 0; ip < N; ++ip) {
      const double xi = 0.5 * (g.kappa_at(i) + g.kappa_at(ip));
      const double dk = g.kappa_at(i) - g.kappa_at(ip);
      cplx s = 0.0;
      for (int j = 0; j < M; ++j) {
        const double x = g.period() * j / M;
        s += q.eval({t, x, xi}) * std::exp(cplx(0.0, -dk * x));
      }
      out(i, ip) = s / static_cast<double>(M);
    }
  return out;
}

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Weyl quantization", "[quantize]") {
  const FourierGrid g(8);
  const int N = g.N();
  SECTION("identity, multiplier, cosine") {
    CHECK(max_abs(op_weyl(Expr(1.0), 0.0, g).mat - CMat::Identity(N, N)) == 0.0);
    const CMat xi = op_weyl(Expr::xi(), 0.0, g).mat;
    for (int i = 0; i < N; ++i) CHECK(xi(i, i) == cplx(i - 8.0, 0.0));
    CHECK(max_abs(xi - CMat(xi.diagonal().asDiagonal())) == 0.0);
    const CMat c = op_weyl(parse_symbol("cos(x)"), 0.0, g).mat;
    for (int i = 0; i < N; ++i)
      for (int ip = 0; ip < N; ++ip) {
        const double expect = std::abs(i - ip) == 1 ? 0.5 : 0.0;
        CHECK(std::abs(c(i, ip) - expect) <= 1e-15);
      }
  }
  SECTION("agrees with the defining sum") {
    for (const char* s : {"(1-cos(x))^2*jp(xi)", "sin(2*x)*xi/jp(xi)+t*cos(x)", "exp(cos(x))*jp(xi)^2", "xi*sin(x)"}) {
      const Expr q = parse_symbol(s);
      INFO(s);
      CHECK(max_abs(op_weyl(q, 0.3, g).mat - weyl_oracle(q, 0.3, g, 8 * N)) <= 1e-12 * (1 + max_abs(op_weyl(q, 0.3, g).mat)));
    }
  }
  SECTION("f(x) xi is the symmetrized product (f D + D f)/2") {
    const Expr f = parse_symbol("(1-cos(x))^2+sin(3*x)");
    const CMat F = op_weyl(f, 0.0, g).mat;
    const CMat D = op_weyl(Expr::xi(), 0.0, g).mat;
    const CMat W = op_weyl(f * Expr::xi(), 0.0, g).mat;
    CHECK(max_abs(W - 0.5 * (F * D + D * F)) <= 1e-13 * max_abs(W));
  }
  SECTION("hermitian, linear, multipliers commute") {
    const Expr q1 = parse_symbol("sin(x)*jp(xi)+cos(2*x)"), q2 = parse_symbol("exp(sin(x))*xi");
    const CMat A = op_weyl(q1, 0.0, g).mat, B = op_weyl(q2, 0.0, g).mat;
    CHECK(max_abs(A - A.adjoint()) <= 1e-13 * max_abs(A));
    CHECK(max_abs(B - B.adjoint()) <= 1e-13 * max_abs(B));
    CHECK(max_abs(op_weyl(q1 + q2, 0.0, g).mat - (A + B)) <= 1e-14 * max_abs(A + B));
    const CMat M = op_weyl(parse_symbol("xi^2/jp(xi)"), 0.0, g).mat;
    const CMat J = op_jp(g).mat;
    CHECK(max_abs(M * J - J * M) == 0.0);
  }
  SECTION("japanese bracket multiplier") {
    const CMat J = op_jp(FourierGrid(4)).mat;
    CHECK(J(4, 4) == cplx(1.0));
    CHECK_THAT(J(3, 3).real(), WithinAbs(std::sqrt(2.0), 1e-15));
    CHECK_THAT(J(5, 5).real(), WithinAbs(std::sqrt(2.0), 1e-15));
    CHECK_THAT(J(8, 8).real(), WithinAbs(std::sqrt(17.0), 1e-15));
    CHECK_THROWS_AS(FourierGrid(3), InvalidArgument);
  }
  SECTION("time polynomial decomposition") {
    const Expr q = parse_symbol("(t^6/2-t)*(1-cos(x))+t^2*xi");
    const TimeSymbolOp op(q, g);
    CHECK(op.polynomial());
    CHECK(op.degree() == 6);
    for (double t : {0.0, 0.37, 1.0}) {
      CHECK(max_abs(op.at(t) - op_weyl(q, t, g).mat) <= 1e-13 * (1 + max_abs(op.at(t))));
      CHECK(max_abs(op.dt_at(t) - op_weyl(differentiate(q, Var::t), t, g).mat) <= 1e-12);
    }
    const TimeSymbolOp e(parse_symbol("exp(t)*cos(x)"), g);
    CHECK_FALSE(e.polynomial());
    CHECK(max_abs(e.at(0.5) - op_weyl(parse_symbol("exp(t)*cos(x)"), 0.5, g).mat) == 0.0);
  }
}

TEST_CASE("operator norm", "[quantize]") {
  CHECK_THAT(operator_norm(CMat::Identity(9, 9)), WithinRel(1.0, 1e-12));
  CHECK_THAT(operator_norm(op_jp(FourierGrid(4))), WithinRel(std::sqrt(17.0), 1e-8));
  const int n = 7;
  CMat dft(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) dft(j, k) = std::polar(1.0 / std::sqrt(n), -2.0 * std::numbers::pi * j * k / n);
  CHECK_THAT(operator_norm(dft), WithinRel(1.0, 1e-8));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 5; ++trial) {
    CMat A(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) A(i, j) = cplx(nd(rng), nd(rng));
    Eigen::JacobiSVD<CMat> svd(A);
    CHECK_THAT(operator_norm(A), WithinRel(svd.singularValues()(0), 1e-8));
  }
}

TEST_CASE("Friedrichs part", "[quantize]") {
  SECTION("window normalization") {
    const Bump b = default_bump();
    CHECK_NOTHROW(validate_bump(b));
    CHECK_THAT(composite_gauss([&](double s) { return b.q(s) * b.q(s); }, -1, 1, 128), WithinAbs(1.0, 1e-10));
    Bump off{"scaled", [b](double s) { return 1.001 * b.q(s); }};
    CHECK_THROWS_AS(validate_bump(off), InvalidArgument);
    Bump wide{"wide", [](double s) { return std::exp(-s * s); }};
    CHECK_THROWS_AS(validate_bump(wide), InvalidArgument);
  }
  SECTION("Gauss-Legendre rule integrates polynomials") {
    const GaussRule r = gauss_legendre(33);
    double s = 0.0, w = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      s += r.weights[i] * std::pow(r.nodes[i], 64);
      w += r.weights[i];
    }
    CHECK_THAT(w, WithinAbs(2.0, 1e-14));
    CHECK_THAT(s, WithinRel(2.0 / 65.0, 1e-13));
  }
  SECTION("identity symbol") {
    const FourierGrid g(16);
    const auto f = friedrichs_part(symbol_identity(1), 0.0, g);
    CHECK(f.min_eig >= 1.0 - 1e-2);
    CHECK(max_abs(f.op.mat.diagonal() - CVec::Ones(g.N())) <= 1e-10);
  }
  SECTION("symmetrizer of g_zero_b") {
    const HyperbolicModel m = gallery("g_zero_b");
    const auto f = friedrichs_part(symbol_matrix_S(m), 0.5, FourierGrid(16));
    CHECK(f.min_eig >= -1e-8 * f.q_norm);
  }
  SECTION("nonnegative multiplication symbol") {
    const FourierGrid g(12);
    const auto f = friedrichs_part(SymbolMatrix::scalar(parse_symbol("(1-cos(x))^2*(1+sin(2*x))^2")), 0.0, g);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 100; ++trial) {
      CVec u(g.N());
      for (int i = 0; i < g.N(); ++i) u(i) = cplx(nd(rng), nd(rng));
      CHECK(std::real(u.dot(f.op.mat * u)) >= -1e-8 * u.squaredNorm());
    }
  }
  SECTION("general zeta path agrees with the separable path") {
    const FourierGrid g(8);
    const Expr w = parse_symbol("(1-cos(x))^2");
    const Expr w_xi = Expr::raw_binary(Expr::Kind::add, w, Expr::raw_binary(Expr::Kind::mul, Expr(0.0), Expr::xi()));
    REQUIRE(w_xi.depends_on(Var::xi));
    const auto a = friedrichs_part(SymbolMatrix::scalar(w), 0.0, g);
    const auto b = friedrichs_part(SymbolMatrix::scalar(w_xi), 0.0, g);
    CHECK(max_abs(a.op.mat - b.op.mat) <= 1e-12);
  }
  SECTION("xi-dependent symbol stays positive") {
    const FourierGrid g(8);
    const auto f = friedrichs_part(SymbolMatrix::scalar(parse_symbol("(1+cos(x))*xi^2/jp(xi)^2")), 0.0, g);
    CHECK(f.min_eig >= -1e-8 * f.q_norm);
  }
}

TEST_CASE("Friedrichs minus Weyl", "[quantize]") {
  SECTION("identity symbol gives quadrature-level residuals") {
    for (double r : sgarding_residual(symbol_identity(3), 0.0, {8, 16})) CHECK(r <= 1e-8);
  }
  SECTION("constant symbol matrices give quadrature-level residuals") {
    SymbolMatrix c(2, {Expr(2.0), Expr(1.0), Expr(1.0), Expr(3.0)});
    for (double r : sgarding_residual(c, 0.0, {8, 16})) CHECK(r <= 1e-8);
  }
  SECTION("bounded in K for the g_E symmetrizer") {
    const HyperbolicModel m = gallery("g_E");
    const auto r = sgarding_residual(symbol_matrix_S(m), 0.5, {8, 16, 32});
    const double lo = *std::min_element(r.begin(), r.end());
    for (double v : r) CHECK(v <= 3.0 * lo);
  }
}

TEST_CASE("sharp lower bound check", "[quantize]") {
  SECTION("g_zero_b at t=0.5") {
    const HyperbolicModel m = gallery("g_zero_b");
    const auto r = fp_search(m, {0.5}, FourierGrid(16));
    CHECK(r.found);
    CHECK(fp_check(m, 0.5, FourierGrid(16), r.delta, r.C).feasible);
  }
  SECTION("delta = 0 with C = lambda0") {
    const HyperbolicModel m = gallery("g_E");
    const double lambda0 = search_lambda0(m, default_condition_grid(m, 16, 16));
    for (double t : {0.05, 0.5, 1.0}) CHECK(fp_check(m, t, FourierGrid(8), 0.0, lambda0).feasible);
  }
  SECTION("g_ex21p reports without assertion") {
    const HyperbolicModel m = gallery("g_ex21p");
    const auto r = fp_search(m, {0.02, 0.1}, FourierGrid(8));
    CHECK(r.min_eig.size() == 2);
  }
}
