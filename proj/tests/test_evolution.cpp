#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "triplex/cubic/roots.hpp"
#include "triplex/evolution/energy.hpp"
#include "triplex/symbol/gallery.hpp"

using namespace triplex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

double max_abs(const CMat& m) { return m.cwiseAbs().maxCoeff(); }

CVec random_state(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  CVec v(n);
  for (int i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v / v.norm();
}

// Time-independent a = a0 (alpha = c, atilde = a0 / (t + c)), b = 0.
HyperbolicModel constant_a_model(double a0, double c = 1.0, double T = 1.0) {
  const Expr at = Expr(a0) / (Expr::t() + Expr(c));
  return HyperbolicModel(Expr(c), at, Expr(0.0), a0 / (T + c), T);
}

// 3x3 block of M for mode index i.
Eigen::Matrix3cd mode_block(const CMat& M, int N, int i) {
  Eigen::Matrix3cd m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = M(r * N + i, c * N + i);
  return m;
}

// exp(i M h) for a diagonalizable matrix.
CMat exp_iM(const CMat& M, double h) {
  Eigen::ComplexEigenSolver<CMat> es(M);
  const CVec d = (cplx(0.0, h) * es.eigenvalues()).array().exp();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().inverse();
}

}  // namespace

TEST_CASE("generator structure", "[evolution]") {
  SECTION("a = b = 0 gives a nilpotent generator") {
    const HyperbolicModel m(Expr(0.0), Expr(1.0), Expr(0.0), 1.0, 1.0);
    const SystemOps ops(m, FourierGrid(6));
    const CMat M = ops.generator(0.0);
    CHECK(max_abs(M * M * M) == 0.0);
    CHECK(max_abs(M * M) > 0.0);
  }
  SECTION("constant a, b = 0: eigenvalues per mode are the characteristic roots") {
    const HyperbolicModel m = constant_a_model(2.0);
    const FourierGrid g(8);
    const SystemOps ops(m, g);
    const CMat M = ops.generator(0.4);
    for (int i = 0; i < g.N(); ++i) {
      const double jp = japanese_bracket(g.kappa_at(i));
      Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(mode_block(M, g.N(), i));
      std::array<double, 3> ev{};
      for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(es.eigenvalues()(k).imag()) <= 1e-10 * jp);
        ev[k] = es.eigenvalues()(k).real();
      }
      std::sort(ev.begin(), ev.end());
      auto r = roots_trig(2.0, 0.0, jp).as_array();
      std::sort(r.begin(), r.end());
      for (int k = 0; k < 3; ++k) CHECK_THAT(ev[k], WithinAbs(r[k], 1e-10 * jp));
    }
    // no coupling between different modes
    CMat off = M;
    for (int i = 0; i < g.N(); ++i)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) off(r * g.N() + i, c * g.N() + i) = 0.0;
    CHECK(max_abs(off) == 0.0);
  }
  SECTION("g_E frozen at a point has real spectrum per mode") {
    const HyperbolicModel m = gallery("g_E");
    const FourierGrid g(16);
    for (double x0 : {0.0, 0.7, 2.0, 3.5}) {
      const double a = m.eval_a({1.0, x0, 0.0}), b = m.eval_b({1.0, x0, 0.0});
      const HyperbolicModel frozen(Expr(1.0), Expr(a) / (Expr::t() + Expr(1.0)), Expr(b), 0.5 * a, 1.0);
      const SystemOps ops(frozen, g);
      const CMat M = ops.generator(1.0);
      for (int i = 0; i < g.N(); ++i) {
        Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(mode_block(M, g.N(), i));
        const double jp = japanese_bracket(g.kappa_at(i));
        for (int k = 0; k < 3; ++k)
          CHECK(std::abs(es.eigenvalues()(k).imag()) <= 1e-6 * jp * jp * (1.0 + std::abs(a) + std::abs(b)));
      }
    }
  }
  SECTION("first block row matches the full generator") {
    const HyperbolicModel m = gallery("g_E").with_lower_order({parse_symbol("sin(x)"), Expr(0.5), parse_symbol("t*cos(x)")});
    const FourierGrid g(8);
    const SystemOps ops(m, g);
    const CMat M = ops.generator(0.3);
    CHECK(max_abs(M.topRows(g.N()) - ops.generator_row0(0.3)) == 0.0);
    CHECK(max_abs(M.block(g.N(), 0, g.N(), g.N()) - CMat(op_jp(g).mat)) == 0.0);
    CHECK(max_abs(M.block(2 * g.N(), g.N(), g.N(), g.N()) - CMat(op_jp(g).mat)) == 0.0);
    CHECK(max_abs(M.block(0, 0, g.N(), g.N()) - op_weyl(parse_symbol("sin(x)"), 0.3, g).mat) == 0.0);
  }
  SECTION("generator derivatives at zero") {
    const HyperbolicModel m = gallery("g_E");
    const FourierGrid g(6);
    const SystemOps ops(m, g);
    const double h = 1e-4;
    const CMat fd = (ops.generator(h) - ops.generator(0.0)) / h;
    // M is polynomial in t; the forward quotient differs by O(h) times the second derivative
    CHECK(max_abs(fd - ops.generator_derivative_at_zero(1)) <= 1e-3 * (1.0 + max_abs(ops.generator_derivative_at_zero(2))));
    CHECK(max_abs(ops.generator_derivative_at_zero(0) - ops.generator(0.0)) == 0.0);
  }
}

TEST_CASE("RK4 step", "[evolution]") {
  const HyperbolicModel m = gallery("g_E");
  const FourierGrid g(8);
  const SystemOps ops(m, g);
  SECTION("zero state stays zero") {
    const CMat Z = CMat::Zero(ops.dim(), 1);
    CHECK(max_abs(step(ops, Z, 0.1, 1e-3)) == 0.0);
  }
  SECTION("vanishing generator leaves the state unchanged") {
    StageOps s;
    s.row0 = CMat::Zero(g.N(), 3 * g.N());
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(g.N());
    s.jp = &zero;
    const CMat U = random_state(ops.dim(), 1);
    CHECK(max_abs(rk4_step(s, s, s, U, 0.1) - U) == 0.0);
  }
  SECTION("linearity") {
    const CVec U = random_state(ops.dim(), 2), V = random_state(ops.dim(), 3);
    const CMat a = step(ops, U, 0.2, 1e-3), b = step(ops, V, 0.2, 1e-3), c = step(ops, CMat(U + V), 0.2, 1e-3);
    CHECK(max_abs(c - a - b) <= 1e-14);
    CMat UV(ops.dim(), 2);
    UV << U, V;
    const CMat batch = step(ops, UV, 0.2, 1e-3);
    CHECK(max_abs(batch.col(0) - a) == 0.0);
    CHECK(max_abs(batch.col(1) - b) == 0.0);
  }
  SECTION("frozen coefficients: local error is fifth order against the exponential") {
    const HyperbolicModel c = constant_a_model(1.5);
    const FourierGrid g4(4);
    const SystemOps cops(c, g4);
    const CMat M = cops.generator(0.5);
    const CVec U = random_state(cops.dim(), 4);
    std::vector<double> err;
    for (double h : {4e-2, 2e-2, 1e-2}) {
      const CMat num = step(cops, U, 0.5, h);
      err.push_back((num - exp_iM(M, h) * U).norm());
    }
    for (std::size_t i = 1; i < err.size(); ++i) {
      const double ratio = err[i - 1] / err[i];
      CHECK(ratio >= 25.0);
      CHECK(ratio <= 40.0);
    }
  }
  SECTION("instability guard") {
    const CMat a = CMat::Ones(3, 1);
    CHECK_NOTHROW(guard_growth(a, a * 1e5, 0.1));
    CHECK_THROWS_AS(guard_growth(a, a * 1e7, 0.1), InstabilityDetected);
    CHECK_THROWS_AS(guard_growth(a, a * NAN, 0.1), InstabilityDetected);
    try {
      guard_growth(a, a * 1e7, 0.25);
    } catch (const InstabilityDetected& e) {
      CHECK(e.time() == 0.25);
      CHECK_THAT(e.growth(), WithinRel(1e7, 1e-12));
    }
  }
  SECTION("step counts and CFL bound") {
    CHECK(step_count(0.0, 1.0, 0.1) == 10);
    CHECK(step_count(0.0, 1.0, 0.3) == 4);
    CHECK_THROWS_AS(step_count(1.0, 0.5, 0.1), InvalidArgument);
    CHECK(ops.max_dt() <= 0.5 / japanese_bracket(8.0));
  }
}

TEST_CASE("evolution invariants", "[evolution]") {
  SECTION("constant a, b = 0: the symmetrizer energy is conserved") {
    const HyperbolicModel m = constant_a_model(2.0);
    const FourierGrid g(8);
    const SystemOps ops(m, g);
    const CVec U0 = random_state(ops.dim(), 5);
    const CMat S = ops.symmetrizer(0.0);
    double e0 = std::real(U0.dot(S * U0)), worst = 0.0;
    integrate(ops, CMat(U0), 0.01, 1.0, 0.25 * ops.max_dt(), Forcing(), [&](double, const CMat& U) {
      const CVec u = U.col(0);
      worst = std::max(worst, std::abs(std::real(u.dot(S * u)) - e0) / e0);
    });
    CHECK(worst <= 1e-6);
  }
  SECTION("x-independent coefficients keep modes separate") {
    const HyperbolicModel m = build_model("1", "1", "t^2/3", 1.0, 1.0);
    const FourierGrid g(8);
    const SystemOps ops(m, g);
    CMat U = CMat::Zero(ops.dim(), 1);
    const int i = g.K() + 3;
    for (int r = 0; r < 3; ++r) U(r * g.N() + i, 0) = cplx(1.0, 0.5 * r);
    const CMat V = integrate(ops, U, 0.01, 1.0, ops.max_dt());
    double leak = 0.0, kept = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int j = 0; j < g.N(); ++j) (j == i ? kept : leak) += std::norm(V(r * g.N() + j, 0));
    CHECK(leak <= 1e-10 * kept);
  }
  SECTION("fourth-order convergence on g_E") {
    const HyperbolicModel m = gallery("g_E");
    const SystemOps ops(m, FourierGrid(8));
    const CVec U0 = random_state(ops.dim(), 6);
    const double dt = ops.max_dt();
    const CMat u1 = integrate(ops, U0, 0.01, 0.5, dt);
    const CMat u2 = integrate(ops, U0, 0.01, 0.5, dt / 2);
    const CMat u4 = integrate(ops, U0, 0.01, 0.5, dt / 4);
    const double ratio = (u1 - u4).norm() / (u2 - u4).norm();
    CHECK(ratio >= 13.0);
    CHECK(ratio <= 20.0);
  }
}

TEST_CASE("weighted energy", "[evolution][energy]") {
  const HyperbolicModel m = gallery("g_E");
  const FourierGrid g(8);
  const SystemOps ops(m, g);
  const EnergyConstants c = search_energy_constants(ops, 0.01, 1.0);
  REQUIRE(c.found);
  CHECK(c.lambda0 >= 1.0);
  CHECK(c.N_star >= c.N_star0 + 1.0);
  CHECK(c.N_weight == c.N_star + 1.0);
  const CVec U0 = random_state(ops.dim(), 7);

  SECTION("positivity above lambda0") {
    for (double lam : {c.lambda0, 2.0 * c.lambda0})
      for (double t : {0.01, 0.1, 0.5, 1.0}) {
        const EnergyOps en(ops, lam);
        const CMat H = en.H(t);
        for (std::uint64_t s = 0; s < 20; ++s) {
          const CVec U = random_state(ops.dim(), 100 + s);
          const double lhs = std::real(U.dot(H * U));
          const double low = 0.5 * lam / t * (en.jp_m2().cast<cplx>().asDiagonal() * U).dot(U).real();
          CHECK(lhs >= low - 1e-10 * (1.0 + lhs));
        }
      }
  }
  SECTION("coercivity with a measured constant") {
    const EnergyOps en(ops, c.lambda0);
    double delta1 = INFINITY;
    const auto ts = logspace(0.01, 1.0, 12);
    for (double t : ts) delta1 = std::min(delta1, min_hermitian_eigenvalue(en.H(t)) / (t * t));
    CHECK(delta1 > 0.0);
    for (double t : ts) {
      const CVec U = random_state(ops.dim(), static_cast<std::uint64_t>(1000 * t));
      CHECK(std::real(U.dot(en.H(t) * U)) >= delta1 * t * t * (1.0 - 1e-10));
    }
  }
  SECTION("energy derivative agrees with finite differences of the trace") {
    const EvolveConfig cfg = config_from_constants(c, 0.01, 1.0, 2.5e-4);
    const EvolveResult r = evolve(ops, U0, Forcing(), cfg);
    REQUIRE(r.verdict == "completed");
    const EnergyCheck ck = check_energy_inequality(r.trace, cfg);
    CHECK(ck.max_defect <= 1e-2);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace.t[i] > r.trace.t[i - 1]);
  }
  SECTION("inequality holds with searched constants and halving dt shrinks the defect") {
    std::vector<double> defect;
    for (double dt : {1e-3, 5e-4, 2.5e-4}) {
      const EvolveConfig cfg = config_from_constants(c, 0.01, 1.0, dt);
      const EvolveResult r = evolve(ops, U0, Forcing(), cfg);
      const EnergyCheck ck = check_energy_inequality(r.trace, cfg);
      CHECK(ck.pass);
      CHECK(ck.min_margin >= 0.0);
      CHECK(ck.integrated_pass);
      defect.push_back(ck.max_defect);
    }
    CHECK(defect[0] / defect[1] >= 3.0);
    CHECK(defect[1] / defect[2] >= 3.0);
  }
  SECTION("too small N* gives negative margins") {
    // start from the top generalized eigenvector of (G, H) at the search time
    // t <= 1/2 where t (mu - gamma) is largest
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.times.size() && c.times[i] <= 0.5; ++i)
      if (c.times[i] * (c.mu_max[i] - c.gamma) > c.times[best] * (c.mu_max[best] - c.gamma)) best = i;
    const double ts = c.times[best];
    REQUIRE(ts * (c.mu_max[best] - c.gamma) > 0.0);
    const EnergyOps en(ops, c.lambda0);
    Eigen::LLT<CMat> llt(en.H(ts));
    const CMat Linv = llt.matrixL().solve(CMat::Identity(ops.dim(), ops.dim()));
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(CMat(Linv * en.G(ts) * Linv.adjoint())));
    const CVec v = Linv.adjoint() * es.eigenvectors().col(ops.dim() - 1);
    CHECK_THAT(es.eigenvalues()(ops.dim() - 1), WithinRel(c.mu_max[best], 1e-10));
    EvolveConfig cfg = config_from_constants(c, ts, 1.0, 1e-4);
    cfg.N_star = 0.0;
    cfg.N_weight = 1.0;
    const EnergyCheck ck = check_energy_inequality(evolve(ops, v, Forcing(), cfg).trace, cfg);
    CHECK(ck.min_margin < 0.0);
    CHECK(ck.min_margin_t < ts + 0.1);
  }
  SECTION("zero data with forcing") {
    const EvolveConfig cfg = config_from_constants(c, 0.01, 1.0, 1e-3);
    const Forcing f(parse_symbol("cos(x)+t*sin(2*x)"));
    const EvolveResult r = evolve(ops, CVec::Zero(ops.dim()), f, cfg);
    CHECK(r.trace.norm.back() > 0.0);
    const EnergyCheck ck = check_energy_inequality(r.trace, cfg);
    CHECK(ck.pass);
    CHECK(ck.integrated_pass);
  }
  SECTION("invalid configurations") {
    EvolveConfig cfg;
    cfg.eps_start = 0.0;
    CHECK_THROWS_AS(evolve(ops, U0, Forcing(), cfg), InvalidArgument);
    cfg.eps_start = 0.1;
    cfg.N_weight = -1.0;
    CHECK_THROWS_AS(evolve(ops, U0, Forcing(), cfg), InvalidArgument);
    CHECK_THROWS_AS(evolve(ops, CVec::Zero(3), Forcing(), EvolveConfig()), InvalidArgument);
  }
}

TEST_CASE("forcing and initial data", "[evolution]") {
  const FourierGrid g(6);
  SECTION("projection of a trigonometric polynomial") {
    const CVec v = project_function(parse_symbol("3+cos(2*x)"), 0.0, g);
    const double s = std::sqrt(g.period());
    CHECK_THAT(v(g.K()).real(), WithinAbs(3.0 * s, 1e-13));
    CHECK_THAT(v(g.K() + 2).real(), WithinAbs(0.5 * s, 1e-13));
    CHECK_THAT(v(g.K() - 2).real(), WithinAbs(0.5 * s, 1e-13));
    CHECK_THAT(v.squaredNorm(), WithinRel(g.period() * 9.5, 1e-13));
  }
  SECTION("state layout") {
    const SystemOps ops(gallery("g_E"), g);
    const CVec e = CVec::Unit(g.N(), g.K() + 1);
    const CVec U = state_from_data(ops, e, 2.0 * e, 3.0 * e);
    const double jp = std::sqrt(2.0);
    CHECK(U(g.K() + 1) == cplx(-3.0));
    CHECK_THAT(std::abs(U(g.N() + g.K() + 1) - cplx(0.0, -2.0 * jp)), WithinAbs(0.0, 1e-15));
    CHECK_THAT(U(2 * g.N() + g.K() + 1).real(), WithinRel(2.0, 1e-15));
  }
}
