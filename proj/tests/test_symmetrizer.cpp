#include <catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <random>

#include "triplex/symbol/gallery.hpp"
#include "triplex/symmetrizer/symmetrizer.hpp"

using namespace triplex;
using Catch::Matchers::WithinAbs;

namespace {

// Leibniz formula over all six permutations.
double det_leibniz(const Mat3& M) {
  std::array<int, 3> perm{0, 1, 2};
  double det = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        if (perm[i] > perm[j]) ++inversions;
    double term = inversions % 2 ? -1.0 : 1.0;
    for (int i = 0; i < 3; ++i) term *= M(i, perm[i]);
    det += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

}  // namespace

TEST_CASE("system matrices", "[symmetrizer]") {
  SECTION("triple-root point") {
    const Mat3 S = matrix_S(0, 0);
    Mat3 expected = Mat3::Zero();
    expected(0, 0) = 3;
    CHECK(S == expected);
  }
  SECTION("SA closed form") {
    const Mat3 SA = matrix_S(1, 0) * matrix_A(1, 0);
    Mat3 expected = Mat3::Zero();
    expected(0, 1) = expected(1, 0) = 2;
    CHECK(SA == expected);
    const Mat3 SA32 = matrix_S(3, 2) * matrix_A(3, 2);
    CHECK(SA32 == SA32.transpose());
    CHECK(SA32(2, 2) == -6.0);
  }
  SECTION("B carries the lower-order row") {
    const Mat3 B = matrix_B(1, 2, 3);
    CHECK(B.row(0) == Eigen::RowVector3d(1, 2, 3));
    CHECK(B.bottomRows(2).isZero());
  }
}

TEST_CASE("algebraic identities", "[symmetrizer]") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 10.0), us(-10.0, 10.0);
  SECTION("SA symmetric and det S = Delta on random points") {
    for (int i = 0; i < 2000; ++i) {
      const PointEval pe = point_eval(u(rng), us(rng));
      const auto c = check_SA_symmetric(pe);
      CHECK(c.asymmetry <= 1e-13 * c.scale);
      CHECK(c.closed_form_deviation <= 1e-13 * c.scale);
      const double disc = 4 * pe.a * pe.a * pe.a - 27 * pe.b * pe.b;
      const double leib = det_leibniz(matrix_S(pe));
      CHECK(std::abs(leib - disc) <= 1e-12 * (std::abs(4 * pe.a * pe.a * pe.a) + 27 * pe.b * pe.b + 1));
    }
  }
  SECTION("stress scale") {
    const auto c = check_SA_symmetric(point_eval(1e6, 3e8));
    CHECK(c.asymmetry <= 1e-13 * c.scale);
    CHECK(check_SA_symmetric(point_eval(0, 0)).asymmetry == 0.0);
  }
  SECTION("shifted determinant against the Leibniz oracle") {
    for (int i = 0; i < 500; ++i) {
      const double t = u(rng) / 10 + 1e-3;
      const PointEval pe = point_eval(u(rng), us(rng), t, u(rng));
      const double delta = u(rng) / 10;
      const double s = pe.t + pe.alpha;
      const double oracle = det_leibniz(matrix_S(pe) - 2 * delta * t * matrix_J(pe));
      const double disc = 4 * pe.a * pe.a * pe.a - 27 * pe.b * pe.b;
      const auto d = det_identities(pe, delta);
      CHECK_THAT(d.remainder_ratio, WithinAbs(std::abs(oracle - disc) / (delta * t * s * s), 1e-6 * (1 + d.remainder_ratio)));
    }
    const auto z = det_identities(point_eval(0, 0, 0.5, 0), 0.3);
    CHECK(z.remainder_ratio == 0.0);
  }
  SECTION("remainder ratio bounded on g_zero_b") {
    const HyperbolicModel m = gallery("g_zero_b");
    const auto g = default_condition_grid(m, 32, 32);
    double worst = 0.0;
    for (double t : g.t)
      for (double x : g.x) {
        const auto d = det_identities(point_eval(m, {t, x, 1.0}), 0.1);
        CHECK(std::abs(d.detS_minus_Delta) <= 1e-12 * point_eval(m, {t, x, 1.0}).scale() * (1 + m.eval_a({t, x, 1.0})));
        worst = std::max(worst, d.remainder_ratio);
      }
    CHECK(std::isfinite(worst));
    CHECK(worst < 100.0);
  }
}

TEST_CASE("symmetrizer lower bound", "[symmetrizer]") {
  SECTION("g_zero_b positive, certified on the grid") {
    const HyperbolicModel m = gallery("g_zero_b");
    const auto g = default_condition_grid(m, 24, 24);
    const auto r = lower_bound_delta(m, g);
    CHECK(r.delta_sym > 0.0);
    for (const auto& row : r.rows) {
      const PointEval pe = point_eval(m, row.p);
      CHECK(min_eigenvalue(matrix_S(pe) - 2 * r.delta_sym * row.p.t * matrix_J(pe)) >= -1e-10 * pe.scale());
    }
    CHECK(r.rows.size() == g.size());
  }
  SECTION("g_ex21p runs and reports") {
    const HyperbolicModel m = gallery("g_ex21p");
    const auto r = lower_bound_delta(m, default_condition_grid(m, 16, 16));
    CHECK(r.delta_sym >= 0.0);
  }
  SECTION("monotone under alpha shifts") {
    for (const char* base : {"g_zero_b", "g_E", "g_ex21p"}) {
      const HyperbolicModel m = gallery(base);
      const HyperbolicModel me = m.with_alpha_shift(0.05);
      const auto g = default_condition_grid(m, 16, 16);
      INFO(base);
      CHECK(lower_bound_delta(me, g).delta_sym >= lower_bound_delta(m, g).delta_sym * (1 - 2e-4) - 1e-6);
    }
  }
}

TEST_CASE("regularized symmetrizer", "[symmetrizer]") {
  SECTION("example") {
    const Mat3 St = build_Stilde(point_eval(0, 0), 1.0, 1.0);
    CHECK(St == Eigen::Vector3d(4, 1, 1).asDiagonal().toDenseMatrix());
    CHECK_THROWS_AS(build_Stilde(point_eval(0, 0), 1.0, 0.0), InvalidArgument);
  }
  SECTION("eigenvalues shift uniformly") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int i = 0; i < 200; ++i) {
      PointEval pe = point_eval(u(rng), u(rng) - 1.5);
      pe.xi = 4 * u(rng);
      const double lambda = 0.5 + u(rng), t = 0.1 + u(rng);
      const double shift = lambda / (t * (1 + pe.xi * pe.xi));
      Eigen::SelfAdjointEigenSolver<Mat3> e0(matrix_S(pe)), e1(build_Stilde(pe, lambda, t));
      for (int k = 0; k < 3; ++k)
        CHECK_THAT(e1.eigenvalues()(k), WithinAbs(e0.eigenvalues()(k) + shift, 1e-10 * pe.scale()));
    }
  }
  SECTION("lambda0 on g_E") {
    const HyperbolicModel m = gallery("g_E");
    const auto g = default_condition_grid(m, 16, 16);
    const double lambda0 = search_lambda0(m, g);
    REQUIRE(lambda0 > 0.0);
    for (double t : g.t)
      for (double x : g.x) {
        const PointEval pe = point_eval(m, {t, x, 1.0});
        CHECK(min_eigenvalue(build_Stilde(pe, lambda0, t)) >= lambda0 / 2 / (t * 2.0) * (1 - 1e-12));
      }
  }
}
