#pragma once

// Pointwise 3x3 matrices of the first-order system D_t U = (A <D> + B) U + F
// and the symmetrizer S with S A symmetric and det S = 4a^3 - 27b^2.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "triplex/cubic/conditions.hpp"
#include "triplex/parallel.hpp"
#include "triplex/symbol/model.hpp"

namespace triplex {

using Mat3 = Eigen::Matrix3d;

struct PointEval {
  double t = 0.0, x = 0.0, xi = 0.0;
  double a = 0.0, b = 0.0, alpha = 0.0;

  Point point() const { return {t, x, xi}; }
  /// Tolerance scale for matrix identities: entries are polynomial in a, b.
  double scale() const { return 1.0 + a * a + b * b + (t + alpha) * (t + alpha); }
};

inline PointEval point_eval(const HyperbolicModel& m, const Point& p) {
  PointEval e;
  e.t = p.t;
  e.x = p.x;
  e.xi = p.xi;
  e.alpha = m.alpha().eval(p);
  e.a = m.eval_a(p);
  e.b = m.eval_b(p);
  return e;
}

inline PointEval point_eval(double a, double b, double t = 0.0, double alpha = 0.0) {
  PointEval e;
  e.a = a;
  e.b = b;
  e.t = t;
  e.alpha = alpha;
  return e;
}

inline Mat3 matrix_A(double a, double b) {
  Mat3 A;
  A << 0, a, b, 1, 0, 0, 0, 1, 0;
  return A;
}
inline Mat3 matrix_A(const PointEval& pe) { return matrix_A(pe.a, pe.b); }

inline Mat3 matrix_B(double b10, double b11, double b12) {
  Mat3 B = Mat3::Zero();
  B(0, 0) = b10;
  B(0, 1) = b11;
  B(0, 2) = b12;
  return B;
}
inline Mat3 matrix_B(const LowerOrderTerms& lot, const PointEval& pe) {
  const Point p = pe.point();
  return matrix_B(lot.b10.eval(p), lot.b11.eval(p), lot.b12.eval(p));
}

inline Mat3 matrix_S(double a, double b) {
  Mat3 S;
  S << 3, 0, -a, 0, 2 * a, 3 * b, -a, 3 * b, a * a;
  return S;
}
inline Mat3 matrix_S(const PointEval& pe) { return matrix_S(pe.a, pe.b); }

inline Mat3 matrix_J(double a) { return Eigen::Vector3d(1.0, 1.0, a).asDiagonal(); }
inline Mat3 matrix_J(const PointEval& pe) { return matrix_J(pe.a); }

/// Closed form of S A.
inline Mat3 matrix_SA(double a, double b) {
  Mat3 M;
  M << 0, 2 * a, 3 * b, 2 * a, 3 * b, 0, 3 * b, 0, -a * b;
  return M;
}

/// S + lambda t^{-1} <xi>^{-2} I.
inline Mat3 build_Stilde(const PointEval& pe, double lambda, double t) {
  if (!(t > 0.0)) throw InvalidArgument("build_Stilde requires t > 0");
  if (!(lambda > 0.0)) throw InvalidArgument("build_Stilde requires lambda > 0");
  const double jp = japanese_bracket(pe.xi);
  return matrix_S(pe) + (lambda / (t * jp * jp)) * Mat3::Identity();
}

inline double min_eigenvalue(const Mat3& M) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

struct SymmetryCheck {
  double asymmetry = 0.0;           // max |SA - (SA)^T|
  double closed_form_deviation = 0.0;  // max |SA - displayed form|
  double scale = 1.0;
};

inline SymmetryCheck check_SA_symmetric(const PointEval& pe) {
  const Mat3 SA = matrix_S(pe) * matrix_A(pe);
  SymmetryCheck c;
  c.asymmetry = (SA - SA.transpose()).cwiseAbs().maxCoeff();
  c.closed_form_deviation = (SA - matrix_SA(pe.a, pe.b)).cwiseAbs().maxCoeff();
  c.scale = 1.0 + pe.a * pe.a + std::abs(pe.b);
  return c;
}

struct DetIdentities {
  double detS_minus_Delta = 0.0;
  double remainder_ratio = 0.0;  // |det(S - 2 delta t J) - Delta| / (delta t (t+alpha)^2)
};

inline DetIdentities det_identities(const PointEval& pe, double delta) {
  if (!(pe.t > 0.0)) throw InvalidArgument("det_identities requires t > 0");
  const double disc = 4.0 * pe.a * pe.a * pe.a - 27.0 * pe.b * pe.b;
  DetIdentities d;
  d.detS_minus_Delta = matrix_S(pe).determinant() - disc;
  if (delta != 0.0) {
    const double s = pe.t + pe.alpha;
    const double detd = (matrix_S(pe) - 2.0 * delta * pe.t * matrix_J(pe)).determinant();
    d.remainder_ratio = std::abs(detd - disc) / (std::abs(delta) * pe.t * s * s);
  }
  return d;
}

struct SymmetrizerRow {
  Point p;
  double a = 0.0, b = 0.0;
  double mineig_S = 0.0;
  double delta_sym_local = 0.0;
};

struct SymmetrizerBound {
  double delta_sym = 0.0;
  Point witness{};
  std::vector<SymmetrizerRow> rows;
};

namespace detail {

inline bool sym_admissible(const PointEval& pe, double delta) {
  const Mat3 M = matrix_S(pe) - 2.0 * delta * pe.t * matrix_J(pe);
  return min_eigenvalue(M) >= -1e-10 * pe.scale();
}

/// Largest delta with S - 2 delta t J >= -tol at this point, by bisection to
/// 1e-4 relative; ties resolve to the lower end.
inline double local_delta_sym(const PointEval& pe, double delta_floor) {
  if (!sym_admissible(pe, delta_floor)) return 0.0;
  double lo = delta_floor, hi = 2.0 * delta_floor;
  while (sym_admissible(pe, hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return lo;
  }
  while (hi - lo > 1e-4 * lo) {
    const double mid = 0.5 * (lo + hi);
    if (sym_admissible(pe, mid))
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace detail

/// Largest delta with S - 2 delta t J positive semidefinite (to 1e-10 scaled)
/// at every grid point; 0 when delta = 1e-8 already fails somewhere.
inline SymmetrizerBound lower_bound_delta(const HyperbolicModel& m, const ConditionGrid& grid) {
  for (double t : grid.t)
    if (!(t > 0.0)) throw InvalidArgument("symmetrizer grids must contain t > 0 only");
  constexpr double floor = 1e-8;
  const std::size_t nx = grid.x.size(), nz = grid.xi.size();
  SymmetrizerBound out;
  out.rows.resize(grid.size());
  parallel_for(grid.t.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < nx; ++j)
      for (std::size_t k = 0; k < nz; ++k) {
        const Point p{grid.t[i], grid.x[j], grid.xi[k]};
        const PointEval pe = point_eval(m, p);
        SymmetrizerRow& r = out.rows[(i * nx + j) * nz + k];
        r.p = p;
        r.a = pe.a;
        r.b = pe.b;
        r.mineig_S = min_eigenvalue(matrix_S(pe));
        r.delta_sym_local = detail::local_delta_sym(pe, floor);
      }
  });
  std::size_t best = 0;
  for (std::size_t n = 1; n < out.rows.size(); ++n)
    if (out.rows[n].delta_sym_local < out.rows[best].delta_sym_local) best = n;
  out.delta_sym = out.rows.empty() ? 0.0 : out.rows[best].delta_sym_local;
  if (!out.rows.empty()) out.witness = out.rows[best].p;
  return out;
}

inline SymmetrizerBound lower_bound_delta(const HyperbolicModel& m) {
  return lower_bound_delta(m, default_condition_grid(m));
}

/// Smallest lambda = 2^k (k = 0..14) with min eig S~ >= (lambda/2) t^{-1}<xi>^{-2}
/// on the grid; -1 when none qualifies.
inline double search_lambda0(const HyperbolicModel& m, const ConditionGrid& grid) {
  double worst = INFINITY;  // min over points of mineig(S) * t <xi>^2
  for (double t : grid.t)
    for (double x : grid.x)
      for (double xi : grid.xi) {
        const PointEval pe = point_eval(m, {t, x, xi});
        const double jp = japanese_bracket(xi);
        worst = std::min(worst, min_eigenvalue(matrix_S(pe)) * t * jp * jp);
      }
  for (int k = 0; k <= 14; ++k) {
    const double lambda = std::ldexp(1.0, k);
    if (worst >= -lambda / 2.0) return lambda;
  }
  return -1.0;
}

}  // namespace triplex
