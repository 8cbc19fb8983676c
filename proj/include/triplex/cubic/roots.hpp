#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include "triplex/errors.hpp"
#include "triplex/symbol/model.hpp"

namespace triplex {

inline constexpr double tol_root = 1e-10;

struct Discriminants {
  double delta1 = 0.0;
  double delta0 = 0.0;
  double delta = 0.0;  // normalized by 27 jp^6
};

/// Discriminants of tau^3 + q1 tau^2 + q2 tau + q3.
inline Discriminants discriminants(double q1, double q2, double q3, double jp) {
  if (!(jp >= 1.0)) throw InvalidArgument("jp must be >= 1");
  Discriminants d;
  d.delta1 = 27.0 * q3 - 9.0 * q1 * q2 + 2.0 * q1 * q1 * q1;
  d.delta0 = q1 * q1 - 3.0 * q2;
  const double jp3 = jp * jp * jp;
  d.delta = -(d.delta1 * d.delta1 - 4.0 * d.delta0 * d.delta0 * d.delta0) / (27.0 * jp3 * jp3);
  return d;
}

/// Real roots of tau^3 - a jp^2 tau - b jp^3, sorted descending.
struct RootTriple {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;

  std::array<double, 3> as_array() const { return {lambda1, lambda2, lambda3}; }
  double operator[](int k) const { return k == 0 ? lambda1 : (k == 1 ? lambda2 : lambda3); }
};

inline double cubic_residual(double tau, double a, double b, double jp) {
  return tau * tau * tau - a * jp * jp * tau - b * jp * jp * jp;
}

namespace detail {

inline RootTriple sorted_triple(std::array<double, 3> r) {
  std::sort(r.begin(), r.end(), std::greater<>());
  return {r[0], r[1], r[2]};
}

}  // namespace detail

/// Trigonometric root formula. theta is obtained as atan2(sqrt(Delta), 3 sqrt3 b),
/// which equals arccos(3 sqrt3 b / (2 a^{3/2})) and stays well conditioned near
/// double roots.
inline RootTriple roots_trig(double a, double b, double jp) {
  if (a <= 0.0) {
    if (a >= -tol_root && std::abs(b) <= tol_root * tol_root) return {0.0, 0.0, 0.0};
    throw NonHyperbolic("cubic has complex roots (a <= 0, b != 0)");
  }
  const double a3 = a * a * a;
  double disc = 4.0 * a3 - 27.0 * b * b;
  // |arccos argument| <= 1 + tol_root  <=>  disc >= -((1+tol)^2 - 1) 4 a^3
  if (disc < -(2.0 * tol_root + tol_root * tol_root) * 4.0 * a3)
    throw NonHyperbolic("cubic has complex roots (4a^3 - 27b^2 = " + std::to_string(disc) + ")");
  disc = std::max(disc, 0.0);
  const double theta = std::atan2(std::sqrt(disc), 3.0 * std::sqrt(3.0) * b);
  const double rho = std::sqrt(a / 3.0) * jp;
  std::array<double, 3> r{};
  for (int k = 0; k < 3; ++k) r[k] = 2.0 * rho * std::cos(theta / 3.0 + 2.0 * std::numbers::pi * k / 3.0);
  return detail::sorted_triple(r);
}

/// Independent root computation: eigenvalues of the companion matrix, followed
/// by Newton polishing of the dominant (always simple) root and deflation to a
/// quadratic. Companion eigenvalues alone are only sqrt(eps) accurate at
/// double roots. The roots are jp times those of sigma^3 - a sigma - b, which
/// avoids rounding a jp^2 and b jp^3 (that alone splits an exact double root).
inline RootTriple root_oracle(double a, double b, double jp) {
  if (!(jp >= 1.0)) throw InvalidArgument("jp must be >= 1");
  const double A = a;
  const double B = b;
  const double scale = std::max({1.0, std::sqrt(std::abs(A)), std::cbrt(std::abs(B))});
  Eigen::Matrix3d C;
  C << 0.0, A, B, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
  Eigen::EigenSolver<Eigen::Matrix3d> es(C, false);
  const auto ev = es.eigenvalues();
  int dom = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(ev[k].real()) > std::abs(ev[dom].real())) dom = k;
  double r1 = ev[dom].real();
  for (int it = 0; it < 8; ++it) {
    const double f = r1 * r1 * r1 - A * r1 - B;
    const double fp = 3.0 * r1 * r1 - A;
    if (fp == 0.0) break;
    const double step = f / fp;
    r1 -= step;
    if (std::abs(step) <= 1e-17 * scale) break;
  }
  // Remaining roots solve tau^2 + r1 tau + (r1^2 - A) = 0.
  double D = 4.0 * A - 3.0 * r1 * r1;
  if (D < -tol_root * scale * scale) {
    throw NonHyperbolic("companion matrix has complex eigenvalues (deflated discriminant " + std::to_string(D) + ")");
  }
  D = std::max(D, 0.0);
  const double s = std::sqrt(D);
  // Avoid cancellation: compute the larger-magnitude root first.
  const double q = r1 >= 0.0 ? (-r1 - s) / 2.0 : (-r1 + s) / 2.0;
  const double prod = r1 * r1 - A;
  const double other = q != 0.0 ? prod / q : 0.0;
  return detail::sorted_triple({jp * r1, jp * q, jp * other});
}

/// Root separation delta_k = 3 lambda_k^2 - a jp^2 together with the measured
/// constants of the separation estimates.
struct RootSeparation {
  std::array<double, 3> delta{};
  RootTriple roots;
  double measured_cH = 0.0;
  double measured_cE = 0.0;
};

inline RootSeparation root_separation(const HyperbolicModel& m, const Point& p) {
  const double a = m.eval_a(p);
  const double b = m.eval_b(p);
  const double jp = japanese_bracket(p.xi);
  RootSeparation s;
  s.roots = roots_trig(a, b, jp);
  double dmin = INFINITY;
  for (int k = 0; k < 3; ++k) {
    s.delta[k] = 3.0 * s.roots[k] * s.roots[k] - a * jp * jp;
    dmin = std::min(dmin, std::abs(s.delta[k]));
  }
  const double alpha = m.alpha().eval(p);
  if (p.t > 0.0) {
    s.measured_cH = dmin / (p.t * jp * jp);
    s.measured_cE = dmin / (std::sqrt(p.t * (p.t + alpha)) * jp * jp);
  }
  return s;
}

}  // namespace triplex
