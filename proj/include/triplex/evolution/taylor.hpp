#pragma once

// Taylor expansion of the solution at t = 0:
//   U_j = D_t^j U(0),  D_t^{j+1} U = sum_i C(j,i) (D_t^i M) (D_t^{j-i} U) + D_t^j F,
//   U_M(t) = sum_{j<=M} U_j (i t)^j / j!.

#include <cmath>
#include <vector>

#include "triplex/evolution/integrator.hpp"

namespace triplex {

struct TaylorLift {
  std::vector<CVec> U;      // U_0 .. U_M
  CVec W_init;              // U(0) - U_M(0)
  std::vector<double> residual;  // |D_t^j W(0)| / scale_j, j = 0..M
  std::vector<double> scale;     // 1 + |U_j|

  int order() const { return static_cast<int>(U.size()) - 1; }

  CVec at(double t) const {
    CVec s = CVec::Zero(U.front().size());
    cplx p = 1.0;
    for (int j = 0; j <= order(); ++j) {
      if (j > 0) p *= cplx(0.0, t) / static_cast<double>(j);
      s += p * U[j];
    }
    return s;
  }

  /// D_t^j U_M at t = 0, from the polynomial.
  CVec derivative_at_zero(int j) const {
    if (j > order()) return CVec::Zero(U.front().size());
    // d_t^j (i t)^j / j! = i^j, and D_t^j = (-i)^j d_t^j
    return std::pow(cplx(0.0, -1.0), j) * std::pow(cplx(0.0, 1.0), j) * U[j];
  }
};

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline TaylorLift taylor_lift(const SystemOps& ops, const CVec& u0, const CVec& u1, const CVec& u2, const Forcing& f,
                              int M_order) {
  if (M_order < 0 || M_order > 6) throw InvalidArgument("Taylor order must lie in [0, 6]");
  const int N = ops.grid().N();
  if (u0.size() != N || u1.size() != N || u2.size() != N) throw InvalidArgument("initial data has wrong dimension");
  TaylorLift lift;
  lift.U.push_back(state_from_data(ops, u0, u1, u2));
  std::vector<CMat> DM;  // D_t^i M(0) = (-i)^i d_t^i M(0)
  for (int i = 0; i < M_order; ++i) DM.push_back(std::pow(cplx(0.0, -1.0), i) * ops.generator_derivative_at_zero(i));
  for (int j = 0; j < M_order; ++j) {
    CVec next = std::pow(cplx(0.0, -1.0), j) * f.derivative_at_zero(j, ops.grid());
    for (int i = 0; i <= j; ++i) next += binomial(j, i) * (DM[i] * lift.U[j - i]);
    lift.U.push_back(next);
  }
  lift.W_init = lift.U[0] - lift.at(0.0);
  for (int j = 0; j <= M_order; ++j) {
    const double s = 1.0 + lift.U[j].norm();
    lift.scale.push_back(s);
    lift.residual.push_back((lift.U[j] - lift.derivative_at_zero(j)).norm() / s);
  }
  return lift;
}

struct TaylorFdCheck {
  double h = 0.0;
  std::vector<double> rel_error;  // j = 0..jmax
  double max_rel_error = 0.0;
};

/// Compares i^j U_j with derivatives at t = 0 of an RK4 evolution sampled at
/// t = m h, m = 0..6, through the interpolating polynomial of degree 6.
inline TaylorFdCheck taylor_fd_check(const SystemOps& ops, const TaylorLift& lift, const Forcing& f, int jmax = 3,
                                     double rho = 0.1, int substeps = 8) {
  if (jmax > lift.order()) throw InvalidArgument("finite-difference check order exceeds the lift order");
  constexpr int npts = 7;
  const double mnorm = spectral_norm(ops.generator(0.0));
  TaylorFdCheck c;
  c.h = rho / (1.0 + mnorm);
  std::vector<CVec> samples;
  CMat U = lift.U[0];
  samples.push_back(U.col(0));
  for (int m = 1; m < npts; ++m) {
    U = integrate(ops, U, (m - 1) * c.h, m * c.h, c.h / substeps, f);
    samples.push_back(U.col(0));
  }
  // U(m h) = sum_l c_l m^l  ->  d_t^l U(0) = l! c_l / h^l
  Eigen::MatrixXd V(npts, npts);
  for (int m = 0; m < npts; ++m)
    for (int l = 0; l < npts; ++l) V(m, l) = std::pow(static_cast<double>(m), l);
  const Eigen::MatrixXd Vinv = V.inverse();
  for (int j = 0; j <= jmax; ++j) {
    CVec d = CVec::Zero(samples[0].size());
    for (int m = 0; m < npts; ++m) d += Vinv(j, m) * samples[m];
    double fact = 1.0;
    for (int i = 2; i <= j; ++i) fact *= i;
    d *= fact / std::pow(c.h, j);
    const CVec expect = std::pow(cplx(0.0, 1.0), j) * lift.U[j];
    const double ref = std::max(expect.norm(), 1e-300);
    c.rel_error.push_back((d - expect).norm() / ref);
    c.max_rel_error = std::max(c.max_rel_error, c.rel_error.back());
  }
  return c;
}

}  // namespace triplex
