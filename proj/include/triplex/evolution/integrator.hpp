#pragma once

// Classical RK4 for d_t U = i (M(t) U + F(t)). U may hold several states as
// columns; the forcing is added to every column.

#include <cmath>

#include "triplex/errors.hpp"
#include "triplex/evolution/system.hpp"

namespace triplex {

inline constexpr double instability_threshold = 1e6;

/// Generator and forcing at one time, assembled once per RK stage. Only the
/// first block row of M is dense.
struct StageOps {
  CMat row0;
  const Eigen::VectorXd* jp = nullptr;
  CVec F;
  bool forced = false;
};

inline StageOps stage_ops(const SystemOps& ops, double t, const Forcing& f) {
  StageOps s{ops.generator_row0(t), &ops.jp(), CVec(), f.active()};
  if (s.forced) s.F = f.at(t, ops.grid());
  return s;
}

/// i (M U + F)
inline CMat rhs(const StageOps& s, const CMat& U) {
  const Eigen::Index N = s.row0.rows();
  CMat r(U.rows(), U.cols());
  r.topRows(N).noalias() = s.row0 * U;
  r.middleRows(N, N) = s.jp->asDiagonal() * U.topRows(N);
  r.bottomRows(N) = s.jp->asDiagonal() * U.middleRows(N, N);
  if (s.forced) r.colwise() += s.F;
  return cplx(0.0, 1.0) * r;
}

/// One step given the operators at t, t + dt/2 and t + dt.
inline CMat rk4_step(const StageOps& s0, const StageOps& sh, const StageOps& s1, const CMat& U, double dt) {
  const CMat k1 = rhs(s0, U);
  const CMat k2 = rhs(sh, U + (0.5 * dt) * k1);
  const CMat k3 = rhs(sh, U + (0.5 * dt) * k2);
  const CMat k4 = rhs(s1, U + dt * k3);
  return U + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Aborts with InstabilityDetected when the norm grows by more than the
/// threshold in one step or stops being finite.
inline void guard_growth(const CMat& before, const CMat& after, double t) {
  const double n0 = before.norm(), n1 = after.norm();
  if (!std::isfinite(n1)) throw InstabilityDetected(t, INFINITY);
  if (n0 > 0.0 && n1 > instability_threshold * n0) throw InstabilityDetected(t, n1 / n0);
  if (n0 == 0.0 && n1 > instability_threshold) throw InstabilityDetected(t, n1);
}

inline CMat step(const SystemOps& ops, const CMat& U, double t, double dt, const Forcing& f = Forcing()) {
  const CMat out = rk4_step(stage_ops(ops, t, f), stage_ops(ops, t + 0.5 * dt, f), stage_ops(ops, t + dt, f), U, dt);
  guard_growth(U, out, t + dt);
  return out;
}

/// Number of uniform steps covering [t0, t1] with step at most dt_max.
inline int step_count(double t0, double t1, double dt_max) {
  if (!(t1 > t0)) throw InvalidArgument("time interval must be nonempty");
  if (!(dt_max > 0.0)) throw InvalidArgument("time step must be positive");
  return std::max(1, static_cast<int>(std::ceil((t1 - t0) / dt_max * (1.0 - 1e-12))));
}

/// Uniform-step integration of all columns from t0 to t1. `observe(t, U)` is
/// called at t0 and after every step.
template <class Observer>
CMat integrate(const SystemOps& ops, CMat U, double t0, double t1, double dt_max, const Forcing& f, Observer&& observe) {
  const int n = step_count(t0, t1, dt_max);
  const double dt = (t1 - t0) / n;
  observe(t0, U);
  StageOps s0 = stage_ops(ops, t0, f);
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * dt;
    const double tn = (i + 1 == n) ? t1 : t0 + (i + 1) * dt;
    StageOps sh = stage_ops(ops, t + 0.5 * dt, f);
    StageOps s1 = stage_ops(ops, tn, f);
    CMat next = rk4_step(s0, sh, s1, U, dt);
    guard_growth(U, next, tn);
    U = std::move(next);
    s0 = std::move(s1);
    observe(tn, U);
  }
  return U;
}

inline CMat integrate(const SystemOps& ops, const CMat& U, double t0, double t1, double dt_max,
                      const Forcing& f = Forcing()) {
  return integrate(ops, U, t0, t1, dt_max, f, [](double, const CMat&) {});
}

}  // namespace triplex
