#pragma once

// Finite-dimensional check of
//   Re(S U, U) >= delta t (|U1|^2 + |U2|^2 + (a U3, U3)) - C t^{-1} |<D>^{-1} U|^2
// as a Hermitian eigenvalue problem on the truncated basis.

#include <algorithm>
#include <cmath>
#include <vector>

#include "triplex/parallel.hpp"
#include "triplex/quantize/weyl.hpp"

namespace triplex {

/// Precomputed pieces of the inequality at one time t.
struct FpOperators {
  double t = 0.0;
  CMat S;       // Hermitian part of Op^w(S)
  CMat J;       // blockdiag(I, I, Herm Op^w(a))
  CMat jp_m2;   // blockdiag(<D>^{-2}, <D>^{-2}, <D>^{-2})
  double scale = 1.0;

  CMat matrix(double delta, double C) const { return S - (delta * t) * J + (C / t) * jp_m2; }
};

inline FpOperators fp_operators(const HyperbolicModel& m, double t, const FourierGrid& g) {
  if (!(t > 0.0)) throw InvalidArgument("fp_check requires t > 0");
  FpOperators f;
  f.t = t;
  const int N = g.N();
  f.S = hermitian_part(block_op_weyl(symbol_matrix_S(m), t, g).mat);
  f.J = CMat::Zero(3 * N, 3 * N);
  f.J.block(0, 0, 2 * N, 2 * N).setIdentity();
  f.J.block(2 * N, 2 * N, N, N) = hermitian_part(op_weyl(m.a(), t, g).mat);
  f.jp_m2 = CMat::Zero(3 * N, 3 * N);
  const LinOp d = op_jp(g, -2.0);
  for (int r = 0; r < 3; ++r) f.jp_m2.block(r * N, r * N, N, N) = d.mat;
  f.scale = 1.0 + operator_norm(f.S);
  return f;
}

struct FpResult {
  double min_eig = 0.0;
  bool feasible = false;
  double scale = 1.0;
};

inline FpResult fp_check(const FpOperators& ops, double delta, double C) {
  FpResult r;
  r.scale = ops.scale;
  r.min_eig = min_hermitian_eigenvalue(ops.matrix(delta, C));
  r.feasible = r.min_eig >= -1e-8 * ops.scale;
  return r;
}

inline FpResult fp_check(const HyperbolicModel& m, double t, const FourierGrid& g, double delta, double C) {
  return fp_check(fp_operators(m, t, g), delta, C);
}

struct FpSearchResult {
  bool found = false;
  double delta = 0.0;
  double C = 0.0;
  std::vector<double> times;
  std::vector<double> min_eig;  // at the returned pair (or at delta = 2^-7, C = 2^14 if none)
};

/// Searches delta in {2^0, ..., 2^-7} (largest first) and, for each, the
/// smallest C in {2^0, ..., 2^14} such that the inequality holds at every
/// time in `times`. The eigenvalue is monotone in C, so C is bisected over
/// the exponent range.
inline FpSearchResult fp_search(const HyperbolicModel& m, const std::vector<double>& times, const FourierGrid& g) {
  std::vector<FpOperators> ops(times.size());
  parallel_for(times.size(), [&](std::size_t i) { ops[i] = fp_operators(m, times[i], g); });
  auto all_feasible = [&](double delta, double C) {
    for (const auto& o : ops)
      if (!fp_check(o, delta, C).feasible) return false;
    return true;
  };
  FpSearchResult res;
  res.times = times;
  for (int de = 0; de >= -7; --de) {
    const double delta = std::ldexp(1.0, de);
    if (!all_feasible(delta, std::ldexp(1.0, 14))) continue;
    int lo = -1, hi = 14;  // infeasible below lo+1 is unknown; hi feasible
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (all_feasible(delta, std::ldexp(1.0, mid)))
        hi = mid;
      else
        lo = mid;
    }
    res.found = true;
    res.delta = delta;
    res.C = std::ldexp(1.0, hi);
    break;
  }
  const double d = res.found ? res.delta : std::ldexp(1.0, -7);
  const double C = res.found ? res.C : std::ldexp(1.0, 14);
  for (const auto& o : ops) res.min_eig.push_back(fp_check(o, d, C).min_eig);
  return res;
}

}  // namespace triplex
