#pragma once

// Frequency cutoffs chi_nu(D) = chi(nu D) and the two operators
//   A_nu = M(t) chi_{nu/2}(D),   R_nu = [chi_nu(D), M(t)].

#include <algorithm>
#include <cmath>
#include <vector>

#include "triplex/evolution/system.hpp"
#include "triplex/parallel.hpp"

namespace triplex {

/// Smooth even cutoff: 1 on [-1, 1], 0 outside [-2, 2].
inline double cutoff_chi(double s) {
  const double u = 2.0 - std::abs(s);  // 1 at |s| = 1, 0 at |s| = 2
  if (u >= 1.0) return 1.0;
  if (u <= 0.0) return 0.0;
  const double p = std::exp(-1.0 / u), q = std::exp(-1.0 / (1.0 - u));
  return p / (p + q);
}

/// Diagonal of chi(nu kappa_k) repeated over the three blocks.
inline Eigen::VectorXd cutoff_diagonal(const FourierGrid& g, double nu) {
  Eigen::VectorXd d(3 * g.N());
  for (int r = 0; r < 3; ++r)
    for (int i = 0; i < g.N(); ++i) d(r * g.N() + i) = cutoff_chi(nu * g.kappa_at(i));
  return d;
}

struct CutoffRow {
  double nu = 0.0;
  double norm_A = 0.0, norm_R = 0.0;
  double scaled_A = 0.0;  // nu |A_nu|
  double scaled_R = 0.0;  // |R_nu| / nu
  bool flagged = false;   // nu <= 2/K: the cutoff is the identity on the grid
};

struct CutoffReport {
  double t = 0.0;
  std::vector<CutoffRow> rows;
  double median_A = 0.0, median_R = 0.0;
  double spread_A = 0.0, spread_R = 0.0;  // max over rows of max(v/median, median/v)
  bool pass = false;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return NAN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Both scalings must stay within a factor 3 of their median over the
/// unflagged rows.
inline CutoffReport frequency_cutoff_check(const SystemOps& ops, const std::vector<double>& nu_list, double t) {
  const FourierGrid& g = ops.grid();
  for (double nu : nu_list)
    if (!(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("cutoff parameters must lie in (0, 1]");
  CutoffReport rep;
  rep.t = t;
  const CMat M = ops.generator(t);
  rep.rows.resize(nu_list.size());
  parallel_for(nu_list.size(), [&](std::size_t i) {
    const double nu = nu_list[i];
    CutoffRow& r = rep.rows[i];
    r.nu = nu;
    r.flagged = nu <= 2.0 / g.K();
    const Eigen::VectorXd half = cutoff_diagonal(g, 0.5 * nu);
    const Eigen::VectorXd chi = cutoff_diagonal(g, nu);
    const CMat A = M * half.cast<cplx>().asDiagonal();
    const CMat R = chi.cast<cplx>().asDiagonal() * M - M * chi.cast<cplx>().asDiagonal();
    r.norm_A = spectral_norm(A);
    r.norm_R = spectral_norm(R);
    r.scaled_A = nu * r.norm_A;
    r.scaled_R = r.norm_R / nu;
  });
  std::vector<double> va, vr;
  for (const auto& r : rep.rows)
    if (!r.flagged) {
      va.push_back(r.scaled_A);
      vr.push_back(r.scaled_R);
    }
  if (va.empty()) return rep;
  rep.median_A = median(va);
  rep.median_R = median(vr);
  auto spread = [](const std::vector<double>& v, double med) -> double {
    double s = 1.0;
    for (double x : v) {
      if (x == 0.0 && med == 0.0) continue;
      if (x == 0.0 || med == 0.0) return INFINITY;
      s = std::max({s, x / med, med / x});
    }
    return s;
  };
  rep.spread_A = spread(va, rep.median_A);
  rep.spread_R = spread(vr, rep.median_R);
  rep.pass = rep.spread_A <= 3.0 && rep.spread_R <= 3.0;
  return rep;
}

}  // namespace triplex
