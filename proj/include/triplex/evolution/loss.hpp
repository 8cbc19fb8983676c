#pragma once

// Empirical loss of derivatives: growth of single-mode data versus frequency.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "triplex/evolution/integrator.hpp"

namespace triplex {

/// Lower-order terms c0 + c1 cos(x) + c2 sin(x) with coefficients drawn
/// uniformly from [-amplitude, amplitude].
inline LowerOrderTerms random_lower_order(std::uint64_t seed, double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  auto draw = [&] {
    const double c0 = u(rng), c1 = u(rng), c2 = u(rng);
    return Expr(c0) + Expr(c1) * cos(Expr::x()) + Expr(c2) * sin(Expr::x());
  };
  LowerOrderTerms lot;
  lot.b10 = draw();
  lot.b11 = draw();
  lot.b12 = draw();
  return lot;
}

struct LossResult {
  std::vector<int> k;
  std::vector<double> gain;     // sup_t |U(t)| / |U(eps)|
  double exponent = 0.0;        // least-squares slope of log gain vs log <k>
  double intercept = 0.0;
  std::string verdict = "finite";  // or "unbounded"
  double abort_time = NAN;
};

/// Least-squares line through (x_i, y_i): returns {slope, intercept}.
inline std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) throw InvalidArgument("line fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw InvalidArgument("line fit needs distinct abscissae");
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

/// Evolves U(eps) = mode k placed in all three components (unit norm) for
/// every k in k_list at once, with F = 0.
inline LossResult loss_probe(const SystemOps& ops, const std::vector<int>& k_list, double eps_start, double T,
                             double dt = 0.0, double cfl = 0.5) {
  const FourierGrid& g = ops.grid();
  if (k_list.size() < 2) throw InvalidArgument("loss probe needs at least two frequencies");
  for (int k : k_list)
    if (k < 1 || k > g.K()) throw InvalidArgument("loss probe frequencies must lie in [1, K]");
  if (!(eps_start > 0.0 && eps_start < T)) throw InvalidArgument("need 0 < eps_start < T");
  const int N = g.N(), m = static_cast<int>(k_list.size());
  CMat U = CMat::Zero(3 * N, m);
  for (int c = 0; c < m; ++c)
    for (int r = 0; r < 3; ++r) U(r * N + k_list[c] + g.K(), c) = 1.0 / std::sqrt(3.0);
  LossResult res;
  res.k = k_list;
  res.gain.assign(m, 1.0);
  const double cap = ops.max_dt(cfl);
  const double dt_max = dt > 0.0 ? std::min(dt, cap) : cap;
  try {
    integrate(ops, U, eps_start, T, dt_max, Forcing(), [&](double, const CMat& V) {
      for (int c = 0; c < m; ++c) res.gain[c] = std::max(res.gain[c], V.col(c).norm());
    });
  } catch (const InstabilityDetected& e) {
    res.verdict = "unbounded";
    res.abort_time = e.time();
    res.exponent = INFINITY;
    return res;
  }
  std::vector<double> lx, ly;
  for (int c = 0; c < m; ++c) {
    lx.push_back(std::log(japanese_bracket(g.kappa(k_list[c]))));
    ly.push_back(std::log(res.gain[c]));
  }
  std::tie(res.exponent, res.intercept) = fit_line(lx, ly);
  return res;
}

}  // namespace triplex
