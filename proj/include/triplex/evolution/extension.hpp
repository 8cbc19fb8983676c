#pragma once

// Globalization of a model satisfying (E) on a window, and sum-of-squares
// partitions of a cutoff.
//
// Windows on the torus are logistic functions of r = 1 - cos(x - c):
//   w(x) = 1 / (1 + exp((r - r_w) / s)),  r_w = 1 - cos(h),  s = r_w / sharpness,
// close to 1 for |x - c| < h and to 0 outside. A half-width of at least pi
// gives w = 1.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "triplex/cubic/conditions.hpp"
#include "triplex/evolution/system.hpp"

namespace triplex {

struct XWindow {
  double center = 0.0;
  double half_width = 1.0;
  double sharpness = 8.0;
};

/// Smooth window in x as a symbol.
inline Expr window_symbol(const XWindow& w, double period = 2.0 * std::numbers::pi) {
  if (!(w.half_width > 0.0) || !(w.sharpness > 0.0)) throw InvalidArgument("window half-width and sharpness must be positive");
  if (w.half_width >= 0.5 * period) return Expr(1.0);
  const double k = 2.0 * std::numbers::pi / period;
  const double rw = 1.0 - std::cos(k * w.half_width);
  const double s = rw / w.sharpness;
  const Expr r = Expr(1.0) - cos(Expr(k) * (Expr::x() - Expr(w.center)));
  return Expr(1.0) / (Expr(1.0) + exp((r - Expr(rw)) / Expr(s)));
}

/// Frequency ray: "both" (no restriction), "positive" or "negative", with a
/// logistic transition of width `width` at |xi| = xi0.
struct XiRay {
  std::string side = "both";
  double xi0 = 1.0;
  double width = 0.5;
};

inline Expr ray_symbol(const XiRay& r) {
  if (r.side == "both") return Expr(1.0);
  if (!(r.width > 0.0)) throw InvalidArgument("ray width must be positive");
  double sign = 0.0;
  if (r.side == "positive")
    sign = 1.0;
  else if (r.side == "negative")
    sign = -1.0;
  else
    throw InvalidArgument("ray side must be 'both', 'positive' or 'negative', got '" + r.side + "'");
  return Expr(1.0) / (Expr(1.0) + exp(Expr(-sign / r.width) * Expr::xi() + Expr(r.xi0 / r.width)));
}

struct ExtensionResult {
  HyperbolicModel model;
  Expr chi1;
  double M = 1.0;
  ConditionReport local;   // (E) on the window
  ConditionReport global;  // (E) for the extension
};

/// Grid for (E) restricted to |x - c| <= h.
inline ConditionGrid window_grid(const HyperbolicModel& m, const XWindow& w, std::size_t nx = 64) {
  ConditionGrid g = default_condition_grid(m);
  if (w.half_width < 0.5 * m.period()) g.x = linspace(w.center - w.half_width, w.center + w.half_width, nx);
  return g;
}

/// alpha~ = chi1 alpha + M chi2, b~ = chi1 b with chi2 = 1 - chi1. When M is
/// not given it is the smallest power of two with 4 M^3 c0^3 >= 27 sup (chi1 b)^2.
inline ExtensionResult extend_model(const HyperbolicModel& local, const XWindow& window, const XiRay& ray = XiRay(),
                                    std::optional<double> M = std::nullopt) {
  ExtensionResult res{local, Expr(1.0)};
  res.local = check_condition(local, Condition::E, window_grid(local, window), 0.0);
  if (!(res.local.delta_best > 0.0))
    throw HyperbolicityViolation(res.local.witness, local.discriminant(res.local.witness));
  const Expr chi1 = window_symbol(window, local.period()) * ray_symbol(ray);
  const Expr chi2 = Expr(1.0) - chi1;
  const Expr bt = chi1 * local.b();
  if (M) {
    if (!(*M > 0.0)) throw InvalidArgument("extension constant M must be positive");
    res.M = *M;
  } else {
    double sup_b2 = 0.0;
    if (!bt.is_constant(0.0)) {
      const ConditionGrid g = default_condition_grid(local);
      std::vector<double> xis = g.xi;
      if (bt.depends_on(Var::xi)) xis = logspace(1.0, 64.0, 17);
      for (double t : linspace(0.0, local.T(), 33))
        for (double x : linspace(0.0, local.period(), 257))
          for (double xi : xis) {
            const double v = bt.eval({t, x, xi});
            sup_b2 = std::max(sup_b2, v * v);
          }
    }
    const double c0 = local.c0();
    int e = 0;
    while (4.0 * std::pow(std::ldexp(1.0, e), 3) * c0 * c0 * c0 < 27.0 * sup_b2) ++e;
    res.M = std::ldexp(1.0, e);
  }
  const Expr at = chi1 * local.alpha() + Expr(res.M) * chi2;
  res.chi1 = chi1;
  HyperbolicModel ext(at, local.atilde(), bt, local.c0(), local.T(), local.period(), local.lower());
  ext.set_name("extend(" + local.name() + ")");
  res.model = ext;
  res.global = check_condition(res.model, Condition::E, 0.0);
  return res;
}

/// chi_a = chi w_a / sqrt(sum_b w_b^2), so that sum_a chi_a^2 = chi^2.
/// Every point where chi does not vanish must lie inside some window (w >= 1/2).
inline std::vector<Expr> partition_sos(const Expr& chi, const std::vector<XWindow>& windows,
                                       double period = 2.0 * std::numbers::pi) {
  if (windows.empty()) throw InvalidArgument("partition needs a nonempty cover");
  std::vector<Expr> w;
  for (const auto& win : windows) w.push_back(window_symbol(win, period));
  for (double x : linspace(0.0, period, 513)) {
    if (std::abs(chi.eval({0.0, x, 0.0})) <= 1e-12) continue;
    double best = 0.0;
    for (const auto& wi : w) best = std::max(best, wi.eval({0.0, x, 0.0}));
    if (best < 0.5) throw InvalidArgument("windows do not cover the support of the cutoff at x = " + std::to_string(x));
  }
  Expr sum = pow(w[0], 2);
  for (std::size_t i = 1; i < w.size(); ++i) sum = sum + pow(w[i], 2);
  const Expr norm = sqrt(sum);
  std::vector<Expr> out;
  for (const auto& wi : w) out.push_back(chi * wi / norm);
  return out;
}

/// Operator norms of [Op^w(chi), M(t)] restricted to the modes |k| <= K. The
/// product is formed on the grid with 2K so that truncation of the Fourier
/// series at the edge of the band does not enter the measured block.
inline std::vector<double> partition_commutator_norms(const HyperbolicModel& m, const Expr& chi, double t,
                                                      const std::vector<int>& K_list) {
  std::vector<double> out;
  for (int K : K_list) {
    const FourierGrid g(2 * K, m.period());
    const SystemOps ops(m, g);
    const CMat M = ops.generator(t);
    const CMat c = op_weyl(chi, t, g).mat;
    const int N = g.N(), n = 2 * K + 1;
    CMat C = CMat::Zero(3 * N, 3 * N);
    for (int r = 0; r < 3; ++r) C.block(r * N, r * N, N, N) = c;
    const CMat full = C * M - M * C;
    CMat inner(3 * n, 3 * n);
    for (int r = 0; r < 3; ++r)
      for (int q = 0; q < 3; ++q) inner.block(r * n, q * n, n, n) = full.block(r * N + K, q * N + K, n, n);
    out.push_back(spectral_norm(inner));
  }
  return out;
}

}  // namespace triplex
