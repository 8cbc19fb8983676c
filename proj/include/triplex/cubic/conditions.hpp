#pragma once

// Checkers for the discriminant lower bounds
//   (H)  Delta >= delta t^2 (t + alpha)
//   (E)  Delta >= delta t (t + alpha)^2
// the first-order sufficient condition on beta1 = d_t b |_{t=0}, and the
// derivative bounds of b relative to a.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "triplex/cubic/roots.hpp"
#include "triplex/parallel.hpp"
#include "triplex/symbol/model.hpp"

namespace triplex {

enum class Condition { H, E };

inline std::string to_string(Condition c) { return c == Condition::H ? "H" : "E"; }

inline Condition parse_condition(const std::string& s) {
  if (s == "H" || s == "h") return Condition::H;
  if (s == "E" || s == "e") return Condition::E;
  throw InvalidArgument("unknown condition '" + s + "' (expected H or E)");
}

struct ConditionGrid {
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> xi;
  bool refine = true;  // local refinement around the grid minimizer

  std::size_t size() const { return t.size() * x.size() * xi.size(); }
};

/// Tensor grid with t log-spaced in [1e-3 T, T], x equispaced on the period,
/// xi log-spaced in [1, 64] (a single xi = 1 when the symbols ignore xi).
inline ConditionGrid default_condition_grid(const HyperbolicModel& m, std::size_t nt = 64, std::size_t nx = 64,
                                            std::size_t nxi = 17) {
  ConditionGrid g;
  g.t = logspace(1e-3 * m.T(), m.T(), nt);
  g.x = periodic_points(m.period(), nx);
  const bool xi_dep = m.a().depends_on(Var::xi) || m.b().depends_on(Var::xi);
  g.xi = xi_dep ? logspace(1.0, 64.0, nxi) : std::vector<double>{1.0};
  return g;
}

struct ConditionReport {
  std::string condition;
  bool holds = false;
  double delta_requested = 0.0;
  double delta_best = 0.0;
  Point witness{};
  ConditionGrid grid;
  std::map<std::string, double> diagnostics;
};

namespace detail {

inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double& arg) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  if (fc < fd) {
    arg = c;
    return fc;
  }
  arg = d;
  return fd;
}

inline std::pair<double, double> bracket(const std::vector<double>& v, std::size_t i) {
  const double lo = i > 0 ? v[i - 1] : v[i];
  const double hi = i + 1 < v.size() ? v[i + 1] : v[i];
  return {lo, hi};
}

/// Grid minimum of f followed by coordinate-wise golden-section refinement
/// inside the neighbouring grid cells.
inline std::pair<double, Point> grid_minimum(const ConditionGrid& g, const std::function<double(const Point&)>& f,
                                             bool x_periodic, double period) {
  const std::size_t nt = g.t.size(), nx = g.x.size(), nz = g.xi.size();
  if (nt == 0 || nx == 0 || nz == 0) throw InvalidArgument("empty condition grid");
  std::vector<double> best(nt, INFINITY);
  std::vector<std::size_t> arg(nt, 0);
  parallel_for(nt, [&](std::size_t i) {
    for (std::size_t j = 0; j < nx; ++j)
      for (std::size_t k = 0; k < nz; ++k) {
        const double v = f(Point{g.t[i], g.x[j], g.xi[k]});
        if (v < best[i]) {
          best[i] = v;
          arg[i] = j * nz + k;
        }
      }
  });
  std::size_t bi = 0;
  for (std::size_t i = 1; i < nt; ++i)
    if (best[i] < best[bi]) bi = i;
  const std::size_t bj = arg[bi] / nz, bk = arg[bi] % nz;
  double fmin = best[bi];
  Point p{g.t[bi], g.x[bj], g.xi[bk]};
  if (!g.refine) return {fmin, p};

  auto [tlo, thi] = bracket(g.t, bi);
  double xlo, xhi;
  if (x_periodic && nx > 1) {
    const double h = period / static_cast<double>(nx);
    xlo = g.x[bj] - h;
    xhi = g.x[bj] + h;
  } else {
    std::tie(xlo, xhi) = bracket(g.x, bj);
  }
  auto [zlo, zhi] = bracket(g.xi, bk);
  for (int round = 0; round < 4; ++round) {
    double arg1 = p.t;
    if (thi > tlo) {
      const double v = golden_min([&](double s) { return f(Point{s, p.x, p.xi}); }, tlo, thi, arg1);
      if (v < fmin) fmin = v, p.t = arg1;
    }
    if (xhi > xlo) {
      const double v = golden_min([&](double s) { return f(Point{p.t, s, p.xi}); }, xlo, xhi, arg1);
      if (v < fmin) fmin = v, p.x = arg1;
    }
    if (zhi > zlo) {
      const double v = golden_min([&](double s) { return f(Point{p.t, p.x, s}); }, zlo, zhi, arg1);
      if (v < fmin) fmin = v, p.xi = arg1;
    }
  }
  if (x_periodic) p.x = std::fmod(std::fmod(p.x, period) + period, period);
  return {fmin, p};
}

}  // namespace detail

/// Pointwise ratio Delta / (t^2 (t+alpha)) for H, Delta / (t (t+alpha)^2) for E.
inline double condition_ratio(const HyperbolicModel& m, Condition which, const Point& p) {
  const double alpha = m.alpha().eval(p);
  const double s = p.t + alpha;
  const double den = which == Condition::H ? p.t * p.t * s : p.t * s * s;
  return m.discriminant(p) / den;
}

inline ConditionReport check_condition(const HyperbolicModel& m, Condition which, const ConditionGrid& grid,
                                       double delta) {
  for (double t : grid.t)
    if (!(t > 0.0)) throw InvalidArgument("condition grids must contain t > 0 only");
  ConditionReport r;
  r.condition = to_string(which);
  r.delta_requested = delta;
  r.grid = grid;
  auto [v, p] = detail::grid_minimum(
      grid, [&](const Point& q) { return condition_ratio(m, which, q); }, true, m.period());
  r.delta_best = std::max(v, 0.0);
  r.witness = p;
  r.holds = r.delta_best >= delta;
  r.diagnostics["min_ratio_raw"] = v;
  // Delta / (t Delta0) at |xi| = 1, Delta0 = 3a; reported only.
  auto [v0, p0] = detail::grid_minimum(
      ConditionGrid{grid.t, grid.x, {1.0}, false},
      [&](const Point& q) {
        const double a = m.eval_a(q);
        return a > 0.0 ? m.discriminant(q) / (q.t * 3.0 * a) : INFINITY;
      },
      true, m.period());
  (void)p0;
  r.diagnostics["min_delta_over_t_delta0"] = v0;
  return r;
}

inline ConditionReport check_condition(const HyperbolicModel& m, Condition which, double delta) {
  return check_condition(m, which, default_condition_grid(m), delta);
}

/// Checks |beta1| <= ((1 - eps)/sqrt 3) sqrt(alpha) on the (x, xi) part of the
/// grid. delta_best is the largest eps' for which the bound holds. When it
/// holds, (E) is cross-checked on the small-time part t <= t_small.
inline ConditionReport check_lemma21(const HyperbolicModel& m, const ConditionGrid& grid, double eps,
                                     double t_small_fraction = 0.1) {
  const Expr beta1 = differentiate(m.b(), Var::t);
  ConditionReport r;
  r.condition = "lemma21";
  r.delta_requested = eps;
  r.grid = grid;
  const std::size_t nx = grid.x.size(), nz = grid.xi.size();
  std::vector<double> best(nx, INFINITY);
  std::vector<std::size_t> arg(nx, 0);
  parallel_for(nx, [&](std::size_t j) {
    for (std::size_t k = 0; k < nz; ++k) {
      const Point p{0.0, grid.x[j], grid.xi[k]};
      const double b1 = std::abs(beta1.eval(p));
      const double alpha = std::max(m.alpha().eval(p), 0.0);
      double eps_local;
      if (alpha <= 1e-28) {
        // sqrt(alpha) vanishes: the bound requires beta1 = 0 there.
        eps_local = b1 <= 1e-12 ? INFINITY : -INFINITY;
      } else {
        eps_local = 1.0 - std::sqrt(3.0) * b1 / std::sqrt(alpha);
      }
      if (eps_local < best[j]) {
        best[j] = eps_local;
        arg[j] = k;
      }
    }
  });
  std::size_t bj = 0;
  for (std::size_t j = 1; j < nx; ++j)
    if (best[j] < best[bj]) bj = j;
  const double eps_best = best[bj];
  // eps' <= 0 means the bound fails for every eps > 0; -inf marks a point
  // with alpha = 0 but beta1 != 0.
  r.delta_best = std::clamp(eps_best, 0.0, 1.0);
  r.witness = Point{0.0, grid.x[bj], grid.xi[arg[bj]]};
  r.holds = r.delta_best >= eps - 1e-12;
  r.diagnostics["min_eps_raw"] = std::isfinite(eps_best) ? eps_best : (eps_best > 0 ? 1.0 : -1e300);
  if (r.holds) {
    ConditionGrid small = grid;
    small.t.clear();
    for (double t : grid.t)
      if (t <= t_small_fraction * m.T()) small.t.push_back(t);
    if (small.t.empty()) small.t.push_back(grid.t.front());
    const ConditionReport e = check_condition(m, Condition::E, small, 0.0);
    r.diagnostics["small_time_E_delta_best"] = e.delta_best;
    r.diagnostics["small_time_E_positive"] = e.delta_best > 0.0 ? 1.0 : 0.0;
  }
  return r;
}

inline ConditionReport check_lemma21(const HyperbolicModel& m, double eps) {
  return check_lemma21(m, default_condition_grid(m), eps);
}

/// Measured suprema of |d_t b|/sqrt(a), max(|d_x b|, |d_xi b|)/a and the
/// (x, xi) second derivatives of b divided by sqrt(a), over points with
/// a > 1e-8.
struct GlaeserBounds {
  double dt_over_sqrt_a = 0.0;
  double dxxi_over_a = 0.0;
  double second_over_sqrt_a = 0.0;
};

inline GlaeserBounds glaeser_bounds(const HyperbolicModel& m, const ConditionGrid& grid) {
  const Expr& b = m.b();
  const Expr bt = differentiate(b, Var::t), bx = differentiate(b, Var::x), bz = differentiate(b, Var::xi);
  const Expr bxx = differentiate(bx, Var::x), bxz = differentiate(bx, Var::xi), bzz = differentiate(bz, Var::xi);
  const std::size_t nt = grid.t.size();
  std::vector<GlaeserBounds> slot(nt);
  parallel_for(nt, [&](std::size_t i) {
    GlaeserBounds g;
    for (double x : grid.x)
      for (double z : grid.xi) {
        const Point p{grid.t[i], x, z};
        const double a = m.eval_a(p);
        if (!(a > 1e-8)) continue;
        const double sa = std::sqrt(a);
        g.dt_over_sqrt_a = std::max(g.dt_over_sqrt_a, std::abs(bt.eval(p)) / sa);
        g.dxxi_over_a = std::max(g.dxxi_over_a, std::max(std::abs(bx.eval(p)), std::abs(bz.eval(p))) / a);
        const double second = std::max({std::abs(bxx.eval(p)), std::abs(bxz.eval(p)), std::abs(bzz.eval(p))});
        g.second_over_sqrt_a = std::max(g.second_over_sqrt_a, second / sa);
      }
    slot[i] = g;
  });
  GlaeserBounds out;
  for (const auto& g : slot) {
    out.dt_over_sqrt_a = std::max(out.dt_over_sqrt_a, g.dt_over_sqrt_a);
    out.dxxi_over_a = std::max(out.dxxi_over_a, g.dxxi_over_a);
    out.second_over_sqrt_a = std::max(out.second_over_sqrt_a, g.second_over_sqrt_a);
  }
  return out;
}

}  // namespace triplex
