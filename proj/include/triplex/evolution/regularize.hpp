#pragma once

// Constants of the regularized models alpha -> alpha + eps.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "triplex/cubic/conditions.hpp"
#include "triplex/evolution/energy.hpp"
#include "triplex/quantize/fp_check.hpp"
#include "triplex/symmetrizer/symmetrizer.hpp"

namespace triplex {

/// Deterministic smooth state used as initial data for energy runs.
inline CVec smooth_state(const SystemOps& ops) {
  const FourierGrid& g = ops.grid();
  const int N = g.N();
  CVec U(3 * N);
  U.segment(0, N) = project_function(parse_symbol("exp(cos(x))"), 0.0, g);
  U.segment(N, N) = project_function(parse_symbol("sin(x)+cos(2*x)/2"), 0.0, g);
  U.segment(2 * N, N) = project_function(parse_symbol("1/(2+sin(x))"), 0.0, g);
  return U / U.norm();
}

struct RegularizeOptions {
  std::size_t grid_nt = 32, grid_nx = 32, grid_nxi = 9;  // condition and symmetrizer grids
  int fp_K = 8;
  std::vector<double> fp_times{1e-2, 1e-1, 1.0};        // fractions of T
  int energy_K = 8;
  double eps_start_fraction = 1e-2;
  double dt = 0.0;
};

struct RegularizeRow {
  double eps = 0.0;
  double delta_best = 0.0;
  double delta_sym = 0.0;
  bool fp_feasible = false;
  double fp_delta = 0.0, fp_C = 0.0;
  double lambda0 = 0.0, N_star = 0.0, N_weight = 0.0;
  std::string energy_verdict;  // "pass", "fail" or "unbounded"
  double min_margin = 0.0;
};

struct RegularizeReport {
  std::vector<RegularizeRow> rows;
  /// max/min over eps of each positive constant
  double ratio_delta_best = 1.0, ratio_delta_sym = 1.0, ratio_fp_delta = 1.0, ratio_fp_C = 1.0, ratio_lambda0 = 1.0,
         ratio_N_weight = 1.0;
  bool pass = false;  // every ratio <= 4 and every constant positive
};

inline RegularizeRow regularize_one(const HyperbolicModel& base, double eps, const RegularizeOptions& opt) {
  const HyperbolicModel m = base.with_alpha_shift(eps);
  RegularizeRow r;
  r.eps = eps;
  const ConditionGrid cg = default_condition_grid(m, opt.grid_nt, opt.grid_nx, opt.grid_nxi);
  r.delta_best = check_condition(m, Condition::E, cg, 0.0).delta_best;
  r.delta_sym = lower_bound_delta(m, cg).delta_sym;
  std::vector<double> times;
  for (double f : opt.fp_times) times.push_back(f * m.T());
  const FpSearchResult fp = fp_search(m, times, FourierGrid(opt.fp_K, m.period()));
  r.fp_feasible = fp.found;
  r.fp_delta = fp.delta;
  r.fp_C = fp.C;
  const SystemOps ops(m, FourierGrid(opt.energy_K, m.period()));
  const double eps_start = opt.eps_start_fraction * m.T();
  const EnergyConstants c = search_energy_constants(ops, eps_start, m.T());
  r.lambda0 = c.lambda0;
  r.N_star = c.N_star;
  r.N_weight = c.N_weight;
  if (!c.found) {
    r.energy_verdict = "fail";
    return r;
  }
  const EvolveConfig cfg = config_from_constants(c, eps_start, m.T(), opt.dt);
  const EvolveResult ev = evolve(ops, smooth_state(ops), Forcing(), cfg);
  if (ev.verdict == "unbounded") {
    r.energy_verdict = "unbounded";
    return r;
  }
  const EnergyCheck ck = check_energy_inequality(ev.trace, cfg);
  r.min_margin = ck.min_margin;
  r.energy_verdict = ck.pass ? "pass" : "fail";
  return r;
}

inline RegularizeReport regularize_sweep(const HyperbolicModel& m, const std::vector<double>& eps_list,
                                         const RegularizeOptions& opt = RegularizeOptions()) {
  if (eps_list.empty()) throw InvalidArgument("regularization needs at least one eps");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0)) throw InvalidArgument("regularization parameters must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1])) throw InvalidArgument("regularization parameters must decrease");
  }
  RegularizeReport rep;
  for (double e : eps_list) rep.rows.push_back(regularize_one(m, e, opt));
  bool positive = true;
  auto ratio = [&](auto get) {
    double lo = INFINITY, hi = 0.0;
    for (const auto& r : rep.rows) {
      const double v = get(r);
      if (!(v > 0.0)) positive = false;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return lo > 0.0 ? hi / lo : INFINITY;
  };
  rep.ratio_delta_best = ratio([](const RegularizeRow& r) { return r.delta_best; });
  rep.ratio_delta_sym = ratio([](const RegularizeRow& r) { return r.delta_sym; });
  rep.ratio_fp_delta = ratio([](const RegularizeRow& r) { return r.fp_delta; });
  rep.ratio_fp_C = ratio([](const RegularizeRow& r) { return r.fp_C; });
  rep.ratio_lambda0 = ratio([](const RegularizeRow& r) { return r.lambda0; });
  rep.ratio_N_weight = ratio([](const RegularizeRow& r) { return r.N_weight; });
  rep.pass = positive &&
             std::max({rep.ratio_delta_best, rep.ratio_delta_sym, rep.ratio_fp_delta, rep.ratio_fp_C,
                       rep.ratio_lambda0, rep.ratio_N_weight}) <= 4.0;
  return rep;
}

}  // namespace triplex
