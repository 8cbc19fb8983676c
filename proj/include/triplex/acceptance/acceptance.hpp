#pragma once

// Acceptance suite: criteria 1..11, shared by the test binary and the CLI
// `selftest`. Every tolerance is a named constant below. The JSON report holds
// no timings, so runs with the same options are byte-identical.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "triplex/cubic/conditions.hpp"
#include "triplex/evolution/cutoff.hpp"
#include "triplex/evolution/energy.hpp"
#include "triplex/evolution/extension.hpp"
#include "triplex/evolution/loss.hpp"
#include "triplex/evolution/regularize.hpp"
#include "triplex/evolution/taylor.hpp"
#include "triplex/io/report.hpp"
#include "triplex/quantize/fp_check.hpp"
#include "triplex/quantize/friedrichs.hpp"
#include "triplex/symbol/gallery.hpp"
#include "triplex/symmetrizer/symmetrizer.hpp"

namespace triplex::acceptance {

namespace tol {
inline constexpr std::size_t identity_points = 10000;   // per gallery model
inline constexpr double sa_symmetry = 1e-13;
inline constexpr double det_identity = 1e-12;
inline constexpr double discriminant_rel = 1e-8;
inline constexpr double discriminant_floor = 1e-6;       // Delta above which relative checks apply
inline constexpr std::size_t root_samples = 10000;
inline constexpr double root_agreement = 1e-9;
inline constexpr double zero_b_rel = 1e-6;
inline constexpr double ex21p_delta_max = 1e-6;
inline constexpr double ex22_rel = 0.05;
inline constexpr double ex22_ratio_rel = 0.2;
inline constexpr double friedrichs_rel = 1e-8;
inline constexpr double energy_halving_ratio = 3.0;
inline constexpr double cutoff_spread = 3.0;
inline constexpr double loss_K_change = 0.5;
inline constexpr double loss_seed_change = 1.0;
inline constexpr double loss_strict_max = 0.3;
inline constexpr double taylor_residual = 1e-8;
inline constexpr double taylor_fd_rel = 1e-5;
inline constexpr double regularize_factor = 2.0;
}  // namespace tol

struct Options {
  bool quick = true;
  std::uint64_t seed = 1;
};

struct Criterion {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;  // key numbers for the one-line verdict
  ordered_json data = ordered_json::object();
};

struct Report {
  Options options;
  std::vector<Criterion> criteria;

  bool all_pass() const {
    for (const auto& c : criteria)
      if (!c.pass) return false;
    return true;
  }
  std::vector<int> failed() const {
    std::vector<int> out;
    for (const auto& c : criteria)
      if (!c.pass) out.push_back(c.id);
    return out;
  }
};

inline void to_json(ordered_json& j, const Criterion& c) {
  j = ordered_json{{"id", c.id}, {"title", c.title}, {"pass", c.pass}, {"summary", c.summary}, {"data", c.data}};
}

inline ordered_json report_json(const Report& r) {
  ordered_json j{{"tool", "triplex"},
                 {"command", "selftest"},
                 {"quick", r.options.quick},
                 {"seed", r.options.seed},
                 {"pass", r.all_pass()},
                 {"failed", r.failed()},
                 {"criteria", r.criteria}};
  return j;
}

inline std::string verdict_line(const Criterion& c) {
  return std::string(c.pass ? "PASS" : "FAIL") + "  criterion " + std::to_string(c.id) + ": " + c.title + "  (" +
         c.summary + ")";
}

namespace detail {

inline std::string num(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

inline double spread_ratio(const std::vector<double>& v) {
  return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
}

}  // namespace detail

inline Criterion criterion_identities(const Options& opt) {
  Criterion c{1, "algebraic identities"};
  double worst_sa = 0.0, worst_det = 0.0, worst_red = 0.0, worst_vand = 0.0;
  std::size_t checked_rel = 0;
  ordered_json per_model = ordered_json::array();
  std::mt19937_64 rng(opt.seed);
  for (const auto& name : gallery_names()) {
    const HyperbolicModel m = gallery(name);
    std::uniform_real_distribution<double> ut(0.0, m.T()), ux(0.0, m.period()), uxi(-64.0, 64.0);
    double sa = 0.0, det = 0.0, red = 0.0, vand = 0.0;
    for (std::size_t i = 0; i < tol::identity_points; ++i) {
      const Point p{ut(rng), ux(rng), uxi(rng)};
      const PointEval pe = point_eval(m, p);
      const auto s = check_SA_symmetric(pe);
      sa = std::max(sa, std::max(s.asymmetry, s.closed_form_deviation) / s.scale);
      const double a3 = 4.0 * pe.a * pe.a * pe.a, b2 = 27.0 * pe.b * pe.b;
      const double disc = a3 - b2;
      const double mag = 1.0 + std::abs(a3) + b2;
      det = std::max(det, std::abs(matrix_S(pe).determinant() - disc) / mag);
      if (disc > tol::discriminant_floor) {
        ++checked_rel;
        const double jp = japanese_bracket(p.xi);
        const auto d = discriminants(0.0, -pe.a * jp * jp, -pe.b * jp * jp * jp, jp);
        red = std::max(red, std::abs(d.delta - disc) / disc);
        const RootTriple r = roots_trig(pe.a, pe.b, jp);
        const double v =
            std::pow((r.lambda1 - r.lambda2) * (r.lambda2 - r.lambda3) * (r.lambda1 - r.lambda3), 2) / std::pow(jp, 6);
        vand = std::max(vand, std::abs(v - disc) / disc);
      }
    }
    per_model.push_back(ordered_json{{"model", name}, {"sa", sa}, {"det", det}, {"reduction", red}, {"vandermonde", vand}});
    worst_sa = std::max(worst_sa, sa);
    worst_det = std::max(worst_det, det);
    worst_red = std::max(worst_red, red);
    worst_vand = std::max(worst_vand, vand);
  }
  c.pass = worst_sa <= tol::sa_symmetry && worst_det <= tol::det_identity && worst_red <= tol::discriminant_rel &&
           worst_vand <= tol::discriminant_rel && checked_rel > 0;
  c.data = ordered_json{{"points_per_model", tol::identity_points},
                        {"relative_checks", checked_rel},
                        {"max_sa_over_scale", worst_sa},
                        {"max_det_over_scale", worst_det},
                        {"max_reduction_rel", worst_red},
                        {"max_vandermonde_rel", worst_vand},
                        {"models", per_model}};
  c.summary = "SA " + detail::num(worst_sa) + ", det " + detail::num(worst_det) + ", disc " +
              detail::num(std::max(worst_red, worst_vand));
  return c;
}

inline Criterion criterion_roots(const Options& opt) {
  Criterion c{2, "roots_trig against the companion oracle"};
  std::mt19937_64 rng(opt.seed + 100);
  std::uniform_real_distribution<double> ua(0.0, 5.0), uu(-1.0, 1.0), ujp(1.0, 50.0);
  const std::size_t n = opt.quick ? tol::root_samples : 10 * tol::root_samples;
  double worst = 0.0, worst_double = 0.0;
  std::size_t doubles = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double a, b;
    const double jp = ujp(rng);
    bool dbl = i % 5 == 0;
    if (dbl) {
      // (3 s^2, +-2 s^3) with s a power of two, so that Delta = 0 exactly
      const double s = std::ldexp(1.0, static_cast<int>(i / 5 % 5) - 3);
      a = 3.0 * s * s;
      b = (i % 10 == 0 ? 2.0 : -2.0) * s * s * s;
      ++doubles;
    } else {
      a = ua(rng);
      b = std::sqrt(4.0 * a * a * a / 27.0) * uu(rng);
    }
    const RootTriple tr = roots_trig(a, b, jp);
    const RootTriple orc = root_oracle(a, b, jp);
    double dev = 0.0;
    for (int k = 0; k < 3; ++k) dev = std::max(dev, std::abs(tr[k] - orc[k]));
    dev /= 1.0 + std::sqrt(a) * jp;
    worst = std::max(worst, dev);
    if (dbl) worst_double = std::max(worst_double, dev);
  }
  c.pass = worst <= tol::root_agreement;
  c.data = ordered_json{{"samples", n}, {"double_root_samples", doubles}, {"max_scaled_deviation", worst},
                        {"max_scaled_deviation_double_roots", worst_double}};
  c.summary = "max dev " + detail::num(worst) + " over " + std::to_string(n) + " samples";
  return c;
}

inline Criterion criterion_conditions(const Options&) {
  Criterion c{3, "condition checkers"};
  const HyperbolicModel zb = gallery("g_zero_b");
  const auto rz = check_condition(zb, Condition::E, 0.0);
  const double zb_bound = 4.0 * std::pow(zb.c0(), 3) * (1.0 - tol::zero_b_rel);
  const auto r21 = check_condition(gallery("g_ex21p"), Condition::E, tol::ex21p_delta_max);
  const HyperbolicModel m22 = gallery("g_ex22", {{"m", "6"}});
  auto local = [&](double alpha) {
    ConditionGrid g;
    g.t = linspace(alpha, 3.0 * alpha, 201);
    g.x = {std::acos(1.0 - std::sqrt(alpha))};  // alpha(x) = (1 - cos x)^2
    g.xi = {1.0};
    return check_condition(m22, Condition::E, g, 0.0);
  };
  const auto l1 = local(0.1), l2 = local(0.05);
  const double expected = 192.0 * std::pow(0.1, 5) * (1.0 - 8.0 * std::pow(0.1, 5));
  const double rel = std::abs(l1.delta_best - expected) / expected;
  const double ratio = l2.delta_best / l1.delta_best;
  const double ratio_rel = std::abs(ratio - 1.0 / 32.0) / (1.0 / 32.0);
  const bool ok_zb = rz.delta_best >= zb_bound;
  const bool ok_21 = !r21.holds && r21.delta_best <= tol::ex21p_delta_max;
  const bool ok_22 = rel <= tol::ex22_rel && ratio_rel <= tol::ex22_ratio_rel;
  c.pass = ok_zb && ok_21 && ok_22;
  c.data = ordered_json{{"g_zero_b", rz},
                        {"g_zero_b_bound", zb_bound},
                        {"g_ex21p", r21},
                        {"g_ex22", {{"delta_best_alpha_0.1", l1.delta_best},
                                    {"witness_alpha_0.1", l1.witness},
                                    {"expected", expected},
                                    {"rel_error", rel},
                                    {"delta_best_alpha_0.05", l2.delta_best},
                                    {"ratio", ratio},
                                    {"ratio_rel_error", ratio_rel}}}};
  c.summary = "g_zero_b " + detail::num(rz.delta_best) + ", g_ex21p " + detail::num(r21.delta_best) + ", g_ex22 rel " +
              detail::num(rel, 2) + ", ratio*32 " + detail::num(32.0 * ratio);
  return c;
}

inline Criterion criterion_friedrichs(const Options&) {
  Criterion c{4, "Friedrichs positivity"};
  struct Job {
    std::string model;
    double t;
    int K;
  };
  std::vector<Job> jobs;
  for (const auto& name : gallery_names())
    for (double t : {0.1, 0.5, 1.0})
      for (int K : {8, 16, 32}) jobs.push_back({name, t, K});
  std::vector<double> ratio(jobs.size()), min_eig(jobs.size()), qn(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const HyperbolicModel m = gallery(jobs[i].model);
    const auto f = friedrichs_part(symbol_matrix_S(m), jobs[i].t * m.T(), FourierGrid(jobs[i].K));
    min_eig[i] = f.min_eig;
    qn[i] = f.q_norm;
    ratio[i] = f.min_eig / f.q_norm;
  });
  double worst = INFINITY;
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    worst = std::min(worst, ratio[i]);
    rows.push_back(ordered_json{{"model", jobs[i].model}, {"t", jobs[i].t}, {"K", jobs[i].K}, {"min_eig", min_eig[i]},
                                {"q_norm", qn[i]}});
  }
  c.pass = worst >= -tol::friedrichs_rel;
  c.data = ordered_json{{"min_eig_over_norm", worst}, {"rows", rows}};
  c.summary = "min eig / |Q| = " + detail::num(worst) + " over " + std::to_string(jobs.size()) + " cases";
  return c;
}

inline Criterion criterion_fp(const Options&) {
  Criterion c{5, "sharp lower bound feasibility"};
  bool ok = true;
  for (const char* name : {"g_E", "g_zero_b"}) {
    const HyperbolicModel m = gallery(name);
    std::vector<double> times = logspace(1e-2 * m.T(), m.T(), 10);
    const FpSearchResult r = fp_search(m, times, FourierGrid(32));
    ok = ok && r.found;
    c.data[name] = r;
    c.summary += std::string(c.summary.empty() ? "" : ", ") + name + (r.found ? " (delta, C) = (" + detail::num(r.delta) +
                                                                                    ", " + detail::num(r.C) + ")"
                                                                              : " none");
  }
  c.pass = ok;
  return c;
}

inline Criterion criterion_energy(const Options& opt) {
  Criterion c{6, "energy inequality"};
  const HyperbolicModel m = gallery("g_E");
  const SystemOps ops(m, FourierGrid(16));
  const double eps = 1e-2;
  const EnergyConstants k = search_energy_constants(ops, eps, m.T());
  c.data["constants"] = k;
  if (!k.found) {
    c.summary = "no energy constants found";
    return c;
  }
  const CVec U0 = smooth_state(ops);
  std::vector<double> dts = opt.quick ? std::vector<double>{5e-4, 2.5e-4} : std::vector<double>{1e-3, 5e-4, 2.5e-4};
  bool ok = true;
  std::vector<double> defects, margins;
  ordered_json runs = ordered_json::array();
  for (double dt : dts) {
    const EvolveConfig cfg = config_from_constants(k, eps, m.T(), dt);
    const EvolveResult r = evolve(ops, U0, Forcing(), cfg);
    if (r.verdict != "completed") {
      ok = false;
      runs.push_back(ordered_json{{"dt", dt}, {"verdict", r.verdict}});
      continue;
    }
    const EnergyCheck ck = check_energy_inequality(r.trace, cfg);
    ok = ok && ck.pass;
    defects.push_back(ck.max_defect);
    margins.push_back(ck.min_margin);
    runs.push_back(ordered_json{{"dt", dt}, {"config", cfg}, {"check", ck}});
  }
  std::vector<double> ratios;
  for (std::size_t i = 1; i < defects.size(); ++i) {
    ratios.push_back(defects[i - 1] / defects[i]);
    ok = ok && ratios.back() >= tol::energy_halving_ratio;
  }
  c.pass = ok && defects.size() == dts.size();
  c.data["runs"] = runs;
  c.data["defect_halving_ratios"] = ratios;
  c.summary = "min margin " + detail::num(*std::min_element(margins.begin(), margins.end())) + ", defect ratio " +
              (ratios.empty() ? std::string("-") : detail::num(*std::min_element(ratios.begin(), ratios.end())));
  return c;
}

inline Criterion criterion_cutoff(const Options&) {
  Criterion c{7, "frequency cutoff scalings"};
  const HyperbolicModel m = gallery("g_E");
  const SystemOps ops(m, FourierGrid(128));
  const CutoffReport r = frequency_cutoff_check(ops, {0.5, 0.25, 0.125, 0.0625}, 0.5 * m.T());
  c.pass = r.spread_A <= tol::cutoff_spread && r.spread_R <= tol::cutoff_spread;
  c.data = r;
  c.summary = "spread nu|A| " + detail::num(r.spread_A) + ", spread |R|/nu " + detail::num(r.spread_R);
  return c;
}

inline Criterion criterion_loss(const Options& opt) {
  Criterion c{8, "derivative-loss probe"};
  const HyperbolicModel gE = gallery("g_E");
  const std::vector<int> ks{2, 4, 8, 16, 32};
  const double eps = 1e-2;
  auto probe = [&](const HyperbolicModel& m, int K) { return loss_probe(SystemOps(m, FourierGrid(K)), ks, eps, m.T()); };
  const HyperbolicModel s1 = gE.with_lower_order(random_lower_order(opt.seed + 1));
  const HyperbolicModel s2 = gE.with_lower_order(random_lower_order(opt.seed + 2));
  const LossResult b64 = probe(gE, 64), b128 = probe(gE, 128);
  const LossResult r1 = probe(s1, 64), r2 = probe(s2, 64);
  const LossResult st = probe(gallery("g_strict"), 64);
  const double dK = std::abs(b128.exponent - b64.exponent);
  const double dS = std::abs(r1.exponent - r2.exponent);
  bool ok = std::isfinite(b64.exponent) && std::isfinite(b128.exponent) && std::isfinite(r1.exponent) &&
            std::isfinite(r2.exponent) && dK <= tol::loss_K_change && dS <= tol::loss_seed_change &&
            st.exponent <= tol::loss_strict_max;
  c.data = ordered_json{{"k", ks},         {"eps_start", eps},   {"g_E_K64", b64},         {"g_E_K128", b128},
                        {"seed_a", opt.seed + 1}, {"g_E_seed_a_K64", r1}, {"seed_b", opt.seed + 2}, {"g_E_seed_b_K64", r2},
                        {"g_strict_K64", st}, {"change_K", dK},     {"change_seed", dS}};
  if (!opt.quick) {
    const LossResult r1b = probe(s1, 128), r2b = probe(s2, 128);
    const double dS128 = std::abs(r1b.exponent - r2b.exponent);
    ok = ok && std::isfinite(r1b.exponent) && std::isfinite(r2b.exponent) && dS128 <= tol::loss_seed_change &&
         std::abs(r1b.exponent - r1.exponent) <= tol::loss_K_change &&
         std::abs(r2b.exponent - r2.exponent) <= tol::loss_K_change;
    c.data["g_E_seed_a_K128"] = r1b;
    c.data["g_E_seed_b_K128"] = r2b;
    c.data["change_seed_K128"] = dS128;
  }
  c.pass = ok;
  c.summary = "g_E " + detail::num(b64.exponent) + " -> " + detail::num(b128.exponent) + ", seeds " +
              detail::num(r1.exponent) + " / " + detail::num(r2.exponent) + ", g_strict " + detail::num(st.exponent);
  return c;
}

inline Criterion criterion_taylor(const Options& opt) {
  Criterion c{9, "Taylor lift at t = 0"};
  const HyperbolicModel m = gallery("g_E").with_lower_order(random_lower_order(opt.seed + 3));
  const FourierGrid g(8);
  const SystemOps ops(m, g);
  const CVec u0 = project_function(parse_symbol("exp(cos(x))"), 0.0, g);
  const CVec u1 = project_function(parse_symbol("sin(x)"), 0.0, g);
  const CVec u2 = project_function(parse_symbol("cos(2*x)/(2+sin(x))"), 0.0, g);
  const Forcing f(parse_symbol("t^2*cos(x)+sin(2*x)+t*exp(t)"));
  const TaylorLift L = taylor_lift(ops, u0, u1, u2, f, 3);
  const TaylorFdCheck fd = taylor_fd_check(ops, L, f, 3);
  const double res = *std::max_element(L.residual.begin(), L.residual.end());
  c.pass = res <= tol::taylor_residual && fd.max_rel_error <= tol::taylor_fd_rel;
  c.data = ordered_json{{"order", L.order()}, {"residual", L.residual}, {"scale", L.scale}, {"fd", fd}};
  c.summary = "max |D^j W(0)|/scale " + detail::num(res) + ", FD rel err " + detail::num(fd.max_rel_error);
  return c;
}

inline Criterion criterion_extension(const Options&) {
  Criterion c{10, "extension and regularization"};
  const ExtensionResult ext = extend_model(gallery("g_E"), XWindow{0.0, 1.0});
  const RegularizeReport reg = regularize_sweep(ext.model, {1e-1, 1e-2, 1e-3});
  c.pass = ext.global.delta_best > 0.0 && reg.ratio_delta_best <= tol::regularize_factor;
  for (const auto& row : reg.rows) c.pass = c.pass && row.delta_best > 0.0;
  c.data = ordered_json{{"extension", ext}, {"regularize", reg}};
  c.summary = "M = " + detail::num(ext.M) + ", global delta_best " + detail::num(ext.global.delta_best) +
              ", delta_best ratio over eps " + detail::num(reg.ratio_delta_best);
  return c;
}

using Progress = std::function<void(const Criterion&, double seconds)>;

/// Criteria 1..10.
inline std::vector<Criterion> run_primary(const Options& opt, const Progress& progress = {}) {
  using Fn = Criterion (*)(const Options&);
  static const Fn fns[] = {criterion_identities, criterion_roots,  criterion_conditions, criterion_friedrichs,
                           criterion_fp,         criterion_energy, criterion_cutoff,     criterion_loss,
                           criterion_taylor,     criterion_extension};
  std::vector<Criterion> out;
  for (Fn fn : fns) {
    const auto t0 = std::chrono::steady_clock::now();
    Criterion c;
    try {
      c = fn(opt);
    } catch (const std::exception& e) {
      c.id = static_cast<int>(out.size()) + 1;
      c.title = "criterion " + std::to_string(c.id);
      c.pass = false;
      c.summary = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (progress) progress(c, secs);
    out.push_back(std::move(c));
  }
  return out;
}

/// Runs criteria 1..10, then repeats them and requires byte-identical reports
/// (criterion 11).
inline Report run(const Options& opt, const Progress& progress = {}) {
  Report rep;
  rep.options = opt;
  rep.criteria = run_primary(opt, progress);
  const auto t0 = std::chrono::steady_clock::now();
  const std::string first = dump_json(ordered_json(rep.criteria));
  const std::string second = dump_json(ordered_json(run_primary(opt)));
  Criterion d{11, "determinism"};
  d.pass = first == second;
  std::size_t diff_at = 0;
  while (diff_at < std::min(first.size(), second.size()) && first[diff_at] == second[diff_at]) ++diff_at;
  d.data = ordered_json{{"bytes", first.size()}, {"identical", d.pass}};
  if (!d.pass) d.data["first_difference_at"] = diff_at;
  d.summary = d.pass ? "repeat run identical (" + std::to_string(first.size()) + " bytes)"
                     : "repeat run differs at byte " + std::to_string(diff_at);
  if (progress) progress(d, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  rep.criteria.push_back(std::move(d));
  return rep;
}

}  // namespace triplex::acceptance
