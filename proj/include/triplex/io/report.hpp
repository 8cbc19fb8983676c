#pragma once

// JSON reports. Keys keep insertion order (ordered_json) and doubles are
// printed in shortest round-trip form, so equal inputs give equal bytes.
// Non-finite numbers become null.

#include <json.hpp>
#include <string>
#include <vector>

#include "triplex/cubic/conditions.hpp"
#include "triplex/evolution/cutoff.hpp"
#include "triplex/evolution/energy.hpp"
#include "triplex/evolution/extension.hpp"
#include "triplex/evolution/loss.hpp"
#include "triplex/evolution/regularize.hpp"
#include "triplex/evolution/taylor.hpp"
#include "triplex/io/csv.hpp"
#include "triplex/quantize/fp_check.hpp"

namespace triplex {

using ordered_json = nlohmann::ordered_json;

inline void to_json(ordered_json& j, const Point& p) { j = ordered_json{{"t", p.t}, {"x", p.x}, {"xi", p.xi}}; }

namespace detail {

inline ordered_json axis_json(const std::vector<double>& v) {
  ordered_json j{{"n", v.size()}};
  if (!v.empty()) {
    j["min"] = *std::min_element(v.begin(), v.end());
    j["max"] = *std::max_element(v.begin(), v.end());
  }
  return j;
}

}  // namespace detail

inline void to_json(ordered_json& j, const ConditionGrid& g) {
  j = ordered_json{{"t", detail::axis_json(g.t)},
                   {"x", detail::axis_json(g.x)},
                   {"xi", detail::axis_json(g.xi)},
                   {"refine", g.refine}};
}

inline void to_json(ordered_json& j, const ConditionReport& r) {
  j = ordered_json{{"condition", r.condition},
                   {"holds", r.holds},
                   {"delta_requested", r.delta_requested},
                   {"delta_best", r.delta_best},
                   {"witness", r.witness},
                   {"grid", r.grid}};
  ordered_json d = ordered_json::object();
  for (const auto& [k, v] : r.diagnostics) d[k] = v;
  j["diagnostics"] = d;
}

inline void to_json(ordered_json& j, const HyperbolicModel& m) {
  j = ordered_json{{"name", m.name()},
                   {"alpha", to_string(m.alpha())},
                   {"atilde", to_string(m.atilde())},
                   {"b", to_string(m.b())},
                   {"c0", m.c0()},
                   {"T", m.T()},
                   {"period", m.period()}};
  if (m.has_lower_order_terms()) {
    j["b10"] = to_string(m.lower().b10);
    j["b11"] = to_string(m.lower().b11);
    j["b12"] = to_string(m.lower().b12);
  }
}

inline void to_json(ordered_json& j, const SymmetrizerBound& b) {
  j = ordered_json{{"delta_sym", b.delta_sym}, {"witness", b.witness}, {"points", b.rows.size()}};
}

inline void to_json(ordered_json& j, const FpSearchResult& r) {
  j = ordered_json{{"found", r.found}, {"delta", r.delta}, {"C", r.C}, {"times", r.times}, {"min_eig", r.min_eig}};
}

inline void to_json(ordered_json& j, const EvolveConfig& c) {
  j = ordered_json{{"eps_start", c.eps_start}, {"T", c.T},           {"dt", c.dt},
                   {"cfl", c.cfl},             {"N_weight", c.N_weight}, {"gamma", c.gamma},
                   {"lambda", c.lambda},       {"delta", c.delta},   {"N_star", c.N_star}};
}

inline void to_json(ordered_json& j, const EnergyConstants& c) {
  j = ordered_json{{"found", c.found},   {"lambda0", c.lambda0},   {"N_star0", c.N_star0}, {"N_star", c.N_star},
                   {"N_weight", c.N_weight}, {"gamma", c.gamma}, {"times", c.times},     {"mu_max", c.mu_max}};
}

inline void to_json(ordered_json& j, const EnergyCheck& c) {
  j = ordered_json{{"pass", c.pass},
                   {"tol_E", c.tol_E},
                   {"min_margin", c.min_margin},
                   {"min_margin_t", c.min_margin_t},
                   {"max_defect", c.max_defect},
                   {"integrated_pass", c.integrated_pass},
                   {"integrated_excess", c.integrated_excess},
                   {"steps", c.step_margins.size()}};
}

inline void to_json(ordered_json& j, const LossResult& r) {
  j = ordered_json{{"verdict", r.verdict}, {"k", r.k},           {"gain", r.gain},
                   {"exponent", r.exponent}, {"intercept", r.intercept}, {"abort_time", r.abort_time}};
}

inline void to_json(ordered_json& j, const CutoffRow& r) {
  j = ordered_json{{"nu", r.nu},         {"norm_A", r.norm_A},     {"norm_R", r.norm_R},
                   {"scaled_A", r.scaled_A}, {"scaled_R", r.scaled_R}, {"flagged", r.flagged}};
}

inline void to_json(ordered_json& j, const CutoffReport& r) {
  j = ordered_json{{"t", r.t},
                   {"rows", r.rows},
                   {"median_A", r.median_A},
                   {"median_R", r.median_R},
                   {"spread_A", r.spread_A},
                   {"spread_R", r.spread_R},
                   {"pass", r.pass}};
}

inline void to_json(ordered_json& j, const ExtensionResult& r) {
  j = ordered_json{{"model", r.model}, {"chi1", to_string(r.chi1)}, {"M", r.M}, {"local", r.local}, {"global", r.global}};
}

inline void to_json(ordered_json& j, const RegularizeRow& r) {
  j = ordered_json{{"eps", r.eps},
                   {"delta_best", r.delta_best},
                   {"delta_sym", r.delta_sym},
                   {"fp_feasible", r.fp_feasible},
                   {"fp_delta", r.fp_delta},
                   {"fp_C", r.fp_C},
                   {"lambda0", r.lambda0},
                   {"N_star", r.N_star},
                   {"N_weight", r.N_weight},
                   {"energy_verdict", r.energy_verdict},
                   {"min_margin", r.min_margin}};
}

inline void to_json(ordered_json& j, const RegularizeReport& r) {
  j = ordered_json{{"rows", r.rows},
                   {"ratio_delta_best", r.ratio_delta_best},
                   {"ratio_delta_sym", r.ratio_delta_sym},
                   {"ratio_fp_delta", r.ratio_fp_delta},
                   {"ratio_fp_C", r.ratio_fp_C},
                   {"ratio_lambda0", r.ratio_lambda0},
                   {"ratio_N_weight", r.ratio_N_weight},
                   {"pass", r.pass}};
}

inline void to_json(ordered_json& j, const TaylorFdCheck& c) {
  j = ordered_json{{"h", c.h}, {"rel_error", c.rel_error}, {"max_rel_error", c.max_rel_error}};
}

/// Top-level document shared by all commands.
inline ordered_json run_manifest(const std::string& command, const HyperbolicModel& m, ordered_json parameters) {
  return ordered_json{{"tool", "triplex"}, {"command", command}, {"model", m}, {"parameters", std::move(parameters)}};
}

inline std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

inline void write_json(const std::string& path, const ordered_json& j) { write_text_file(path, dump_json(j)); }

}  // namespace triplex
