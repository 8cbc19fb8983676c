#pragma once

// Built-in example models on the 2*pi torus, all with atilde = 1, c0 = 1.
//
//   g_strict(M)    alpha = M,              b = 0
//   g_zero_b       alpha = (1-cos x)^2,    b = 0
//   g_E(eps)       alpha = (1-cos x)^2,    b = t*((1-eps)/sqrt 3)*(1-cos x)
//   g_ex21p        alpha = sin(x)^2,       b = -t*sin(x)
//   g_ex21m        alpha = sin(x)^2,       b =  t*sin(x)
//   g_ex22(m)      alpha = (1-cos x)^2,    b = (t^m/2 - t)*(1-cos x)
//   g_eps(base,eps) base model with alpha replaced by alpha + eps
//
// A gallery spec is "name" or "name:key=value,key=value"; every model also
// accepts T (horizon, default 1).

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "triplex/errors.hpp"
#include "triplex/symbol/model.hpp"

namespace triplex {

using GalleryParams = std::map<std::string, std::string>;

inline const std::vector<std::string>& gallery_names() {
  static const std::vector<std::string> names{"g_strict", "g_zero_b", "g_E", "g_ex21p", "g_ex21m", "g_ex22", "g_eps"};
  return names;
}

namespace detail {

inline double param_real(const GalleryParams& p, const std::string& key, double def) {
  auto it = p.find(key);
  return it == p.end() ? def : parse_real(key, it->second);
}

inline Expr one_minus_cos_x() { return Expr(1.0) - cos(Expr::x()); }

}  // namespace detail

inline HyperbolicModel gallery(const std::string& name, const GalleryParams& params = {});

/// Parses "name:key=value,..." into a name and its parameters.
inline std::pair<std::string, GalleryParams> parse_gallery_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  std::string name = detail::trim(spec.substr(0, colon));
  GalleryParams params;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InvalidArgument("gallery parameter '" + item + "' lacks '='");
      params[detail::trim(item.substr(0, eq))] = detail::trim(item.substr(eq + 1));
    }
  }
  return {name, params};
}

inline HyperbolicModel gallery_from_spec(const std::string& spec) {
  auto [name, params] = parse_gallery_spec(spec);
  return gallery(name, params);
}

inline HyperbolicModel gallery(const std::string& name, const GalleryParams& params) {
  using detail::param_real;
  const double T = param_real(params, "T", 1.0);
  const Expr t = Expr::t(), x = Expr::x();
  const Expr one(1.0);
  auto allow = [&](std::initializer_list<const char*> keys) {
    for (const auto& [k, v] : params) {
      bool ok = (k == "T");
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) throw InvalidArgument("gallery model '" + name + "' has no parameter '" + k + "'");
    }
  };
  auto finish = [&](HyperbolicModel m) {
    m.set_name(name);
    return m;
  };

  if (name == "g_strict") {
    allow({"M"});
    const double M = param_real(params, "M", 1.0);
    if (!(M > 0.0)) throw InvalidArgument("g_strict requires M > 0");
    return finish(HyperbolicModel(Expr(M), one, Expr(0.0), 1.0, T));
  }
  if (name == "g_zero_b") {
    allow({});
    return finish(HyperbolicModel(pow(detail::one_minus_cos_x(), 2), one, Expr(0.0), 1.0, T));
  }
  if (name == "g_E") {
    allow({"eps"});
    const double eps = param_real(params, "eps", 0.25);
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("g_E requires 0 < eps <= 1");
    const Expr b = t * Expr((1.0 - eps) / std::sqrt(3.0)) * detail::one_minus_cos_x();
    return finish(HyperbolicModel(pow(detail::one_minus_cos_x(), 2), one, b, 1.0, T));
  }
  if (name == "g_ex21p" || name == "g_ex21m") {
    allow({});
    const Expr b = name == "g_ex21p" ? -(t * sin(x)) : t * sin(x);
    return finish(HyperbolicModel(pow(sin(x), 2), one, b, 1.0, T));
  }
  if (name == "g_ex22") {
    allow({"m"});
    const double md = param_real(params, "m", 6.0);
    if (md != std::floor(md) || md < 3.0 || md > 64.0) throw InvalidArgument("g_ex22 requires an integer m >= 3");
    const int m = static_cast<int>(md);
    const Expr b = (pow(t, m) / Expr(2.0) - t) * detail::one_minus_cos_x();
    return finish(HyperbolicModel(pow(detail::one_minus_cos_x(), 2), one, b, 1.0, T));
  }
  if (name == "g_eps") {
    const double eps = param_real(params, "eps", 1e-2);
    if (!(eps > 0.0)) throw InvalidArgument("g_eps requires eps > 0");
    GalleryParams base_params;
    std::string base = "g_zero_b";
    for (const auto& [k, v] : params) {
      if (k == "base")
        base = v;
      else if (k != "eps")
        base_params[k] = v;
    }
    if (base == "g_eps") throw InvalidArgument("g_eps cannot wrap itself");
    HyperbolicModel m = gallery(base, base_params).with_alpha_shift(eps);
    m.set_name("g_eps(" + base + ")");
    return m;
  }
  throw InvalidArgument("unknown gallery model '" + name + "'");
}

}  // namespace triplex
