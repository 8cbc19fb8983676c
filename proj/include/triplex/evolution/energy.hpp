#pragma once

// Weighted energy E(t) = t^{-N} e^{-gamma t} Re(S_h(t) U, U) with
//   S_h(t) = Op^w(S(t)) + lambda t^{-1} blockdiag(<D>^{-2})
// and the differential inequality
//   E' <= t^{-N+1} e^{-gamma t} (S_h F, F) - (N - N*) t^{-1} E.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "triplex/evolution/integrator.hpp"

namespace triplex {

struct EvolveConfig {
  double eps_start = 1e-2;
  double T = 1.0;
  double dt = 0.0;      // 0: largest step allowed by the CFL factor
  double cfl = 0.5;
  double N_weight = 2.0;
  double gamma = 1.0;
  double lambda = 1.0;
  double delta = 0.0;
  double N_star = 0.0;  // constant entering the right-hand side bound

  void validate() const {
    if (!(eps_start > 0.0 && eps_start < T)) throw InvalidArgument("need 0 < eps_start < T");
    if (!(N_weight > 0.0)) throw InvalidArgument("N_weight must be positive");
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
    if (!(dt >= 0.0) || !(cfl > 0.0)) throw InvalidArgument("dt and cfl must be positive");
  }

  /// Requested step limited by the CFL bound and by eps_start / 10, so that
  /// the weight t^{-N} is resolved near the initial time.
  double step_bound(const SystemOps& ops) const {
    const double cap = std::min(ops.max_dt(cfl), 0.1 * eps_start);
    return dt > 0.0 ? std::min(dt, cap) : cap;
  }
};

/// Energy operators at one time.
class EnergyOps {
 public:
  EnergyOps(const SystemOps& ops, double lambda) : ops_(&ops), lambda_(lambda), jp_m2_(ops.block_jp(-2.0)) {}

  double lambda() const { return lambda_; }
  const Eigen::VectorXd& jp_m2() const { return jp_m2_; }

  CMat H(double t) const {
    CMat h = ops_->symmetrizer(t);
    h.diagonal() += (lambda_ / t) * jp_m2_.cast<cplx>();
    return h;
  }
  CMat H_dot(double t) const {
    CMat h = ops_->symmetrizer_dt(t);
    h.diagonal() -= (lambda_ / (t * t)) * jp_m2_.cast<cplx>();
    return h;
  }
  /// G = H' + i (H M - M^* H), so that d/dt (H U, U) = (G U, U) for F = 0.
  CMat G(double t) const {
    const CMat h = H(t);
    const CMat m = ops_->generator(t);
    const CMat hm = h * m;
    return hermitian_part(CMat(H_dot(t) + cplx(0.0, 1.0) * (hm - hm.adjoint())));
  }

 private:
  const SystemOps* ops_;
  double lambda_;
  Eigen::VectorXd jp_m2_;
};

struct EnergyTrace {
  std::vector<double> t, E, dE_dt, rhs_bound, margin, n1sq, n2sq, aU3U3, norm;
  std::vector<double> source;  // t^{-N+1} e^{-gamma t} (S_h F, F)

  std::size_t size() const { return t.size(); }
};

struct EvolveResult {
  EnergyTrace trace;
  CVec U;
  std::string verdict = "completed";  // or "unbounded"
  double abort_time = NAN;
  double dt = 0.0;
};

inline double energy_weight(const EvolveConfig& cfg, double t) {
  return std::exp(-cfg.N_weight * std::log(t) - cfg.gamma * t);
}

/// Evolves one state from eps_start to T and records the energy at every step.
inline EvolveResult evolve(const SystemOps& ops, const CVec& U_init, const Forcing& f, const EvolveConfig& cfg) {
  cfg.validate();
  if (U_init.size() != ops.dim()) throw InvalidArgument("initial state has wrong dimension");
  const EnergyOps en(ops, cfg.lambda);
  const int N = ops.grid().N();
  EvolveResult res;
  EnergyTrace& tr = res.trace;
  auto record = [&](double t, const CMat& Um) {
    const CVec U = Um.col(0);
    const CMat H = en.H(t);
    const CVec HU = H * U;
    const CVec F = f.at(t, ops.grid());
    const CVec X = ops.generator(t) * U + F;
    const double h = std::real(U.dot(HU));
    const double dh = std::real(U.dot(en.H_dot(t) * U)) + 2.0 * std::real((cplx(0.0, 1.0) * X).dot(HU));
    const double w = energy_weight(cfg, t);
    const double E = w * h;
    const double dE = w * dh - (cfg.N_weight / t + cfg.gamma) * E;
    const double src = w * t * std::real(F.dot(H * F));
    const double rhs = src - (cfg.N_weight - cfg.N_star) * E / t;
    tr.t.push_back(t);
    tr.E.push_back(E);
    tr.dE_dt.push_back(dE);
    tr.rhs_bound.push_back(rhs);
    tr.margin.push_back(rhs - dE);
    tr.source.push_back(src);
    tr.n1sq.push_back(U.segment(0, N).squaredNorm());
    tr.n2sq.push_back(U.segment(N, N).squaredNorm());
    const CVec U3 = U.segment(2 * N, N);
    tr.aU3U3.push_back(std::real(U3.dot(ops.op_a(t) * U3)));
    tr.norm.push_back(U.norm());
  };
  const double dt_max = cfg.step_bound(ops);
  res.dt = (cfg.T - cfg.eps_start) / step_count(cfg.eps_start, cfg.T, dt_max);
  try {
    res.U = integrate(ops, CMat(U_init), cfg.eps_start, cfg.T, dt_max, f, record).col(0);
  } catch (const InstabilityDetected& e) {
    res.verdict = "unbounded";
    res.abort_time = e.time();
  }
  return res;
}

struct EnergyCheck {
  bool pass = false;
  double tol_E = 0.0;
  double min_margin = 0.0;   // normalized per-step margin
  double min_margin_t = 0.0;
  double max_defect = 0.0;   // normalized |FD quotient - trapezoid of E'|
  std::vector<double> step_margins;
  // E(t) + (N - N*) int_eps^t E/tau  <=  E(eps) + int_eps^t source, relative excess
  double integrated_excess = 0.0;
  bool integrated_pass = false;
};

/// Per-step margins RHS - (E(t+dt) - E(t))/dt, with RHS the trapezoid average,
/// normalized by E/t + |E'| + |RHS| at the step endpoints.
inline EnergyCheck check_energy_inequality(const EnergyTrace& tr, const EvolveConfig& cfg) {
  EnergyCheck c;
  if (tr.size() < 2) throw InvalidArgument("energy trace needs at least two samples");
  const double dt = tr.t[1] - tr.t[0];
  c.tol_E = (dt / cfg.eps_start) * (dt / cfg.eps_start);
  c.min_margin = INFINITY;
  double lhs_int = 0.0, src_int = 0.0;
  for (std::size_t n = 0; n + 1 < tr.size(); ++n) {
    const double h = tr.t[n + 1] - tr.t[n];
    const double fd = (tr.E[n + 1] - tr.E[n]) / h;
    const double rhs = 0.5 * (tr.rhs_bound[n] + tr.rhs_bound[n + 1]);
    const double dE = 0.5 * (tr.dE_dt[n] + tr.dE_dt[n + 1]);
    double scale = 0.0;
    for (std::size_t k : {n, n + 1})
      scale = std::max(scale, std::abs(tr.E[k]) / tr.t[k] + std::abs(tr.dE_dt[k]) + std::abs(tr.rhs_bound[k]));
    if (scale == 0.0) scale = 1.0;
    const double m = (rhs - fd) / scale;
    c.step_margins.push_back(m);
    if (m < c.min_margin) {
      c.min_margin = m;
      c.min_margin_t = tr.t[n];
    }
    c.max_defect = std::max(c.max_defect, std::abs(fd - dE) / scale);
    lhs_int += 0.5 * h * (tr.E[n] / tr.t[n] + tr.E[n + 1] / tr.t[n + 1]);
    src_int += 0.5 * h * (tr.source[n] + tr.source[n + 1]);
    const double lhs = tr.E[n + 1] + (cfg.N_weight - cfg.N_star) * lhs_int;
    const double bound = tr.E[0] + src_int;
    const double ref = std::max(std::abs(tr.E[0]) + std::abs(src_int), 1e-300);
    c.integrated_excess = std::max(c.integrated_excess, (lhs - bound) / ref);
  }
  c.pass = c.min_margin >= -c.tol_E;
  c.integrated_pass = c.integrated_excess <= c.tol_E;
  return c;
}

struct EnergyConstants {
  double lambda0 = 0.0;
  double N_star0 = 0.0;  // max_t t (mu_max(t) - gamma)
  double N_star = 0.0;   // declared constant
  double N_weight = 0.0;
  double gamma = 1.0;
  std::vector<double> times, mu_max;
  bool found = false;
};

/// Largest generalized eigenvalue of G v = mu H v for Hermitian G and
/// positive definite H.
inline double max_generalized_eigenvalue(const CMat& G, const CMat& H) {
  Eigen::LLT<CMat> llt(H);
  if (llt.info() != Eigen::Success) return INFINITY;
  const CMat Linv = llt.matrixL().solve(CMat::Identity(H.rows(), H.cols()));
  const CMat C = hermitian_part(CMat(Linv * G * Linv.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMat> es(C, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Searches lambda0 = smallest power of two with Op^w(S) + (lambda/2) t^{-1} <D>^{-2} >= 0
/// on a log grid of times, then N*0 = max_t t (mu_max - gamma) for the energy
/// built with lambda0. The declared N* adds one (absorbing the source term)
/// and is rounded up to a multiple of 1/2; N = N* + 1.
inline EnergyConstants search_energy_constants(const SystemOps& ops, double eps_start, double T, double gamma = 1.0,
                                               int nt = 32) {
  EnergyConstants c;
  c.gamma = gamma;
  c.times = logspace(eps_start, T, nt);
  const Eigen::VectorXd jp_m2 = ops.block_jp(-2.0);
  std::vector<CMat> S(c.times.size());
  std::vector<double> scale(c.times.size());
  parallel_for(c.times.size(), [&](std::size_t i) {
    S[i] = ops.symmetrizer(c.times[i]);
    scale[i] = 1.0 + S[i].cwiseAbs().rowwise().sum().maxCoeff();
  });
  auto positive = [&](double lambda) {
    for (std::size_t i = 0; i < c.times.size(); ++i) {
      CMat m = S[i];
      m.diagonal() += (0.5 * lambda / c.times[i]) * jp_m2.cast<cplx>();
      if (min_hermitian_eigenvalue(m) < -1e-12 * scale[i]) return false;
    }
    return true;
  };
  int k = 0;
  while (k <= 14 && !positive(std::ldexp(1.0, k))) ++k;
  if (k > 14) return c;
  c.lambda0 = std::ldexp(1.0, k);
  const EnergyOps en(ops, c.lambda0);
  c.mu_max.assign(c.times.size(), 0.0);
  parallel_for(c.times.size(), [&](std::size_t i) {
    const double t = c.times[i];
    c.mu_max[i] = max_generalized_eigenvalue(en.G(t), en.H(t));
  });
  c.N_star0 = -INFINITY;
  for (std::size_t i = 0; i < c.times.size(); ++i)
    c.N_star0 = std::max(c.N_star0, c.times[i] * (c.mu_max[i] - gamma));
  if (!std::isfinite(c.N_star0)) return c;
  c.N_star = std::max(0.0, std::ceil(2.0 * (c.N_star0 + 1.0)) / 2.0);
  c.N_weight = c.N_star + 1.0;
  c.found = true;
  return c;
}

inline EvolveConfig config_from_constants(const EnergyConstants& c, double eps_start, double T, double dt = 0.0) {
  EvolveConfig cfg;
  cfg.eps_start = eps_start;
  cfg.T = T;
  cfg.dt = dt;
  cfg.gamma = c.gamma;
  cfg.lambda = c.lambda0;
  cfg.N_star = c.N_star;
  cfg.N_weight = c.N_weight;
  return cfg;
}

}  // namespace triplex
