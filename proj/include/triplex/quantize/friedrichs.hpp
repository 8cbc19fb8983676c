#pragma once

// Friedrichs symmetrization
//   Q_F[k, k'] = sum_zeta w F(k, zeta) F(k', zeta) Q^(k - k'; zeta)
// with F(xi, zeta) = q((zeta - xi) <xi>^{-1/2}) <xi>^{-1/4}. For every zeta the
// inner matrix is the quadrature compression of multiplication by Q(., zeta),
// so Q_F is positive semidefinite whenever Q is, independent of K.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "triplex/parallel.hpp"
#include "triplex/quantize/weyl.hpp"

namespace triplex {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule via Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    r.nodes[i] = x;
    r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

inline const GaussRule& gauss_legendre_33() {
  static const GaussRule rule = gauss_legendre(33);
  return rule;
}

/// Integral of f over [lo, hi] by composite 33-point Gauss-Legendre on `panels` panels.
inline double composite_gauss(const std::function<double(double)>& f, double lo, double hi, int panels) {
  const GaussRule& g = gauss_legendre_33();
  const double h = (hi - lo) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = lo + (p + 0.5) * h;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * f(c + 0.5 * h * g.nodes[i]);
  }
  return 0.5 * h * s;
}

/// Even window supported in [-1, 1] with unit L2 norm.
struct Bump {
  std::string name;
  std::function<double(double)> q;
};

inline Bump default_bump() {
  auto raw = [](double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; };
  static const double c = 1.0 / std::sqrt(composite_gauss([&](double s) { return raw(s) * raw(s); }, -1.0, 1.0, 64));
  return Bump{"exp(-1/(1-s^2))", [raw](double s) { return c * raw(s); }};
}

/// Rejects windows that are not even, not supported in [-1, 1], or whose
/// squared integral differs from 1 by more than 1e-8.
inline void validate_bump(const Bump& b) {
  for (double s : {0.1, 0.37, 0.5, 0.81, 0.99})
    if (std::abs(b.q(s) - b.q(-s)) > 1e-12 * (1.0 + std::abs(b.q(s))))
      throw InvalidArgument("bump '" + b.name + "' is not even");
  for (double s : {1.0, 1.01, 1.5, 3.0})
    if (b.q(s) != 0.0 || b.q(-s) != 0.0) throw InvalidArgument("bump '" + b.name + "' is not supported in [-1, 1]");
  const double l2 = composite_gauss([&](double s) { return b.q(s) * b.q(s); }, -1.0, 1.0, 64);
  if (std::abs(l2 - 1.0) > 1e-8)
    throw InvalidArgument("bump '" + b.name + "' is not normalized (integral of q^2 = " + std::to_string(l2) + ")");
}

/// max over quadrature nodes x_j and frequencies kappa_k of the spectral norm of Q.
inline double symbol_norm(const SymbolMatrix& Q, double t, const FourierGrid& g) {
  const bool xidep = Q.depends_on(Var::xi);
  const int nxi = xidep ? g.N() : 1;
  std::vector<double> slot(g.Nq(), 0.0);
  parallel_for(static_cast<std::size_t>(g.Nq()), [&](std::size_t j) {
    double best = 0.0;
    for (int i = 0; i < nxi; ++i) {
      const Eigen::MatrixXd m = Q.eval(Point{t, g.node(static_cast<int>(j)), xidep ? g.kappa_at(i) : 0.0});
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
      best = std::max(best, svd.singularValues()(0));
    }
    slot[j] = best;
  });
  return *std::max_element(slot.begin(), slot.end());
}

struct FriedrichsResult {
  BlockOp op;
  double min_eig = 0.0;     // of the Hermitian part
  double q_norm = 0.0;      // symbol norm of Q
  int panels_per_unit = 1;  // zeta quadrature resolution used
};

namespace detail {

struct ZetaNodes {
  std::vector<double> zeta, weight;
};

inline ZetaNodes zeta_nodes(const FourierGrid& g, int panels_per_unit) {
  const double hK = std::sqrt(japanese_bracket(g.kappa(g.K())));
  const double lo = g.kappa(-g.K()) - hK, hi = g.kappa(g.K()) + hK;
  const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) * panels_per_unit)));
  const GaussRule& gr = gauss_legendre_33();
  const double h = (hi - lo) / panels;
  ZetaNodes z;
  for (int p = 0; p < panels; ++p) {
    const double c = lo + (p + 0.5) * h;
    for (std::size_t i = 0; i < gr.nodes.size(); ++i) {
      z.zeta.push_back(c + 0.5 * h * gr.nodes[i]);
      z.weight.push_back(0.5 * h * gr.weights[i]);
    }
  }
  return z;
}

/// Window values F(kappa_k, zeta) over the contiguous index range [first, last]
/// covering the support; returns first, or -1 when no mode is active.
inline int window_values(const FourierGrid& g, const Bump& bump, double zeta, std::vector<double>& F) {
  F.clear();
  int first = -1, last = -1;
  for (int i = 0; i < g.N(); ++i) {
    const double kap = g.kappa_at(i);
    if (std::abs(zeta - kap) < std::sqrt(japanese_bracket(kap))) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0) return -1;
  for (int i = first; i <= last; ++i) {
    const double kap = g.kappa_at(i);
    const double h = std::sqrt(japanese_bracket(kap));
    F.push_back(bump.q((zeta - kap) / h) / std::sqrt(h));
  }
  return first;
}

inline BlockOp assemble_friedrichs(const SymbolMatrix& Q, double t, const FourierGrid& g, const Bump& bump,
                                   int panels_per_unit) {
  const int D = Q.dim, N = g.N(), K = g.K();
  const ZetaNodes z = zeta_nodes(g, panels_per_unit);
  const bool xidep = Q.depends_on(Var::xi);
  BlockOp out(g, D);

  if (!xidep) {
    // Q^(m) does not depend on zeta: Q_F[k,k'] = Q^(k-k') G[k,k'].
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(N, N);
    std::vector<double> F;
    for (std::size_t n = 0; n < z.zeta.size(); ++n) {
      const int first = window_values(g, bump, z.zeta[n], F);
      if (first < 0) continue;
      const int len = static_cast<int>(F.size());
      for (int a = 0; a < len; ++a)
        for (int b = 0; b < len; ++b) G(first + a, first + b) += z.weight[n] * F[a] * F[b];
    }
    for (int r = 0; r < D; ++r)
      for (int c = 0; c < D; ++c) {
        const Expr& e = Q.at(r, c);
        if (e.is_constant(0.0)) continue;
        const auto coef = fourier_coefficients(g, sample_x(e, g, t, 0.0), 2 * K);
        auto blk = out.block(r, c);
        for (int i = 0; i < N; ++i)
          for (int ip = 0; ip < N; ++ip)
            if (G(i, ip) != 0.0) blk(i, ip) = coef[2 * K + (i - ip)] * G(i, ip);
      }
    return out;
  }

  // General case: one x-transform of Q(t, ., zeta) per zeta node. Nodes are
  // split into contiguous chunks accumulated separately, then summed in order.
  const std::size_t nz = z.zeta.size();
  const std::size_t chunks = std::min<std::size_t>(nz, 64);
  std::vector<CMat> partial(chunks);
  parallel_for(chunks, [&](std::size_t ch) {
    CMat acc = CMat::Zero(D * N, D * N);
    std::vector<double> F;
    const std::size_t begin = ch * nz / chunks, end = (ch + 1) * nz / chunks;
    for (std::size_t n = begin; n < end; ++n) {
      const int first = window_values(g, bump, z.zeta[n], F);
      if (first < 0) continue;
      const int len = static_cast<int>(F.size());
      for (int r = 0; r < D; ++r)
        for (int c = 0; c < D; ++c) {
          const Expr& e = Q.at(r, c);
          if (e.is_constant(0.0)) continue;
          const auto coef = fourier_coefficients(g, sample_x(e, g, t, z.zeta[n]), len - 1);
          for (int a = 0; a < len; ++a)
            for (int b = 0; b < len; ++b)
              acc(r * N + first + a, c * N + first + b) += z.weight[n] * F[a] * F[b] * coef[len - 1 + (a - b)];
        }
    }
    partial[ch] = std::move(acc);
  });
  for (const auto& p : partial) out.mat += p;
  return out;
}

}  // namespace detail

/// Friedrichs part of the symbol matrix Q at time t. The zeta quadrature is
/// refined (panels per unit length 1, 2, 4, 8) until the smallest eigenvalue
/// of the Hermitian part changes by less than 1e-9.
inline FriedrichsResult friedrichs_part(const SymbolMatrix& Q, double t, const FourierGrid& g,
                                        const Bump& bump = default_bump()) {
  validate_bump(bump);
  FriedrichsResult res{BlockOp(g, Q.dim)};
  res.q_norm = symbol_norm(Q, t, g);
  double prev = NAN;
  for (int ppu = 1; ppu <= 8; ppu *= 2) {
    BlockOp op = detail::assemble_friedrichs(Q, t, g, bump, ppu);
    const double me = min_hermitian_eigenvalue(op.mat);
    res.op = std::move(op);
    res.min_eig = me;
    res.panels_per_unit = ppu;
    if (std::abs(me - prev) < 1e-9) break;
    prev = me;
  }
  return res;
}

/// Operator norms of (Q_F - Op^w(Q)) <D> for each K.
inline std::vector<double> sgarding_residual(const SymbolMatrix& Q, double t, const std::vector<int>& K_list,
                                             double period = 2.0 * std::numbers::pi,
                                             const Bump& bump = default_bump()) {
  for (std::size_t i = 1; i < K_list.size(); ++i)
    if (K_list[i] <= K_list[i - 1]) throw InvalidArgument("K list must be increasing");
  std::vector<double> out;
  for (int K : K_list) {
    const FourierGrid g(K, period);
    const FriedrichsResult f = friedrichs_part(Q, t, g, bump);
    const BlockOp w = block_op_weyl(Q, t, g);
    const LinOp jp = op_jp(g);
    BlockOp jpb(g, Q.dim);
    for (int r = 0; r < Q.dim; ++r) jpb.set_block(r, r, jp);
    out.push_back(operator_norm(CMat((f.op.mat - w.mat) * jpb.mat)));
  }
  return out;
}

}  // namespace triplex
