#pragma once

// Weyl quantization on the truncated torus:
//   Op^w(q)[k, k'] = q^(k - k'; (kappa_k + kappa_k') / 2)
// where q^(m; xi) is the m-th Fourier coefficient in x of q(t, ., xi).

#include <cmath>
#include <vector>

#include "triplex/parallel.hpp"
#include "triplex/quantize/grid.hpp"
#include "triplex/symbol/model.hpp"

namespace triplex {

/// Square matrix of scalar symbols, row-major.
struct SymbolMatrix {
  int dim = 1;
  std::vector<Expr> entries{Expr(0.0)};

  SymbolMatrix() = default;
  SymbolMatrix(int d, std::vector<Expr> e) : dim(d), entries(std::move(e)) {
    if (static_cast<int>(entries.size()) != d * d) throw InvalidArgument("symbol matrix size mismatch");
  }
  static SymbolMatrix scalar(Expr e) { return SymbolMatrix(1, {std::move(e)}); }

  const Expr& at(int r, int c) const { return entries[r * dim + c]; }

  Eigen::MatrixXd eval(const Point& p) const {
    Eigen::MatrixXd m(dim, dim);
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) m(r, c) = at(r, c).eval(p);
    return m;
  }

  bool depends_on(Var v) const {
    for (const auto& e : entries)
      if (e.depends_on(v)) return true;
    return false;
  }
};

inline SymbolMatrix symbol_matrix_S(const HyperbolicModel& m) {
  const Expr& a = m.a();
  const Expr& b = m.b();
  return SymbolMatrix(3, {Expr(3.0), Expr(0.0), -a, Expr(0.0), Expr(2.0) * a, Expr(3.0) * b, -a, Expr(3.0) * b,
                          pow(a, 2)});
}

/// S - delta t J with J = diag(1, 1, a).
inline SymbolMatrix symbol_matrix_Q(const HyperbolicModel& m, double delta) {
  SymbolMatrix S = symbol_matrix_S(m);
  const Expr dt = Expr(delta) * Expr::t();
  S.entries[0] = S.entries[0] - dt;
  S.entries[4] = S.entries[4] - dt;
  S.entries[8] = S.entries[8] - dt * m.a();
  return S;
}

inline SymbolMatrix symbol_identity(int dim) {
  std::vector<Expr> e(dim * dim, Expr(0.0));
  for (int i = 0; i < dim; ++i) e[i * dim + i] = Expr(1.0);
  return SymbolMatrix(dim, std::move(e));
}

namespace detail {

/// Fourier coefficients c_m, |m| <= m_max, stored at index m_max + m.
/// Negative m are filled by conjugation so real samples give exactly
/// Hermitian-symmetric coefficients.
inline std::vector<cplx> fourier_coefficients(const FourierGrid& g, const std::vector<double>& samples, int m_max) {
  std::vector<cplx> c(2 * m_max + 1);
  for (int m = 0; m <= m_max; ++m) {
    c[m_max + m] = g.coefficient(samples, m);
    if (m > 0) c[m_max - m] = std::conj(c[m_max + m]);
  }
  return c;
}

inline std::vector<double> sample_x(const Expr& q, const FourierGrid& g, double t, double xi) {
  std::vector<double> s(g.Nq());
  for (int j = 0; j < g.Nq(); ++j) s[j] = q.eval(Point{t, g.node(j), xi});
  return s;
}

}  // namespace detail

inline LinOp op_weyl(const Expr& q, double t, const FourierGrid& g) {
  const int N = g.N(), K = g.K();
  LinOp op(g);
  const bool xdep = q.depends_on(Var::x);
  const bool xidep = q.depends_on(Var::xi);
  if (!xdep) {
    for (int i = 0; i < N; ++i) op.mat(i, i) = q.eval(Point{t, 0.0, g.kappa_at(i)});
    return op;
  }
  if (!xidep) {
    const auto c = detail::fourier_coefficients(g, detail::sample_x(q, g, t, 0.0), 2 * K);
    for (int i = 0; i < N; ++i)
      for (int ip = 0; ip < N; ++ip) op.mat(i, ip) = c[2 * K + (i - ip)];
    return op;
  }
  // One x-transform per midpoint frequency s = k + k'.
  parallel_for(static_cast<std::size_t>(4 * K + 1), [&](std::size_t si) {
    const int s = static_cast<int>(si) - 2 * K;
    const double xi = 0.5 * g.kappa(s);
    const int m_max = 2 * K - std::abs(s);
    const auto c = detail::fourier_coefficients(g, detail::sample_x(q, g, t, xi), m_max);
    for (int m = -m_max; m <= m_max; m += 2) {
      const int k = (s + m) / 2, kp = (s - m) / 2;
      op.mat(k + K, kp + K) = c[m_max + m];
    }
  });
  return op;
}

inline BlockOp block_op_weyl(const SymbolMatrix& Q, double t, const FourierGrid& g) {
  BlockOp b(g, Q.dim);
  for (int r = 0; r < Q.dim; ++r)
    for (int c = 0; c < Q.dim; ++c) {
      const Expr& e = Q.at(r, c);
      if (e.is_constant(0.0)) continue;
      b.set_block(r, c, op_weyl(e, t, g));
    }
  return b;
}

/// Time-dependent quantized symbol. When q is a polynomial in t of degree
/// <= 8 the operator is stored as sum_j t^j C_j with C_j = Op^w(d_t^j q|_{t=0})/j!
/// and evaluated by Horner's rule; otherwise it is re-assembled at each t.
class TimeSymbolOp {
 public:
  TimeSymbolOp(Expr q, const FourierGrid& g) : q_(std::move(q)), grid_(g) {
    const int d = polynomial_degree(q_, Var::t, 8);
    if (d < 0) return;
    try {
      Expr dj = q_;
      double fact = 1.0;
      for (int j = 0; j <= d; ++j) {
        if (j > 0) {
          dj = derivative(dj, Var::t);
          fact *= j;
        }
        coeffs_.push_back(op_weyl(dj, 0.0, g).mat / fact);
      }
    } catch (const DomainError&) {
      coeffs_.clear();
    }
  }

  bool polynomial() const { return !coeffs_.empty(); }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const Expr& symbol() const { return q_; }

  CMat at(double t) const {
    if (!polynomial()) return op_weyl(q_, t, grid_).mat;
    CMat r = coeffs_.back();
    for (int j = degree() - 1; j >= 0; --j) r = r * t + coeffs_[j];
    return r;
  }

  CMat dt_at(double t) const {
    if (!polynomial()) return op_weyl(derivative(q_, Var::t), t, grid_).mat;
    if (degree() == 0) return CMat::Zero(grid_.N(), grid_.N());
    CMat r = coeffs_.back() * static_cast<double>(degree());
    for (int j = degree() - 1; j >= 1; --j) r = r * t + coeffs_[j] * static_cast<double>(j);
    return r;
  }

  /// Quantized d_t^j q at t = 0.
  CMat derivative_at_zero(int j) const {
    if (polynomial()) {
      if (j > degree()) return CMat::Zero(grid_.N(), grid_.N());
      double fact = 1.0;
      for (int i = 2; i <= j; ++i) fact *= i;
      return coeffs_[j] * fact;
    }
    Expr dj = q_;
    for (int i = 0; i < j; ++i) dj = derivative(dj, Var::t);
    return op_weyl(dj, 0.0, grid_).mat;
  }

 private:
  Expr q_;
  FourierGrid grid_;
  std::vector<CMat> coeffs_;
};

}  // namespace triplex
