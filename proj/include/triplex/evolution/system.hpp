#pragma once

// Quantized first-order system D_t U = M(t) U + F, with
//   M(t) = [[Op(b10), Op(a) <D> + Op(b11), Op(b) <D> + Op(b12)],
//           [<D>,     0,                   0                  ],
//           [0,       <D>,                 0                  ]]
// acting on U = (D_t^2 u, D_t <D> u, <D>^2 u), and the quantized symmetrizer.

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "triplex/quantize/weyl.hpp"
#include "triplex/symbol/model.hpp"

namespace triplex {

/// Fourier coefficients (orthonormal basis) of f(t, .) sampled on the quadrature nodes.
inline CVec project_function(const Expr& f, double t, const FourierGrid& g) {
  std::vector<double> s(g.Nq());
  for (int j = 0; j < g.Nq(); ++j) s[j] = f.eval(Point{t, g.node(j), 0.0});
  CVec v(g.N());
  const double norm = std::sqrt(g.period());
  for (int i = 0; i < g.N(); ++i) v(i) = norm * g.coefficient(s, g.mode(i));
  return v;
}

/// Scalar source term f(t, x) entering as F = (f, 0, 0).
class Forcing {
 public:
  Forcing() = default;
  explicit Forcing(Expr f) : f_(std::move(f)) {}

  bool active() const { return f_.has_value() && !f_->is_constant(0.0); }
  const Expr& symbol() const { return *f_; }

  /// Full 3N vector F(t).
  CVec at(double t, const FourierGrid& g) const {
    CVec F = CVec::Zero(3 * g.N());
    if (active()) F.head(g.N()) = project_function(*f_, t, g);
    return F;
  }

  /// d_t^j F at t = 0.
  CVec derivative_at_zero(int j, const FourierGrid& g) const {
    CVec F = CVec::Zero(3 * g.N());
    if (!active()) return F;
    Expr d = *f_;
    for (int i = 0; i < j; ++i) d = derivative(d, Var::t);
    F.head(g.N()) = project_function(d, 0.0, g);
    return F;
  }

 private:
  std::optional<Expr> f_;
};

class SystemOps {
 public:
  SystemOps(const HyperbolicModel& m, const FourierGrid& g)
      : grid_(g),
        a_(std::make_shared<TimeSymbolOp>(m.a(), g)),
        b_(std::make_shared<TimeSymbolOp>(m.b(), g)),
        a2_(std::make_shared<TimeSymbolOp>(pow(m.a(), 2), g)),
        b10_(std::make_shared<TimeSymbolOp>(m.lower().b10, g)),
        b11_(std::make_shared<TimeSymbolOp>(m.lower().b11, g)),
        b12_(std::make_shared<TimeSymbolOp>(m.lower().b12, g)),
        jp_(g.N()),
        T_(m.T()) {
    for (int i = 0; i < g.N(); ++i) jp_(i) = japanese_bracket(g.kappa_at(i));
    a_sup_ = 0.0;
    for (double t : linspace(0.0, m.T(), 9))
      for (int j = 0; j < g.Nq(); ++j)
        for (double xi : {0.0, g.kappa(g.K())}) a_sup_ = std::max(a_sup_, std::abs(m.a().eval({t, g.node(j), xi})));
  }

  const FourierGrid& grid() const { return grid_; }
  int dim() const { return 3 * grid_.N(); }
  double T() const { return T_; }
  /// sup |a| sampled over [0, T] and the grid.
  double a_sup() const { return a_sup_; }
  const Eigen::VectorXd& jp() const { return jp_; }

  /// Largest stable step for the explicit integrator at the given CFL factor.
  double max_dt(double cfl = 0.5) const {
    return cfl / (std::sqrt(a_sup_) + 1.0) / japanese_bracket(grid_.kappa(grid_.K()));
  }

  CMat generator(double t) const { return assemble_generator(a_->at(t), b_->at(t), b10_->at(t), b11_->at(t), b12_->at(t), true); }

  /// First block row of M(t) (N x 3N); the other rows are the <D> couplings.
  CMat generator_row0(double t) const {
    const int N = grid_.N();
    CMat r(N, 3 * N);
    r.leftCols(N) = b10_->at(t);
    r.middleCols(N, N) = a_->at(t) * jp_.asDiagonal();
    r.middleCols(N, N) += b11_->at(t);
    r.rightCols(N) = b_->at(t) * jp_.asDiagonal();
    r.rightCols(N) += b12_->at(t);
    return r;
  }

  /// d_t^i M at t = 0 (the <D> couplings are constant in t).
  CMat generator_derivative_at_zero(int i) const {
    return assemble_generator(a_->derivative_at_zero(i), b_->derivative_at_zero(i), b10_->derivative_at_zero(i),
                              b11_->derivative_at_zero(i), b12_->derivative_at_zero(i), i == 0);
  }

  /// Op^w(S(t)) (Hermitian).
  CMat symmetrizer(double t) const { return assemble_S(a_->at(t), b_->at(t), a2_->at(t), 3.0); }
  /// Op^w(d_t S(t)).
  CMat symmetrizer_dt(double t) const { return assemble_S(a_->dt_at(t), b_->dt_at(t), a2_->dt_at(t), 0.0); }

  /// blockdiag(<D>^p, <D>^p, <D>^p) as a vector of diagonal entries.
  Eigen::VectorXd block_jp(double p) const {
    const int N = grid_.N();
    Eigen::VectorXd d(3 * N);
    for (int r = 0; r < 3; ++r)
      for (int i = 0; i < N; ++i) d(r * N + i) = std::pow(jp_(i), p);
    return d;
  }

  /// Herm Op^w(a(t)).
  CMat op_a(double t) const { return hermitian_part(a_->at(t)); }

 private:
  CMat assemble_generator(const CMat& a, const CMat& b, const CMat& b10, const CMat& b11, const CMat& b12,
                          bool with_couplings) const {
    const int N = grid_.N();
    CMat M = CMat::Zero(3 * N, 3 * N);
    M.block(0, 0, N, N) = b10;
    M.block(0, N, N, N) = a * jp_.asDiagonal() + b11;
    M.block(0, 2 * N, N, N) = b * jp_.asDiagonal() + b12;
    if (with_couplings) {
      M.block(N, 0, N, N).diagonal() = jp_.cast<cplx>();
      M.block(2 * N, N, N, N).diagonal() = jp_.cast<cplx>();
    }
    return M;
  }

  CMat assemble_S(const CMat& a, const CMat& b, const CMat& a2, double three) const {
    const int N = grid_.N();
    CMat S = CMat::Zero(3 * N, 3 * N);
    S.block(0, 0, N, N).diagonal().setConstant(three);
    S.block(0, 2 * N, N, N) = -a;
    S.block(2 * N, 0, N, N) = -a;
    S.block(N, N, N, N) = 2.0 * a;
    S.block(N, 2 * N, N, N) = 3.0 * b;
    S.block(2 * N, N, N, N) = 3.0 * b;
    S.block(2 * N, 2 * N, N, N) = a2;
    return hermitian_part(S);
  }

  FourierGrid grid_;
  std::shared_ptr<const TimeSymbolOp> a_, b_, a2_, b10_, b11_, b12_;
  Eigen::VectorXd jp_;
  double T_ = 1.0;
  double a_sup_ = 0.0;
};

/// Initial state from u(0), d_t u(0), d_t^2 u(0) given as coefficient vectors:
/// U = (D_t^2 u, D_t <D> u, <D>^2 u) with D_t = -i d_t.
inline CVec state_from_data(const SystemOps& ops, const CVec& u0, const CVec& u1, const CVec& u2) {
  const int N = ops.grid().N();
  CVec U(3 * N);
  const auto jp = ops.jp().cast<cplx>();
  U.segment(0, N) = -u2;
  U.segment(N, N) = cplx(0.0, -1.0) * jp.cwiseProduct(u1);
  U.segment(2 * N, N) = jp.cwiseProduct(jp).cwiseProduct(u0);
  return U;
}

}  // namespace triplex
