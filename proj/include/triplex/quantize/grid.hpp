#pragma once

// Truncated Fourier basis on the torus and dense operators on it.
//
// Basis functions e_k(x) = exp(i kappa_k x) / sqrt(L), kappa_k = 2 pi k / L,
// k = -K..K; index i = k + K. Fourier coefficients of symbols are computed by
// trapezoid quadrature on Nq = 3N equispaced nodes, so that products of two
// truncated trigonometric polynomials are resolved without aliasing.

#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "triplex/errors.hpp"
#include "triplex/symbol/expr.hpp"

namespace triplex {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

class FourierGrid {
 public:
  explicit FourierGrid(int K, double period = 2.0 * std::numbers::pi) : K_(K), period_(period) {
    if (K < 4) throw InvalidArgument("FourierGrid requires K >= 4");
    if (!(period > 0.0)) throw InvalidArgument("FourierGrid requires a positive period");
    const int nq = Nq();
    auto tw = std::make_shared<std::vector<cplx>>(nq);
    for (int r = 0; r < nq; ++r) (*tw)[r] = std::polar(1.0, -2.0 * std::numbers::pi * r / nq);
    tw_ = std::move(tw);
  }

  int K() const { return K_; }
  int N() const { return 2 * K_ + 1; }
  int Nq() const { return 3 * N(); }
  double period() const { return period_; }

  int mode(int index) const { return index - K_; }
  /// Angular frequency of mode k.
  double kappa(int k) const { return 2.0 * std::numbers::pi * k / period_; }
  double kappa_at(int index) const { return kappa(mode(index)); }
  double node(int j) const { return period_ * j / Nq(); }

  bool operator==(const FourierGrid& o) const { return K_ == o.K_ && period_ == o.period_; }

  /// exp(-2 pi i r / Nq) for r = 0..Nq-1.
  const std::vector<cplx>& twiddles() const { return *tw_; }

  /// Fourier coefficient m of samples f_j = f(node(j)).
  cplx coefficient(const std::vector<double>& samples, int m) const {
    const int nq = Nq();
    const auto& tw = twiddles();
    int r = ((m % nq) + nq) % nq;
    cplx s = 0.0;
    int idx = 0;
    for (int j = 0; j < nq; ++j) {
      s += samples[j] * tw[idx];
      idx += r;
      if (idx >= nq) idx -= nq;
    }
    return s / static_cast<double>(nq);
  }

 private:
  int K_;
  double period_;
  std::shared_ptr<const std::vector<cplx>> tw_;
};

/// Dense operator in the Fourier basis.
struct LinOp {
  FourierGrid grid;
  CMat mat;

  explicit LinOp(const FourierGrid& g) : grid(g), mat(CMat::Zero(g.N(), g.N())) {}
  LinOp(const FourierGrid& g, CMat m) : grid(g), mat(std::move(m)) {}

  static LinOp identity(const FourierGrid& g) { return LinOp(g, CMat::Identity(g.N(), g.N())); }

  LinOp operator+(const LinOp& o) const { return LinOp(grid, mat + o.mat); }
  LinOp operator-(const LinOp& o) const { return LinOp(grid, mat - o.mat); }
  LinOp operator*(const LinOp& o) const { return LinOp(grid, mat * o.mat); }
  LinOp operator*(double s) const { return LinOp(grid, mat * s); }
  LinOp adjoint() const { return LinOp(grid, mat.adjoint()); }
  bool is_hermitian(double tol) const { return (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= tol; }
};

/// 3x3 block operator acting on (U1, U2, U3).
struct BlockOp {
  FourierGrid grid;
  CMat mat;

  explicit BlockOp(const FourierGrid& g, int blocks = 3)
      : grid(g), mat(CMat::Zero(blocks * g.N(), blocks * g.N())) {}
  BlockOp(const FourierGrid& g, CMat m) : grid(g), mat(std::move(m)) {}

  int blocks() const { return static_cast<int>(mat.rows()) / grid.N(); }
  auto block(int r, int c) { return mat.block(r * grid.N(), c * grid.N(), grid.N(), grid.N()); }
  auto block(int r, int c) const { return mat.block(r * grid.N(), c * grid.N(), grid.N(), grid.N()); }
  void set_block(int r, int c, const LinOp& op) { block(r, c) = op.mat; }

  static BlockOp diagonal(const LinOp& d0, const LinOp& d1, const LinOp& d2) {
    BlockOp b(d0.grid);
    b.set_block(0, 0, d0);
    b.set_block(1, 1, d1);
    b.set_block(2, 2, d2);
    return b;
  }

  BlockOp operator+(const BlockOp& o) const { return BlockOp(grid, mat + o.mat); }
  BlockOp operator-(const BlockOp& o) const { return BlockOp(grid, mat - o.mat); }
  BlockOp operator*(double s) const { return BlockOp(grid, mat * s); }
};

/// Fourier multiplier <kappa_k>^power.
inline LinOp op_jp(const FourierGrid& g, double power = 1.0) {
  LinOp d(g);
  for (int i = 0; i < g.N(); ++i) d.mat(i, i) = std::pow(japanese_bracket(g.kappa_at(i)), power);
  return d;
}

inline CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

inline double min_hermitian_eigenvalue(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Largest singular value by power iteration on A^* A, to 1e-8 relative.
inline double operator_norm(const CMat& A, double rel_tol = 1e-8, int max_iter = 20000) {
  const Eigen::Index n = A.cols();
  if (n == 0 || A.rows() == 0) return 0.0;
  CVec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(1.0 + 0.37 * std::sin(1.0 + i), 0.21 * std::cos(2.0 + 3.0 * i));
  v.normalize();
  double sigma_sq = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const CVec w = A.adjoint() * (A * v);
    const double est = std::real(v.dot(w));
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    v = w / nw;
    if (it > 0 && std::abs(est - sigma_sq) <= 1e-2 * rel_tol * est) {
      sigma_sq = std::max(est, nw);
      break;
    }
    sigma_sq = est;
  }
  return std::sqrt(sigma_sq);
}

/// Largest singular value from the dense eigenvalues of A^* A. Preferred over
/// power iteration when the top singular values are clustered.
inline double spectral_norm(const CMat& A) {
  if (A.size() == 0) return 0.0;
  const CMat g = A.adjoint() * A;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(g), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

inline double operator_norm(const LinOp& op) { return operator_norm(op.mat); }
inline double operator_norm(const BlockOp& op) { return operator_norm(op.mat); }

}  // namespace triplex
