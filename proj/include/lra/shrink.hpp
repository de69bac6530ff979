#pragma once

#include <cmath>

#include "lra/rankreveal.hpp"

namespace lra {

/// Soft-thresholding: sgn(x) max(|x| - tau, 0).
template <typename Scalar>
Scalar soft_threshold(Scalar x, Scalar tau) {
  const Scalar shrunk = std::abs(x) - tau;
  if (shrunk <= Scalar(0)) return Scalar(0);
  return x > Scalar(0) ? shrunk : -shrunk;
}

/// Exact singular value thresholding U S_tau(Sigma) V^T, the proximal
/// operator of tau * nuclear norm.
template <typename Scalar = double>
DenseMatrix<Scalar> svt_shrink(const DenseMatrix<Scalar>& a, Scalar tau) {
  if (!(tau >= 0)) throw std::invalid_argument("svt_shrink: tau must be >= 0");
  const SvdResult<Scalar> svd = svd_small(a);
  const DenseVector<Scalar> s = (svd.s.array() - tau).max(Scalar(0)).matrix();
  return svd.u * s.asDiagonal() * svd.v.transpose();
}

/// Factored form Q S_tau(L) P^T of an approximate SVT application.
template <typename Scalar>
struct ShrinkResult {
  DenseMatrix<Scalar> q;  // m-by-r
  DenseMatrix<Scalar> l;  // r-by-r lower-triangular, already soft-thresholded
  DenseMatrix<Scalar> p;  // n-by-r
  Scalar tau = 0;
  Index rows = 0;
  Index cols = 0;
  bool threshold_reached = true;

  DenseMatrix<Scalar> assemble() const {
    if (q.cols() == 0) return DenseMatrix<Scalar>::Zero(rows, cols);
    return q * l * p.transpose();
  }
};

/// Approximate SVT through a rank-revealing basis. Every singular direction
/// of W above tau is captured by rank_reveal with theta = tau (directions at
/// or below tau shrink to zero anyway, so omitting them is exact). The thin
/// QR of W^T Q = P L^T then gives W ~ Q L P^T with the Ritz rotation leaving
/// L nearly diagonal, and the entrywise soft-threshold of L realizes the
/// shrinkage.
template <typename Scalar = double>
ShrinkResult<Scalar> approx_shrink(const DenseMatrix<Scalar>& w, Scalar tau, RankRevealConfig cfg,
                                   RngStream& rng) {
  if (!(tau > 0)) throw std::invalid_argument("approx_shrink: tau must be > 0");
  using Mat = DenseMatrix<Scalar>;
  cfg.threshold = static_cast<double>(tau);
  cfg.stabilized = true;
  const ApproxResult<Scalar> ar = rank_reveal(w, cfg, rng);

  ShrinkResult<Scalar> out;
  out.tau = tau;
  out.rows = w.rows();
  out.cols = w.cols();
  out.threshold_reached = ar.threshold_reached;
  const Index r = ar.rank;
  if (r == 0) {
    out.q.resize(w.rows(), 0);
    out.l.resize(0, 0);
    out.p.resize(w.cols(), 0);
    return out;
  }

  const Mat wtq = w.transpose() * ar.basis;  // n-by-r
  Eigen::HouseholderQR<Mat> qr(wtq);
  Mat p = qr.householderQ() * Mat::Identity(w.cols(), r);
  Mat lt = qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
  for (Index j = 0; j < r; ++j) {
    if (lt(j, j) < Scalar(0)) {
      p.col(j) = -p.col(j);
      lt.row(j) = -lt.row(j);
    }
  }
  out.q = ar.basis;
  out.p = p;
  out.l = lt.transpose().unaryExpr([tau](Scalar x) { return soft_threshold(x, tau); }).eval();
  return out;
}

}  // namespace lra
