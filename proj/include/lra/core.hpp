#pragma once

#include <Eigen/Dense>

#include <stdexcept>

#include "lra/types.hpp"

namespace lra {

/// Economy orthonormalization of the columns of `a` (rows >= cols) by
/// Householder QR. Column signs are fixed so that diag(R) >= 0. Rank-deficient
/// input still yields a deterministic orthonormal basis: exactly zero columns
/// pick up the reflectors' canonical completion directions.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> orth(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  using Mat = DenseMatrix<Scalar>;
  if (a.rows() < a.cols()) throw std::invalid_argument("orth: need rows >= cols");
  if (a.cols() == 0) return Mat(a.rows(), 0);
  Eigen::HouseholderQR<Mat> qr(a.derived());
  Mat q = qr.householderQ() * Mat::Identity(a.rows(), a.cols());
  for (Index j = 0; j < a.cols(); ++j)
    if (qr.matrixQR()(j, j) < Scalar(0)) q.col(j) = -q.col(j);
  return q;
}

/// Twice-orthogonalized basis of Y against Q: project out Q, orthonormalize,
/// project once more. Keeps ||Q^T Z||_2 at roundoff level even when a single
/// pass would not. Q may have zero columns, in which case this is orth(Y).
template <typename Scalar>
DenseMatrix<Scalar> reorth2(const DenseMatrix<Scalar>& y, const DenseMatrix<Scalar>& q) {
  if (q.cols() == 0) return orth(y);
  DenseMatrix<Scalar> w = y - q * (q.transpose() * y);
  w = orth(w);
  w -= q * (q.transpose() * w);
  return w;
}

template <typename Scalar>
struct EigResult {
  DenseMatrix<Scalar> vectors;  // orthonormal columns
  DenseVector<Scalar> values;   // non-increasing
};

/// Symmetric eigendecomposition with eigenvalues in descending order.
/// The input is symmetrized as (M + M^T)/2 before factorization.
template <typename Derived>
EigResult<typename Derived::Scalar> eig_desc(const Eigen::MatrixBase<Derived>& mexpr) {
  using Scalar = typename Derived::Scalar;
  const DenseMatrix<Scalar> m = mexpr;
  if (m.rows() != m.cols()) throw std::invalid_argument("eig_desc: matrix must be square");
  EigResult<Scalar> r;
  if (m.rows() == 0) {
    r.vectors.resize(0, 0);
    r.values.resize(0);
    return r;
  }
  DenseMatrix<Scalar> sym = Scalar(0.5) * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_desc: eigensolver failed");
  r.values = es.eigenvalues().reverse();
  r.vectors = es.eigenvectors().rowwise().reverse();
  return r;
}

template <typename Scalar>
struct SvdResult {
  DenseMatrix<Scalar> u;
  DenseVector<Scalar> s;  // non-increasing, non-negative
  DenseMatrix<Scalar> v;
};

/// Thin SVD of a dense matrix; the oracle for every norm and spectrum
/// computation at desk scale.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd_small(const Eigen::MatrixBase<Derived>& aexpr) {
  using Scalar = typename Derived::Scalar;
  const DenseMatrix<Scalar> a = aexpr;
  SvdResult<Scalar> r;
  if (a.rows() == 0 || a.cols() == 0) {
    const Index k = std::min(a.rows(), a.cols());
    r.u.resize(a.rows(), k);
    r.s.resize(k);
    r.v.resize(a.cols(), k);
    return r;
  }
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  r.u = svd.matrixU();
  r.s = svd.singularValues();
  r.v = svd.matrixV();
  return r;
}

/// Largest singular value; zero for empty matrices.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() == 0 || a.cols() == 0) return Scalar(0);
  Eigen::BDCSVD<DenseMatrix<Scalar>> svd(a.derived());
  return svd.singularValues()(0);
}

}  // namespace lra
