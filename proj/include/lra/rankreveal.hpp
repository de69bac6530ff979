#pragma once

#include <algorithm>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lra/core.hpp"
#include "lra/rng.hpp"

namespace lra {

/// Knobs shared by the blocked randomized factorizations.
struct RankRevealConfig {
  Index block_size = 10;  // columns sampled per block (b)
  double threshold = 0;   // spectral threshold theta, must be > 0
  int power_iters = 0;    // power scheme parameter (q)
  Index max_rank = -1;    // cap on the computed rank; -1 means min(m, n)
  bool stabilized = true; // reorth2 each block against the accumulated basis
  bool ei_stop = false;   // blocked_qb only: residual tracked by error indicator
};

template <typename Scalar>
struct RsvdResult {
  DenseMatrix<Scalar> u;  // m-by-k
  DenseVector<Scalar> s;  // k estimated singular values
  DenseMatrix<Scalar> v;  // n-by-k
};

/// Basic randomized SVD with oversampling: sketch A with k+p Gaussian
/// columns, orthonormalize, and take the truncated SVD of the projection.
template <typename Scalar = double>
RsvdResult<Scalar> randomized_svd(const DenseMatrix<Scalar>& a, Index k, Index p, RngStream& rng) {
  if (k < 1) throw std::invalid_argument("randomized_svd: k must be >= 1");
  if (p < 0) throw std::invalid_argument("randomized_svd: p must be >= 0");
  if (k + p > std::min(a.rows(), a.cols()))
    throw std::invalid_argument("randomized_svd: k + p exceeds min(m, n)");
  const DenseMatrix<Scalar> omega = gaussian<Scalar>(rng, a.cols(), k + p);
  const DenseMatrix<Scalar> q = orth((a * omega).eval());
  const SvdResult<Scalar> svd = svd_small((q.transpose() * a).eval());
  RsvdResult<Scalar> r;
  r.u = q * svd.u.leftCols(k);
  r.s = svd.s.head(k);
  r.v = svd.v.leftCols(k);
  return r;
}

template <typename Scalar>
struct QbResult {
  DenseMatrix<Scalar> q;  // m-by-r, column-orthonormal
  DenseMatrix<Scalar> b;  // r-by-n, so A ~ Q B
  bool threshold_reached = true;
  Scalar residual_fro = 0;  // tracked (ei_stop) or exact Frobenius residual
};

/// Blocked randomized QB factorization with ||A - QB||_F < theta. The
/// default variant updates the residual matrix explicitly; with cfg.ei_stop
/// the squared Frobenius residual is tracked as E <- E - ||B_i||_F^2 and the
/// residual matrix is never formed.
template <typename Scalar = double>
QbResult<Scalar> blocked_qb(const DenseMatrix<Scalar>& a, const RankRevealConfig& cfg,
                            RngStream& rng) {
  if (!(cfg.threshold > 0)) throw std::invalid_argument("blocked_qb: threshold must be > 0");
  if (cfg.block_size < 1) throw std::invalid_argument("blocked_qb: block_size must be >= 1");
  const Index m = a.rows();
  const Index n = a.cols();
  const Index cap = cfg.max_rank < 0 ? std::min(m, n) : std::min(cfg.max_rank, std::min(m, n));

  QbResult<Scalar> out;
  out.q.resize(m, 0);
  out.b.resize(0, n);

  if (cfg.ei_stop) {
    double e = static_cast<double>(a.squaredNorm());
    auto tracked = [&] { return Scalar(std::sqrt(std::max(e, 0.0))); };
    while (true) {
      if (tracked() < cfg.threshold) {
        out.threshold_reached = true;
        break;
      }
      if (out.q.cols() >= cap) {
        out.threshold_reached = false;
        break;
      }
      const Index bi = std::min<Index>(cfg.block_size, cap - out.q.cols());
      const DenseMatrix<Scalar> omega = gaussian<Scalar>(rng, n, bi);
      DenseMatrix<Scalar> yi = a * omega;
      if (out.q.cols() > 0) yi.noalias() -= out.q * (out.b * omega);
      DenseMatrix<Scalar> qi = orth(yi);
      if (out.q.cols() > 0) qi = orth((qi - out.q * (out.q.transpose() * qi)).eval());
      const DenseMatrix<Scalar> bi_rows = qi.transpose() * a;
      e -= static_cast<double>(bi_rows.squaredNorm());
      const Index r = out.q.cols();
      out.q.conservativeResize(Eigen::NoChange, r + bi);
      out.q.rightCols(bi) = qi;
      out.b.conservativeResize(r + bi, Eigen::NoChange);
      out.b.bottomRows(bi) = bi_rows;
    }
    out.residual_fro = tracked();
  } else {
    DenseMatrix<Scalar> ares = a;
    while (true) {
      if (ares.norm() < cfg.threshold) {
        out.threshold_reached = true;
        break;
      }
      if (out.q.cols() >= cap) {
        out.threshold_reached = false;
        break;
      }
      const Index bi = std::min<Index>(cfg.block_size, cap - out.q.cols());
      const DenseMatrix<Scalar> omega = gaussian<Scalar>(rng, n, bi);
      DenseMatrix<Scalar> qi = orth((ares * omega).eval());
      if (out.q.cols() > 0) qi = orth((qi - out.q * (out.q.transpose() * qi)).eval());
      const DenseMatrix<Scalar> bi_rows = qi.transpose() * ares;
      ares.noalias() -= qi * bi_rows;
      const Index r = out.q.cols();
      out.q.conservativeResize(Eigen::NoChange, r + bi);
      out.q.rightCols(bi) = qi;
      out.b.conservativeResize(r + bi, Eigen::NoChange);
      out.b.bottomRows(bi) = bi_rows;
    }
    out.residual_fro = ares.norm();
  }
  return out;
}

/// One processed block of a rank_reveal run, for diagnostics and bound
/// evaluation. `basis` holds the retained columns exactly as appended and
/// `ritz` their singular value estimates in block order.
template <typename Scalar>
struct BlockRecord {
  DenseMatrix<Scalar> omega;
  DenseMatrix<Scalar> basis;
  DenseVector<Scalar> ritz;
  bool truncated = false;
};

template <typename Scalar>
using BlockTrace = std::vector<BlockRecord<Scalar>>;

/// Result of a threshold rank-revealing run.
template <typename Scalar>
struct ApproxResult {
  DenseMatrix<Scalar> basis;           // Q, column-orthonormal m-by-r
  Index rank = 0;                      // r
  DenseVector<Scalar> sing_vals;       // estimates above theta, non-increasing
  std::vector<Index> block_sizes;      // retained columns per block
  std::optional<Scalar> residual_fro;  // ||A - QQ^T A||_F, on request
  bool threshold_reached = true;       // false if the rank cap was hit first
};

/// Blocked randomized rank-revealing approximation within a spectral
/// threshold. Per block: sample Y0 = orth(A*Omega), run q implicit power
/// rounds deflated against the accumulated basis Q, orthogonalize the block
/// against Q (once, or twice when cfg.stabilized), then rotate it with the
/// Ritz vectors of Qhat^T A A^T Qhat. The first Ritz value below theta
/// truncates the block and stops; otherwise the block is appended and the
/// deflation continues. The Ritz step is evaluated through the SVD of
/// A^T Qhat, which is the same eigenproblem but keeps small Ritz values at
/// full relative accuracy.
template <typename Scalar = double>
ApproxResult<Scalar> rank_reveal(const DenseMatrix<Scalar>& a, const RankRevealConfig& cfg,
                                 RngStream& rng, BlockTrace<Scalar>* trace = nullptr) {
  if (!(cfg.threshold > 0)) throw std::invalid_argument("rank_reveal: threshold must be > 0");
  if (cfg.block_size < 1) throw std::invalid_argument("rank_reveal: block_size must be >= 1");
  if (cfg.power_iters < 0) throw std::invalid_argument("rank_reveal: power_iters must be >= 0");
  using Mat = DenseMatrix<Scalar>;
  const Index m = a.rows();
  const Index n = a.cols();
  const Index cap = cfg.max_rank < 0 ? std::min(m, n) : std::min(cfg.max_rank, std::min(m, n));
  const Scalar theta = static_cast<Scalar>(cfg.threshold);

  ApproxResult<Scalar> out;
  out.basis.resize(m, 0);
  std::vector<Scalar> svals;
  bool reached = false;

  while (out.basis.cols() < cap) {
    const Index bi = std::min<Index>(cfg.block_size, cap - out.basis.cols());
    const Mat omega = gaussian<Scalar>(rng, n, bi);
    Mat y = orth((a * omega).eval());
    for (int j = 0; j < cfg.power_iters; ++j) {
      if (out.basis.cols() > 0) y -= out.basis * (out.basis.transpose() * y);
      const Mat z = orth((a.transpose() * y).eval());
      y = orth((a * z).eval());
    }
    Mat qhat;
    if (cfg.stabilized) {
      qhat = reorth2(y, out.basis);
    } else if (out.basis.cols() > 0) {
      qhat = orth((y - out.basis * (out.basis.transpose() * y)).eval());
    } else {
      qhat = orth(y);
    }

    const SvdResult<Scalar> ritz = svd_small((a.transpose() * qhat).eval());
    Index keep = bi;
    for (Index t = 0; t < bi; ++t) {
      if (ritz.s(t) < theta) {
        keep = t;
        break;
      }
    }
    const bool last = keep < bi;

    Mat appended(m, 0);
    if (keep > 0) {
      const Mat block = qhat * ritz.v.leftCols(keep);
      appended = out.basis.cols() > 0
                     ? orth((block - out.basis * (out.basis.transpose() * block)).eval())
                     : orth(block);
      const Index r = out.basis.cols();
      out.basis.conservativeResize(Eigen::NoChange, r + keep);
      out.basis.rightCols(keep) = appended;
      out.block_sizes.push_back(keep);
      for (Index t = 0; t < keep; ++t) svals.push_back(ritz.s(t));
    }
    if (trace) trace->push_back({omega, appended, ritz.s.head(keep), last});
    if (last) {
      reached = true;
      break;
    }
  }

  out.threshold_reached = reached;
  out.rank = out.basis.cols();
  std::sort(svals.begin(), svals.end(), std::greater<Scalar>());
  out.sing_vals = Eigen::Map<const DenseVector<Scalar>>(svals.data(), svals.size());
  return out;
}

/// ||A - Q Q^T A||_F.
template <typename Scalar>
Scalar frobenius_residual(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& q) {
  if (q.cols() == 0) return a.norm();
  return (a - q * (q.transpose() * a)).norm();
}

/// Randomized high-probability upper estimate of ||(I - QQ^T)A||_2 from r
/// fresh Gaussian probes: 10 sqrt(2/pi) max_i ||(I - QQ^T) A w_i||_2.
template <typename Scalar = double>
Scalar residual_norm_estimate(const DenseMatrix<Scalar>& a, const DenseMatrix<Scalar>& q, Index r,
                              RngStream& rng) {
  if (r < 1) throw std::invalid_argument("residual_norm_estimate: need r >= 1");
  Scalar worst = 0;
  for (Index i = 0; i < r; ++i) {
    const DenseMatrix<Scalar> w = gaussian<Scalar>(rng, a.cols(), 1);
    DenseVector<Scalar> y = a * w;
    if (q.cols() > 0) y -= q * (q.transpose() * y);
    worst = std::max<Scalar>(worst, y.norm());
  }
  return Scalar(10) * std::sqrt(Scalar(2) / Scalar(std::numbers::pi)) * worst;
}

}  // namespace lra
