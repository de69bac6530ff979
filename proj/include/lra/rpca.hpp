#pragma once

#include <cmath>
#include <vector>

#include "lra/shrink.hpp"

namespace lra {

enum class RpcaBackend { exact, approximate };

struct RpcaConfig {
  double lambda = -1;  // sparse weight; < 0 means (m n)^{-1/2}
  double mu0 = 1e-3;
  double rho = 1.1;
  int max_iters = 100;
  double tol = 9e-5;
  RpcaBackend backend = RpcaBackend::exact;
  Index block_size = 10;  // approximate backend only
  int power_iters = 0;    // approximate backend only
  // Step 2 variant that thresholds A - L_{j+1} - S_j instead of the
  // multiplier-corrected argument A - L_{j+1} + mu^{-1} Y_j.
  bool step2_subtract_prev_sparse = false;
};

template <typename Scalar>
struct RpcaState {
  DenseMatrix<Scalar> low_rank;    // L
  DenseMatrix<Scalar> sparse;      // S
  DenseMatrix<Scalar> multiplier;  // Y
  double mu = 0;
  int iter = 0;
  bool converged = false;
  std::vector<double> relerror_trace;  // ||A - L_j - S_j||_F / ||A||_F
  std::vector<double> mu_trace;
  std::vector<Index> rank_trace;  // rank of L_j after shrinkage
  std::vector<Index> nnz_trace;   // nonzeros of S_j
};

/// Inexact augmented-Lagrange-multiplier robust PCA, splitting A into a
/// low-rank L and a sparse S. Loop j (mu_j = mu0 rho^j):
///   L_{j+1} = shrink(A - S_j + mu_j^{-1} Y_j, mu_j^{-1})
///   S_{j+1} = soft_threshold(A - L_{j+1} + mu_j^{-1} Y_j, lambda mu_j^{-1})
///   Y_{j+1} = Y_j + mu_j (A - L_{j+1} - S_{j+1})
/// The shrink step is the exact SVT or the rank-revealing approximation with
/// theta = mu_j^{-1}, per cfg.backend. Stops when the feasibility residual
/// drops below cfg.tol.
template <typename Scalar = double>
RpcaState<Scalar> alm_rpca(const DenseMatrix<Scalar>& a, const RpcaConfig& cfg, RngStream& rng) {
  if (!(cfg.rho > 1)) throw std::invalid_argument("alm_rpca: rho must be > 1");
  if (!(cfg.mu0 > 0)) throw std::invalid_argument("alm_rpca: mu0 must be > 0");
  if (!(cfg.tol > 0)) throw std::invalid_argument("alm_rpca: tol must be > 0");
  if (cfg.max_iters < 1) throw std::invalid_argument("alm_rpca: max_iters must be >= 1");
  const Scalar anorm = a.norm();
  if (!(anorm > 0)) throw std::invalid_argument("alm_rpca: A must be nonzero");

  using Mat = DenseMatrix<Scalar>;
  const Index m = a.rows();
  const Index n = a.cols();
  const double lambda =
      cfg.lambda < 0 ? 1.0 / std::sqrt(double(m) * double(n)) : cfg.lambda;

  RpcaState<Scalar> st;
  st.low_rank = Mat::Zero(m, n);
  st.sparse = Mat::Zero(m, n);
  st.multiplier = Mat::Zero(m, n);

  for (int j = 0; j < cfg.max_iters; ++j) {
    const double mu = cfg.mu0 * std::pow(cfg.rho, j);
    const Scalar tau = Scalar(1.0 / mu);
    st.mu = mu;

    const Mat w = a - st.sparse + tau * st.multiplier;
    Index rank = 0;
    if (cfg.backend == RpcaBackend::exact) {
      const SvdResult<Scalar> svd = svd_small(w);
      const DenseVector<Scalar> s = (svd.s.array() - tau).max(Scalar(0)).matrix();
      rank = (s.array() > Scalar(0)).count();
      st.low_rank = svd.u.leftCols(rank) * s.head(rank).asDiagonal() *
                    svd.v.leftCols(rank).transpose();
    } else {
      RankRevealConfig rr;
      rr.block_size = cfg.block_size;
      rr.power_iters = cfg.power_iters;
      const ShrinkResult<Scalar> sr = approx_shrink(w, tau, rr, rng);
      rank = sr.q.cols();
      st.low_rank = sr.assemble();
    }

    const Scalar s_tau = Scalar(lambda) * tau;
    const Mat arg = cfg.step2_subtract_prev_sparse
                        ? (a - st.low_rank - st.sparse).eval()
                        : (a - st.low_rank + tau * st.multiplier).eval();
    st.sparse = arg.unaryExpr([s_tau](Scalar x) { return soft_threshold(x, s_tau); });

    const Mat feas = a - st.low_rank - st.sparse;
    st.multiplier += Scalar(mu) * feas;

    const double rel = double(feas.norm() / anorm);
    st.relerror_trace.push_back(rel);
    st.mu_trace.push_back(mu);
    st.rank_trace.push_back(rank);
    st.nnz_trace.push_back((st.sparse.array() != Scalar(0)).count());
    st.iter = j + 1;
    if (rel < cfg.tol) {
      st.converged = true;
      break;
    }
  }
  return st;
}

}  // namespace lra
