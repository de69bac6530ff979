#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "lra/core.hpp"
#include "lra/rng.hpp"

namespace lra {

/// Recipe for a 2n-by-n test matrix whose spectrum runs through three
/// geometric segments with pinned endpoints:
///   sigma_1 .. sigma_{k1}, sigma_{k1+1} .. sigma_{k2}, sigma_{k2+1} .. sigma_n.
struct SyntheticSpec {
  Index n = 400;
  Index k1 = 10;
  Index k2 = 20;
  double sigma_first = 1.0;
  double sigma_k1 = 1e-4;
  double sigma_k1p1 = 1e-6;
  double sigma_k2 = 1e-8;
  double sigma_k2p1 = 1e-10;
  double sigma_last = 1e-15;
  std::uint64_t seed = 0;
};

inline SyntheticSpec type_i_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.n = 400;
  s.k1 = 10;
  s.k2 = 20;
  s.seed = seed;
  return s;
}

inline SyntheticSpec type_ii_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.n = 800;
  s.k1 = 5;
  s.k2 = 20;
  s.seed = seed;
  return s;
}

template <typename Scalar>
struct SyntheticMatrix {
  DenseMatrix<Scalar> a;      // m-by-n realized matrix
  DenseMatrix<Scalar> u;      // ground-truth left factor, m-by-n
  DenseMatrix<Scalar> v;      // ground-truth right factor, n-by-n
  DenseVector<Scalar> sigma;  // non-increasing
};

namespace detail {

/// Geometric interpolation over `count` slots with both endpoints assigned
/// exactly; only the interior is interpolated in log space.
inline void fill_geometric(double* out, Index count, double first, double last) {
  if (count <= 0) return;
  if (count == 1) {
    out[0] = last;
    return;
  }
  out[0] = first;
  out[count - 1] = last;
  const double lf = std::log(first);
  const double ll = std::log(last);
  for (Index i = 1; i + 1 < count; ++i)
    out[i] = std::exp(lf + (ll - lf) * static_cast<double>(i) / static_cast<double>(count - 1));
}

}  // namespace detail

/// Column-orthonormal matrix drawn from the rotation-invariant ensemble:
/// orth of a Gaussian sample.
template <typename Scalar = double>
DenseMatrix<Scalar> random_orthonormal(RngStream& rng, Index rows, Index cols) {
  if (rows < cols) throw std::invalid_argument("random_orthonormal: need rows >= cols");
  return orth(gaussian<Scalar>(rng, rows, cols));
}

/// Realizes A = U diag(sigma) V^T for the given spec, keeping the factors.
template <typename Scalar = double>
SyntheticMatrix<Scalar> make_synthetic(const SyntheticSpec& spec) {
  if (!(spec.k1 >= 1 && spec.k1 < spec.k2 && spec.k2 < spec.n))
    throw std::invalid_argument("make_synthetic: need 1 <= k1 < k2 < n");
  const Index n = spec.n;
  const Index m = 2 * n;

  DenseVector<double> sigma(n);
  detail::fill_geometric(sigma.data(), spec.k1, spec.sigma_first, spec.sigma_k1);
  detail::fill_geometric(sigma.data() + spec.k1, spec.k2 - spec.k1, spec.sigma_k1p1, spec.sigma_k2);
  detail::fill_geometric(sigma.data() + spec.k2, n - spec.k2, spec.sigma_k2p1, spec.sigma_last);

  RngStream rng(spec.seed);
  SyntheticMatrix<Scalar> out;
  out.u = random_orthonormal<Scalar>(rng, m, n);
  out.v = random_orthonormal<Scalar>(rng, n, n);
  out.sigma = sigma.template cast<Scalar>();
  out.a = out.u * out.sigma.asDiagonal() * out.v.transpose();
  return out;
}

/// Matrix with a controlled gap at index k: values fall geometrically from 1
/// to sigma_k over the first k slots, then from sigma_k1 down six decades
/// over the tail. sigma_k1 = 0 gives an exactly rank-k matrix.
template <typename Scalar = double>
SyntheticMatrix<Scalar> make_gap_matrix(RngStream& rng, Index rows, Index cols, Index k,
                                        double sigma_k, double sigma_k1) {
  if (rows < cols) throw std::invalid_argument("make_gap_matrix: need rows >= cols");
  if (!(k >= 1 && k <= cols)) throw std::invalid_argument("make_gap_matrix: need 1 <= k <= cols");
  if (!(sigma_k > sigma_k1 && sigma_k1 >= 0))
    throw std::invalid_argument("make_gap_matrix: need sigma_k > sigma_k1 >= 0");

  DenseVector<double> sigma = DenseVector<double>::Zero(cols);
  detail::fill_geometric(sigma.data(), k, 1.0, sigma_k);
  if (sigma_k1 > 0)
    detail::fill_geometric(sigma.data() + k, cols - k, sigma_k1, sigma_k1 * 1e-6);

  SyntheticMatrix<Scalar> out;
  out.u = random_orthonormal<Scalar>(rng, rows, cols);
  out.v = random_orthonormal<Scalar>(rng, cols, cols);
  out.sigma = sigma.template cast<Scalar>();
  out.a = out.u * out.sigma.asDiagonal() * out.v.transpose();
  return out;
}

}  // namespace lra
