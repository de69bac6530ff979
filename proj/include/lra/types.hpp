#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace lra {

using Index = Eigen::Index;

/// Dense column-major matrix, the carrier type for every operand in this
/// library. Entries are expected to be finite; boundaries that ingest
/// external data enforce this with ensure_finite().
template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Derived>
void ensure_finite(const Eigen::MatrixBase<Derived>& m, const std::string& what) {
  if (!m.allFinite()) throw std::invalid_argument(what + ": non-finite entries");
}

}  // namespace lra
