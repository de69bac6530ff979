#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "lra/types.hpp"

namespace lra::io {

/// Malformed input; the message carries "path:line:" where applicable.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MatrixFormat { matrix_market_array, matrix_market_coordinate, raw_f64 };

/// Reads a dense real matrix. MatrixMarket files may be "array" or
/// "coordinate" (real general, 1-based, duplicates rejected); raw_f64 is the
/// 16-byte-header binary format documented in the README.
DenseMatrix<double> read_matrix(const std::filesystem::path& path, MatrixFormat format);

/// Reads a matrix, inferring the format: raw-f64 by magic bytes, otherwise
/// MatrixMarket with the kind taken from the banner.
DenseMatrix<double> read_matrix_auto(const std::filesystem::path& path);

/// Writes a matrix. MatrixMarket values are written with 17 significant
/// digits; raw_f64 round-trips bit-exactly.
void write_matrix(const std::filesystem::path& path, const DenseMatrix<double>& m,
                  MatrixFormat format);

}  // namespace lra::io
