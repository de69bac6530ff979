#pragma once

#include <filesystem>
#include <vector>

#include "lra/io/matrix_io.hpp"
#include "lra/types.hpp"

namespace lra::io {

/// Decoded PNM image; planes hold pixel values in [0, 255] as doubles,
/// one matrix per channel (1 for PGM, 3 for PPM in R, G, B order).
/// Matrix rows are image rows.
struct Image {
  std::vector<DenseMatrix<double>> planes;

  bool color() const { return planes.size() == 3; }
  Index height() const { return planes.empty() ? 0 : planes[0].rows(); }
  Index width() const { return planes.empty() ? 0 : planes[0].cols(); }
};

/// Reads a binary PGM (P5) or PPM (P6) file with maxval 255.
Image read_pnm(const std::filesystem::path& path);

/// Writes a single plane as binary PGM (P5). Values are clamped to [0, 255]
/// and rounded half-to-even.
void write_pgm(const std::filesystem::path& path, const DenseMatrix<double>& plane);

/// Writes three planes as binary PPM (P6), same quantization as write_pgm.
void write_ppm(const std::filesystem::path& path, const DenseMatrix<double>& r,
               const DenseMatrix<double>& g, const DenseMatrix<double>& b);

/// Stacks an image into one matrix: gray stays m-by-n, color becomes
/// 3m-by-n with the R, G, B channel matrices stacked vertically.
DenseMatrix<double> stack_planes(const Image& img);

/// Splits a stacked matrix back into an image with the given channel count.
Image unstack_planes(const DenseMatrix<double>& stacked, bool color);

}  // namespace lra::io
