#include "lra/io/image_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <vector>

namespace lra::io {

namespace {

constexpr Index kMaxPixels = 1 << 26;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg) {
  throw IoError(path.string() + ": " + msg);
}

/// Next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) continue;
    tok.push_back(static_cast<char>(c));
    while ((c = in.get()) != EOF && !std::isspace(c) && c != '#') tok.push_back(static_cast<char>(c));
    if (c == '#') in.unget();
    return tok;
  }
  return tok;
}

long parse_dim(const std::filesystem::path& path, const std::string& tok, const char* what) {
  if (tok.empty()) fail(path, std::string("missing ") + what);
  for (char ch : tok)
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      fail(path, std::string("malformed ") + what + " '" + tok + "'");
  return std::stol(tok);
}

unsigned char quantize(double x) {
  const double clamped = std::min(255.0, std::max(0.0, x));
  return static_cast<unsigned char>(std::nearbyint(clamped));  // half-to-even
}

}  // namespace

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  const std::string magic = next_token(in);
  std::size_t channels = 0;
  if (magic == "P5")
    channels = 1;
  else if (magic == "P6")
    channels = 3;
  else
    fail(path, "unsupported format '" + magic + "' (need binary P5 or P6)");

  const long width = parse_dim(path, next_token(in), "width");
  const long height = parse_dim(path, next_token(in), "height");
  const long maxval = parse_dim(path, next_token(in), "maxval");
  if (width < 1 || height < 1) fail(path, "empty image");
  if (static_cast<Index>(width) * height > kMaxPixels) fail(path, "image too large");
  if (maxval != 255) fail(path, "unsupported maxval " + std::to_string(maxval) + " (need 255)");
  // next_token consumed the single whitespace byte separating the header
  // from the raster, so the stream now sits on pixel data.

  std::vector<unsigned char> raster(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (!in) fail(path, "truncated pixel data");

  Image img;
  img.planes.assign(channels, DenseMatrix<double>(height, width));
  std::size_t pos = 0;
  for (long i = 0; i < height; ++i)
    for (long j = 0; j < width; ++j)
      for (std::size_t c = 0; c < channels; ++c) img.planes[c](i, j) = raster[pos++];
  return img;
}

void write_pgm(const std::filesystem::path& path, const DenseMatrix<double>& plane) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open file for writing");
  out << "P5\n" << plane.cols() << ' ' << plane.rows() << "\n255\n";
  std::vector<unsigned char> raster(static_cast<std::size_t>(plane.size()));
  std::size_t pos = 0;
  for (Index i = 0; i < plane.rows(); ++i)
    for (Index j = 0; j < plane.cols(); ++j) raster[pos++] = quantize(plane(i, j));
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) fail(path, "write failed");
}

void write_ppm(const std::filesystem::path& path, const DenseMatrix<double>& r,
               const DenseMatrix<double>& g, const DenseMatrix<double>& b) {
  if (r.rows() != g.rows() || r.rows() != b.rows() || r.cols() != g.cols() ||
      r.cols() != b.cols())
    fail(path, "channel dimensions differ");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open file for writing");
  out << "P6\n" << r.cols() << ' ' << r.rows() << "\n255\n";
  std::vector<unsigned char> raster(static_cast<std::size_t>(r.size()) * 3);
  std::size_t pos = 0;
  for (Index i = 0; i < r.rows(); ++i)
    for (Index j = 0; j < r.cols(); ++j) {
      raster[pos++] = quantize(r(i, j));
      raster[pos++] = quantize(g(i, j));
      raster[pos++] = quantize(b(i, j));
    }
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) fail(path, "write failed");
}

DenseMatrix<double> stack_planes(const Image& img) {
  if (img.planes.empty()) throw IoError("stack_planes: empty image");
  const Index h = img.height();
  const Index w = img.width();
  DenseMatrix<double> out(h * static_cast<Index>(img.planes.size()), w);
  for (std::size_t c = 0; c < img.planes.size(); ++c)
    out.middleRows(static_cast<Index>(c) * h, h) = img.planes[c];
  return out;
}

Image unstack_planes(const DenseMatrix<double>& stacked, bool color) {
  const Index channels = color ? 3 : 1;
  if (stacked.rows() % channels != 0)
    throw IoError("unstack_planes: row count not divisible by channel count");
  const Index h = stacked.rows() / channels;
  Image img;
  for (Index c = 0; c < channels; ++c) img.planes.push_back(stacked.middleRows(c * h, h));
  return img;
}

}  // namespace lra::io
