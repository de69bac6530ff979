#include "lra/io/matrix_io.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace lra::io {

namespace {

constexpr std::array<char, 8> kRawMagic = {'L', 'R', 'A', 'R', 'A', 'W', '6', '4'};

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& msg) {
  throw IoError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& msg) {
  throw IoError(path.string() + ": " + msg);
}

struct LineReader {
  std::ifstream in;
  std::size_t line_no = 0;
  const std::filesystem::path& path;

  explicit LineReader(const std::filesystem::path& p) : in(p), path(p) {
    if (!in) fail(p, "cannot open file");
  }

  /// Next non-comment, non-blank line.
  bool next(std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      const auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (out[first] == '%') continue;
      return true;
    }
    return false;
  }
};

DenseMatrix<double> read_matrix_market(const std::filesystem::path& path,
                                       bool* coordinate_out = nullptr) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  std::string banner;
  if (!std::getline(in, banner)) fail(path, 1, "empty file");
  std::istringstream bs(banner);
  std::string tag, object, format, field, symmetry;
  bs >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket") fail(path, 1, "missing %%MatrixMarket banner");
  if (object != "matrix") fail(path, 1, "unsupported object '" + object + "'");
  const bool coordinate = format == "coordinate";
  if (!coordinate && format != "array") fail(path, 1, "unsupported format '" + format + "'");
  if (field != "real") fail(path, 1, "unsupported field '" + field + "'");
  if (symmetry != "general") fail(path, 1, "unsupported symmetry '" + symmetry + "'");
  if (coordinate_out) *coordinate_out = coordinate;
  in.close();

  LineReader rd(path);  // the banner and comments are '%'-filtered
  std::string line;
  if (!rd.next(line)) fail(path, rd.line_no, "missing size line");
  std::istringstream sz(line);
  long long rows = -1, cols = -1, nnz = -1;
  if (!(sz >> rows >> cols)) fail(path, rd.line_no, "malformed size line");
  if (coordinate && !(sz >> nnz)) fail(path, rd.line_no, "coordinate size line needs nnz");
  if (rows < 0 || cols < 0) fail(path, rd.line_no, "negative dimensions");
  if (rows * cols > (1LL << 28)) fail(path, rd.line_no, "matrix too large");

  DenseMatrix<double> m = DenseMatrix<double>::Zero(rows, cols);
  if (coordinate) {
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(nnz));
    for (long long k = 0; k < nnz; ++k) {
      if (!rd.next(line)) fail(path, rd.line_no, "expected " + std::to_string(nnz) + " entries");
      std::istringstream es(line);
      long long i = 0, j = 0;
      double v = 0;
      if (!(es >> i >> j >> v)) fail(path, rd.line_no, "malformed coordinate entry");
      if (i < 1 || i > rows || j < 1 || j > cols)
        fail(path, rd.line_no, "index out of range");
      const std::uint64_t key =
          (static_cast<std::uint64_t>(i - 1) << 32) | static_cast<std::uint64_t>(j - 1);
      if (!seen.insert(key).second) fail(path, rd.line_no, "duplicate entry");
      m(i - 1, j - 1) = v;
    }
  } else {
    // Column-major values, whitespace separated across lines.
    long long count = 0;
    const long long total = rows * cols;
    while (count < total) {
      if (!rd.next(line))
        fail(path, rd.line_no, "expected " + std::to_string(total) + " values, got " +
                                   std::to_string(count));
      std::istringstream vs(line);
      double v;
      while (vs >> v) {
        if (count >= total) fail(path, rd.line_no, "too many values");
        m.data()[count++] = v;
      }
      std::string rest;
      if (vs.clear(), vs >> rest) fail(path, rd.line_no, "non-numeric token '" + rest + "'");
    }
  }
  ensure_finite(m, path.string());
  return m;
}

DenseMatrix<double> read_raw_f64(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file");
  std::array<char, 8> magic{};
  std::uint32_t rows = 0, cols = 0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || magic != kRawMagic) fail(path, "not a raw-f64 matrix file");
  if (static_cast<std::uint64_t>(rows) * cols > (1ULL << 28)) fail(path, "matrix too large");
  DenseMatrix<double> m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * rows * cols));
  if (!in) fail(path, "truncated raw-f64 payload");
  char extra;
  if (in.read(&extra, 1)) fail(path, "trailing bytes after raw-f64 payload");
  ensure_finite(m, path.string());
  return m;
}

void write_matrix_market(const std::filesystem::path& path, const DenseMatrix<double>& m,
                         bool coordinate) {
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  out.precision(17);
  if (coordinate) {
    const Eigen::Index nnz = (m.array() != 0.0).count();
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << nnz << '\n';
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m(i, j) != 0.0) out << (i + 1) << ' ' << (j + 1) << ' ' << m(i, j) << '\n';
  } else {
    out << "%%MatrixMarket matrix array real general\n";
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index k = 0; k < m.size(); ++k) out << m.data()[k] << '\n';
  }
  if (!out) fail(path, "write failed");
}

void write_raw_f64(const std::filesystem::path& path, const DenseMatrix<double>& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open file for writing");
  const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
  const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
  out.write(kRawMagic.data(), kRawMagic.size());
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!out) fail(path, "write failed");
}

}  // namespace

DenseMatrix<double> read_matrix(const std::filesystem::path& path, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::raw_f64:
      return read_raw_f64(path);
    case MatrixFormat::matrix_market_array:
    case MatrixFormat::matrix_market_coordinate: {
      bool coordinate = false;
      DenseMatrix<double> m = read_matrix_market(path, &coordinate);
      if (coordinate != (format == MatrixFormat::matrix_market_coordinate))
        fail(path, 1, coordinate ? "expected array format, found coordinate"
                                 : "expected coordinate format, found array");
      return m;
    }
  }
  throw IoError("read_matrix: unknown format");
}

DenseMatrix<double> read_matrix_auto(const std::filesystem::path& path) {
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) fail(path, "cannot open file");
    std::array<char, 8> magic{};
    probe.read(magic.data(), magic.size());
    if (probe && magic == kRawMagic) return read_raw_f64(path);
  }
  return read_matrix_market(path);
}

void write_matrix(const std::filesystem::path& path, const DenseMatrix<double>& m,
                  MatrixFormat format) {
  switch (format) {
    case MatrixFormat::raw_f64:
      write_raw_f64(path, m);
      return;
    case MatrixFormat::matrix_market_array:
      write_matrix_market(path, m, false);
      return;
    case MatrixFormat::matrix_market_coordinate:
      write_matrix_market(path, m, true);
      return;
  }
  throw IoError("write_matrix: unknown format");
}

}  // namespace lra::io
