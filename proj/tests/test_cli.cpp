// End-to-end tests of the command line tool, driven through the real binary
// (path in LRA_CLI). Covers the functional contracts of each command; replay
// determinism lives in the acceptance suite.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lra/io/image_io.hpp"
#include "lra/io/matrix_io.hpp"
#include "lra/manifest.hpp"
#include "lra/rng.hpp"

namespace fs = std::filesystem;
using lra::Index;
using lra::RngStream;
using Mat = lra::DenseMatrix<double>;
using Vec = lra::DenseVector<double>;

namespace {

struct Cli {
  fs::path bin;
  fs::path dir;

  Cli() {
    const char* env = std::getenv("LRA_CLI");
    REQUIRE_MESSAGE(env != nullptr, "LRA_CLI must point at the lra binary");
    bin = env;
    dir = fs::temp_directory_path() /
          ("lra_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter()++));
    fs::create_directories(dir);
  }
  ~Cli() { fs::remove_all(dir); }

  int run(const std::string& args) const {
    const std::string cmd = bin.string() + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static int& counter() {
    static int c = 0;
    return c;
  }
};

double manifest_metric(const fs::path& manifest, const std::string& key) {
  return std::stod(lra::RunManifest::read(manifest).get(key));
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(bool(in));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace

TEST_CASE("compress-image meets the threshold-scaled error bound") {
  Cli cli;
  RngStream rng(701);
  // A textured image whose spectrum decays slowly enough for a rank > 1.
  Mat plane(64, 80);
  for (Index i = 0; i < plane.rows(); ++i)
    for (Index j = 0; j < plane.cols(); ++j)
      plane(i, j) = 128.0 + 50.0 * std::sin(double(i) / 5.0 + double(j) / 9.0) +
                    30.0 * std::cos(double(i) * double(j) / 97.0);
  lra::io::write_pgm(cli.dir / "tex.pgm", plane);
  const double frac = 0.05;
  REQUIRE(cli.run("compress-image --input " + (cli.dir / "tex.pgm").string() +
                  " --theta-fraction 0.05 -q 2 --out-dir " + (cli.dir / "c").string()) == 0);
  const double relerror = manifest_metric(cli.dir / "c" / "manifest.txt", "metric.relerror");
  CHECK(relerror <= frac * 1.25);
  CHECK(manifest_metric(cli.dir / "c" / "manifest.txt", "metric.crank") >= 1);
}

TEST_CASE("compress-image on a constant image is rank one") {
  Cli cli;
  lra::io::write_pgm(cli.dir / "flat.pgm", Mat::Constant(32, 40, 137.0));
  REQUIRE(cli.run("compress-image --input " + (cli.dir / "flat.pgm").string() +
                  " --theta-fraction 0.05 --out-dir " + (cli.dir / "c").string()) == 0);
  CHECK(manifest_metric(cli.dir / "c" / "manifest.txt", "metric.crank") == 1);
  CHECK(manifest_metric(cli.dir / "c" / "manifest.txt", "metric.relerror") <= 1e-10);
  // The decoded reconstruction is the constant image again.
  const auto img = lra::io::read_pnm(cli.dir / "c" / "reconstructed.pgm");
  CHECK((img.planes[0].array() == 137.0).all());
}

TEST_CASE("lsi full-rank ranking matches the brute-force cosine oracle") {
  Cli cli;
  RngStream rng(702);
  const Mat a = lra::gaussian(rng, 50, 30).cwiseAbs();
  lra::io::write_matrix(cli.dir / "td.mtx", a, lra::io::MatrixFormat::matrix_market_array);
  REQUIRE(cli.run("lsi --matrix " + (cli.dir / "td.mtx").string() +
                  " --query 1,5,9 --rank 30 --out-dir " + (cli.dir / "s").string()) == 0);
  const auto rows = read_csv(cli.dir / "s" / "lsi_scores.csv");
  REQUIRE(rows.size() == 31);  // header + 30 documents

  Vec q = Vec::Zero(50);
  q(0) = q(4) = q(8) = 1.0;
  std::vector<std::pair<double, Index>> oracle(30);
  for (Index j = 0; j < 30; ++j)
    oracle[j] = {q.dot(a.col(j)) / (q.norm() * a.col(j).norm()), j};
  std::stable_sort(oracle.begin(), oracle.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (Index i = 0; i < 30; ++i) {
    CHECK(std::stoll(rows[i + 1][1]) == oracle[i].second + 1);
    CHECK(std::stod(rows[i + 1][2]) == doctest::Approx(oracle[i].first).epsilon(1e-10));
  }
}

TEST_CASE("lsi ranks an exactly matching document first") {
  Cli cli;
  // Orthogonal columns: disjoint binary term supports.
  Mat a = Mat::Zero(12, 4);
  a.block(0, 0, 3, 1).setOnes();
  a.block(3, 1, 3, 1).setOnes();
  a.block(6, 2, 3, 1).setOnes();
  a.block(9, 3, 3, 1).setOnes();
  lra::io::write_matrix(cli.dir / "td.mtx", a, lra::io::MatrixFormat::matrix_market_array);
  // The query is exactly document 3's terms.
  REQUIRE(cli.run("lsi --matrix " + (cli.dir / "td.mtx").string() +
                  " --query 7,8,9 --rank 4 --out-dir " + (cli.dir / "s").string()) == 0);
  const auto man = lra::RunManifest::read(cli.dir / "s" / "manifest.txt");
  CHECK(man.get("metric.top_document") == "3");
  CHECK(std::stod(man.get("metric.top_score")) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lsi scores zero-norm documents as zero") {
  Cli cli;
  Mat a = Mat::Zero(6, 3);
  a(0, 0) = 1.0;
  a(1, 2) = 2.0;  // document 2 is all zeros
  lra::io::write_matrix(cli.dir / "td.mtx", a, lra::io::MatrixFormat::matrix_market_array);
  REQUIRE(cli.run("lsi --matrix " + (cli.dir / "td.mtx").string() +
                  " --query 1 --rank 2 --out-dir " + (cli.dir / "s").string()) == 0);
  const auto rows = read_csv(cli.dir / "s" / "lsi_scores.csv");
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][1] == "2") CHECK(std::stod(rows[i][2]) == 0.0);
}

TEST_CASE("lsi with an unreachable threshold exits with code 3") {
  Cli cli;
  RngStream rng(703);
  const Mat a = lra::gaussian(rng, 20, 12);
  lra::io::write_matrix(cli.dir / "td.mtx", a, lra::io::MatrixFormat::matrix_market_array);
  CHECK(cli.run("lsi --matrix " + (cli.dir / "td.mtx").string() +
                " --query 1 --theta 1e-14 --out-dir " + (cli.dir / "s").string()) == 3);
}

TEST_CASE("rpca separates a static background from a moving square") {
  Cli cli;
  const Index h = 24, w = 32, frames = 10;
  Mat background(h, w);
  for (Index i = 0; i < h; ++i)
    for (Index j = 0; j < w; ++j)
      background(i, j) = std::round(100.0 + 60.0 * std::sin(double(i) / 5.0) *
                                                std::cos(double(j) / 7.0));
  fs::create_directories(cli.dir / "frames");
  std::vector<std::pair<Index, Index>> square_cols;
  for (Index f = 0; f < frames; ++f) {
    Mat frame = background;
    const Index x0 = 2 + 2 * f;
    frame.block(8, x0, 6, 5).setConstant(235.0);
    square_cols.emplace_back(x0, x0 + 5);
    char name[32];
    std::snprintf(name, sizeof(name), "f_%03d.pgm", int(f));
    lra::io::write_pgm(cli.dir / "frames" / name, frame);
  }
  // Sparse weight 1/sqrt(max(m, n)) for the 768x10 frame matrix.
  REQUIRE(cli.run("rpca --frames " + (cli.dir / "frames").string() +
                  " --backend approximate --lambda 0.0361 -q 1 -b 4 --out-dir " +
                  (cli.dir / "r").string()) == 0);
  const auto man = lra::RunManifest::read(cli.dir / "r" / "manifest.txt");
  CHECK(man.get("metric.converged") == "1");
  CHECK(std::stod(man.get("metric.final_relerror")) < 9e-5);

  Index good = 0, total = 0, support_hits = 0, support_total = 0;
  for (Index f = 0; f < frames; ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "background_%04d.pgm", int(f));
    const Mat bg = lra::io::read_pnm(cli.dir / "r" / name).planes[0];
    for (Index i = 0; i < h; ++i)
      for (Index j = 0; j < w; ++j) {
        ++total;
        if (std::abs(bg(i, j) - background(i, j)) <= 2.0) ++good;
      }
    std::snprintf(name, sizeof(name), "foreground_%04d.pgm", int(f));
    const Mat fg = lra::io::read_pnm(cli.dir / "r" / name).planes[0];
    for (Index i = 8; i < 14; ++i)
      for (Index j = square_cols[f].first; j < square_cols[f].second; ++j) {
        ++support_total;
        if (fg(i, j) > 10.0) ++support_hits;
      }
  }
  CHECK(good >= (99 * total) / 100);
  CHECK(support_hits >= (90 * support_total) / 100);
}

TEST_CASE("rpca on a single frame returns it as the background") {
  Cli cli;
  RngStream rng(704);
  Mat frame = (128.0 + 40.0 * lra::gaussian(rng, 16, 20).array()).cwiseMax(0).cwiseMin(255);
  frame = frame.array().round();
  fs::create_directories(cli.dir / "one");
  lra::io::write_pgm(cli.dir / "one" / "f.pgm", frame);
  // For a single column the nuclear and l1 costs coincide at the default
  // weight, so the split is only pinned down with a larger sparse weight.
  REQUIRE(cli.run("rpca --frames " + (cli.dir / "one").string() +
                  " --lambda 1.0 --out-dir " + (cli.dir / "r").string()) == 0);
  const Mat bg = lra::io::read_pnm(cli.dir / "r" / "background_0000.pgm").planes[0];
  const Mat fg = lra::io::read_pnm(cli.dir / "r" / "foreground_0000.pgm").planes[0];
  CHECK((bg - frame).cwiseAbs().maxCoeff() <= 1.0);
  CHECK(fg.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("rpca rejects mixed frame sizes") {
  Cli cli;
  fs::create_directories(cli.dir / "bad");
  lra::io::write_pgm(cli.dir / "bad" / "a.pgm", Mat::Constant(8, 8, 10.0));
  lra::io::write_pgm(cli.dir / "bad" / "b.pgm", Mat::Constant(8, 9, 10.0));
  CHECK(cli.run("rpca --frames " + (cli.dir / "bad").string() + " --out-dir " +
                (cli.dir / "r").string()) == 2);
}

TEST_CASE("rpca reports non-convergence with exit code 4") {
  Cli cli;
  RngStream rng(705);
  fs::create_directories(cli.dir / "fr");
  for (int f = 0; f < 4; ++f) {
    const Mat frame =
        (128.0 + 40.0 * lra::gaussian(rng, 12, 12).array()).cwiseMax(0).cwiseMin(255);
    char name[16];
    std::snprintf(name, sizeof(name), "f%d.pgm", f);
    lra::io::write_pgm(cli.dir / "fr" / name, frame);
  }
  CHECK(cli.run("rpca --frames " + (cli.dir / "fr").string() +
                " --max-iters 2 --out-dir " + (cli.dir / "r").string()) == 4);
  // Outputs and the trace are still written for inspection.
  CHECK(fs::exists(cli.dir / "r" / "trace.csv"));
  CHECK(fs::exists(cli.dir / "r" / "background_0000.pgm"));
}

TEST_CASE("unreadable image input exits with code 2") {
  Cli cli;
  CHECK(cli.run("compress-image --input " + (cli.dir / "missing.pgm").string() +
                " --out-dir " + (cli.dir / "c").string()) == 2);
  std::ofstream(cli.dir / "bad.pgm") << "P2\n2 2\n255\n0 0 0 0\n";  // ASCII, unsupported
  CHECK(cli.run("compress-image --input " + (cli.dir / "bad.pgm").string() + " --out-dir " +
                (cli.dir / "c").string()) == 2);
}
