// lra command line front end: synthetic benchmarks, singular value
// accuracy tables, image compression, LSI scoring, and robust-PCA
// background estimation. Every command writes a manifest that `lra replay`
// can re-execute bit-for-bit in sequential mode.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lra/io/image_io.hpp"
#include "lra/io/matrix_io.hpp"
#include "lra/manifest.hpp"
#include "lra/metrics.hpp"
#include "lra/rpca.hpp"
#include "lra/shrink.hpp"
#include "lra/synth.hpp"

namespace fs = std::filesystem;
using lra::Index;
using lra::RngStream;
using Mat = lra::DenseMatrix<double>;
using Vec = lra::DenseVector<double>;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitThreshold = 3;
constexpr int kExitNoConvergence = 4;

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : out_(path) {
    if (!out_) throw lra::io::IoError(path.string() + ": cannot open for writing");
    out_.precision(17);
  }
  template <typename... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ","), first = false, out_ << fields), ...);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Index> parse_index_list(const std::string& csv, const char* what) {
  std::vector<Index> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(static_cast<Index>(std::stoll(tok)));
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": bad list entry '" + tok + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
  return out;
}

std::string join_indices(const std::vector<Index>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

// ---------------------------------------------------------------------------
// bench-synthetic

struct BenchOpts {
  std::string type = "I";
  std::string method = "both";
  Index block_size = 10;
  int power_iters = 2;
  double theta = 1e-5;
  Index seeds = 10;
  std::uint64_t seed = 0;
  fs::path out_dir = ".";
};

struct BenchRow {
  Index crank = 0;
  double ortho = 0, range_err = 0, approx_err = 0;
  bool reached = true;
};

BenchRow bench_one(const lra::SyntheticMatrix<double>& sm, Index k_true,
                   const lra::RankRevealConfig& cfg, RngStream rng) {
  const auto res = lra::rank_reveal(sm.a, cfg, rng);
  const auto m = lra::evaluate_synthetic_run(sm, k_true, res);
  return {m.crank, m.ortho_error, m.range_err, m.approx_error, m.threshold_reached};
}

int cmd_bench_synthetic(const BenchOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  if (o.type != "I" && o.type != "II")
    throw std::invalid_argument("bench-synthetic: --type must be I or II");
  std::vector<std::string> methods;
  if (o.method == "both")
    methods = {"plain", "stabilized"};
  else if (o.method == "plain" || o.method == "stabilized")
    methods = {o.method};
  else
    throw std::invalid_argument("bench-synthetic: --method must be plain, stabilized or both");

  const Index k_true = o.type == "I" ? 10 : 20;
  fs::create_directories(o.out_dir);
  const fs::path csv_path = o.out_dir / "bench_synthetic.csv";
  CsvWriter csv(csv_path);
  csv.row("kind", "method", "type", "b", "q", "theta", "seed", "crank", "ortho_error",
          "range_error", "approx_error", "threshold_reached");

  std::map<std::string, std::vector<BenchRow>> rows;
  for (Index i = 0; i < o.seeds; ++i) {
    auto spec = o.type == "I" ? lra::type_i_spec(0) : lra::type_ii_spec(0);
    spec.seed = o.seed + static_cast<std::uint64_t>(i);
    const auto sm = lra::make_synthetic(spec);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      lra::RankRevealConfig cfg;
      cfg.block_size = o.block_size;
      cfg.threshold = o.theta;
      cfg.power_iters = o.power_iters;
      cfg.stabilized = methods[mi] == "stabilized";
      const BenchRow row = bench_one(
          sm, k_true, cfg,
          lra::substream(o.seed, 0x8e11c5 + 2 * static_cast<std::uint64_t>(i) + mi));
      rows[methods[mi]].push_back(row);
      csv.row("seed", methods[mi], o.type, o.block_size, o.power_iters, o.theta, spec.seed,
              row.crank, row.ortho, row.range_err, row.approx_err, row.reached ? 1 : 0);
    }
  }

  lra::RunManifest man;
  man.set("command", "bench-synthetic");
  man.set("arg.type", o.type);
  man.set("arg.method", o.method);
  man.set("arg.block_size", static_cast<std::int64_t>(o.block_size));
  man.set("arg.power_iters", static_cast<std::int64_t>(o.power_iters));
  man.set("arg.theta", o.theta);
  man.set("arg.seeds", static_cast<std::int64_t>(o.seeds));
  man.set("seed", o.seed);
  man.set("output.csv", csv_path.filename().string());

  for (const auto& m : methods) {
    const auto& v = rows[m];
    std::vector<double> cranks, orthos, ranges, approxs;
    Index n_expected = 0, n_over = 0;
    for (const auto& r : v) {
      cranks.push_back(double(r.crank));
      orthos.push_back(r.ortho);
      ranges.push_back(r.range_err);
      approxs.push_back(r.approx_err);
      if (r.crank == k_true) ++n_expected;
      if (r.crank > k_true) ++n_over;
    }
    csv.row("median", m, o.type, o.block_size, o.power_iters, o.theta, -1, median(cranks),
            median(orthos), median(ranges), median(approxs), "");
    man.set("metric." + m + ".crank_median", median(cranks));
    man.set("metric." + m + ".crank_expected_count", static_cast<std::int64_t>(n_expected));
    man.set("metric." + m + ".crank_over_count", static_cast<std::int64_t>(n_over));
    man.set("metric." + m + ".ortho_error_max", *std::max_element(orthos.begin(), orthos.end()));
    man.set("metric." + m + ".range_error_median", median(ranges));
    man.set("metric." + m + ".approx_error_median", median(approxs));
  }
  man.set("info.elapsed_seconds", elapsed_since(t0));
  man.write(o.out_dir / "manifest.txt");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// singular-accuracy

struct SvAccOpts {
  std::string type = "II";
  std::string method = "both";
  std::vector<Index> block_sizes = {5, 10, 15};
  std::vector<Index> power_iters = {1, 2, 3};
  double theta = 1e-9;
  Index seeds = 20;
  std::uint64_t seed = 0;
  fs::path out_dir = ".";
};

int cmd_singular_accuracy(const SvAccOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  if (o.type != "II")
    throw std::invalid_argument("singular-accuracy: only --type II is supported");
  std::vector<std::string> methods;
  if (o.method == "both")
    methods = {"plain", "stabilized"};
  else if (o.method == "plain" || o.method == "stabilized")
    methods = {o.method};
  else
    throw std::invalid_argument("singular-accuracy: bad --method");

  fs::create_directories(o.out_dir);
  const fs::path csv_path = o.out_dir / "singular_accuracy.csv";
  CsvWriter csv(csv_path);
  csv.row("kind", "method", "b", "q", "seed", "index", "sigma_true", "sigma_est", "rel_error");

  lra::RunManifest man;
  man.set("command", "singular-accuracy");
  man.set("arg.type", o.type);
  man.set("arg.method", o.method);
  man.set("arg.block_sizes", join_indices(o.block_sizes));
  man.set("arg.power_iters", join_indices(o.power_iters));
  man.set("arg.theta", o.theta);
  man.set("arg.seeds", static_cast<std::int64_t>(o.seeds));
  man.set("seed", o.seed);
  man.set("output.csv", csv_path.filename().string());

  // method -> (b, q) -> index -> per-seed relative errors
  std::map<std::string, std::map<std::pair<Index, Index>, std::map<Index, std::vector<double>>>>
      errs;
  for (Index i = 0; i < o.seeds; ++i) {
    auto spec = lra::type_ii_spec(o.seed + static_cast<std::uint64_t>(i));
    const auto sm = lra::make_synthetic(spec);
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
      for (Index b : o.block_sizes) {
        for (Index q : o.power_iters) {
          lra::RankRevealConfig cfg;
          cfg.block_size = b;
          cfg.threshold = o.theta;
          cfg.power_iters = static_cast<int>(q);
          cfg.stabilized = methods[mi] == "stabilized";
          RngStream rng = lra::substream(
              o.seed, 0xacc0 + ((static_cast<std::uint64_t>(i) * 8 + mi) * 64 +
                                static_cast<std::uint64_t>(b)) *
                                   8 +
                          static_cast<std::uint64_t>(q));
          const auto res = lra::rank_reveal(sm.a, cfg, rng);
          for (Index j = 0; j < res.rank; ++j) {
            const double truth = j < sm.sigma.size() ? sm.sigma(j) : 0.0;
            const double rel = truth > 0 ? std::abs(res.sing_vals(j) - truth) / truth
                                         : std::numeric_limits<double>::infinity();
            csv.row("seed", methods[mi], b, q, spec.seed, j + 1, truth, res.sing_vals(j), rel);
            if (truth > 0) errs[methods[mi]][{b, q}][j].push_back(rel);
          }
        }
      }
    }
  }

  double worst_first5_median = 0.0;
  for (const auto& m : methods) {
    for (const auto& [bq, per_index] : errs[m]) {
      for (const auto& [j, v] : per_index) {
        const double med = median(v);
        csv.row("median", m, bq.first, bq.second, -1, j + 1, "", "", med);
        if (bq.second >= 2 && j < 5) worst_first5_median = std::max(worst_first5_median, med);
      }
    }
  }
  man.set("metric.first5_median_rel_error_max_q_ge_2", worst_first5_median);
  man.set("info.elapsed_seconds", elapsed_since(t0));
  man.write(o.out_dir / "manifest.txt");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// compress-image / decompress-image

struct CompressOpts {
  fs::path input;
  double theta_fraction = 0.05;
  Index block_size = 10;
  int power_iters = 2;
  std::uint64_t seed = 0;
  fs::path out_dir = ".";
};

int cmd_compress_image(const CompressOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(o.theta_fraction > 0 && o.theta_fraction < 1))
    throw std::invalid_argument("compress-image: --theta-fraction must be in (0, 1)");
  const lra::io::Image img = lra::io::read_pnm(o.input);
  const Mat a = lra::io::stack_planes(img);
  const double anorm = lra::spectral_norm(a);
  const double theta = o.theta_fraction * anorm;

  lra::RankRevealConfig cfg;
  cfg.block_size = o.block_size;
  cfg.power_iters = o.power_iters;
  cfg.threshold = theta;
  RngStream rng = lra::substream(o.seed, 0xc0);
  const auto res = lra::rank_reveal(a, cfg, rng);

  fs::create_directories(o.out_dir);
  const Mat b = res.basis.transpose() * a;
  const fs::path q_path = o.out_dir / "factors_q.rf64";
  const fs::path b_path = o.out_dir / "factors_b.rf64";
  lra::io::write_matrix(q_path, res.basis, lra::io::MatrixFormat::raw_f64);
  lra::io::write_matrix(b_path, b, lra::io::MatrixFormat::raw_f64);

  const Mat recon = res.basis * b;
  const fs::path recon_path =
      o.out_dir / (img.color() ? "reconstructed.ppm" : "reconstructed.pgm");
  const auto out_img = lra::io::unstack_planes(recon, img.color());
  if (img.color())
    lra::io::write_ppm(recon_path, out_img.planes[0], out_img.planes[1], out_img.planes[2]);
  else
    lra::io::write_pgm(recon_path, out_img.planes[0]);

  const double relerror = lra::spectral_norm((a - recon).eval()) / anorm;
  const double cratio = res.rank == 0 ? std::numeric_limits<double>::infinity()
                                      : double(a.rows()) * double(a.cols()) /
                                            (double(a.rows() + a.cols()) * double(res.rank));

  lra::RunManifest man;
  man.set("command", "compress-image");
  man.set("arg.input", fs::absolute(o.input).string());
  man.set("arg.theta_fraction", o.theta_fraction);
  man.set("arg.block_size", static_cast<std::int64_t>(o.block_size));
  man.set("arg.power_iters", static_cast<std::int64_t>(o.power_iters));
  man.set("seed", o.seed);
  man.set("info.color", img.color() ? "1" : "0");
  man.set("info.height", static_cast<std::int64_t>(img.height()));
  man.set("info.width", static_cast<std::int64_t>(img.width()));
  man.set("output.factors_q", q_path.filename().string());
  man.set("output.factors_b", b_path.filename().string());
  man.set("output.reconstructed", recon_path.filename().string());
  man.set("metric.crank", static_cast<std::int64_t>(res.rank));
  man.set("metric.cratio", cratio);
  man.set("metric.relerror", relerror);
  man.set("metric.theta", theta);
  man.set("info.elapsed_seconds", elapsed_since(t0));
  man.write(o.out_dir / "manifest.txt");

  if (!res.threshold_reached) return kExitThreshold;
  return kExitOk;
}

struct DecompressOpts {
  fs::path manifest;
  fs::path output;  // empty: <out-dir>/decompressed.<ext>
  fs::path out_dir = ".";
};

int cmd_decompress_image(const DecompressOpts& o) {
  const auto man = lra::RunManifest::read(o.manifest);
  if (man.get_or("command", "") != "compress-image")
    throw std::invalid_argument("decompress-image: manifest is not from compress-image");
  const fs::path base = fs::path(o.manifest).parent_path();
  const Mat q =
      lra::io::read_matrix(base / man.get("output.factors_q"), lra::io::MatrixFormat::raw_f64);
  const Mat b =
      lra::io::read_matrix(base / man.get("output.factors_b"), lra::io::MatrixFormat::raw_f64);
  const bool color = man.get_or("info.color", "0") == "1";
  const Mat recon = q * b;
  fs::create_directories(o.out_dir);
  fs::path out = o.output;
  if (out.empty()) out = o.out_dir / (color ? "decompressed.ppm" : "decompressed.pgm");
  const auto img = lra::io::unstack_planes(recon, color);
  if (color)
    lra::io::write_ppm(out, img.planes[0], img.planes[1], img.planes[2]);
  else
    lra::io::write_pgm(out, img.planes[0]);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// lsi

struct LsiOpts {
  fs::path matrix;
  std::vector<Index> query;
  double theta = -1;
  Index rank = -1;
  Index top = -1;
  Index block_size = 10;
  int power_iters = 2;
  std::uint64_t seed = 0;
  fs::path out_dir = ".";
};

int cmd_lsi(const LsiOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  if (o.query.empty()) throw std::invalid_argument("lsi: empty query");
  if ((o.theta > 0) == (o.rank > 0))
    throw std::invalid_argument("lsi: give exactly one of --theta or --rank");
  const Mat a = lra::io::read_matrix_auto(o.matrix);

  Vec query = Vec::Zero(a.rows());
  for (Index t : o.query) {
    if (t < 1 || t > a.rows())
      throw std::invalid_argument("lsi: query term " + std::to_string(t) + " out of range");
    query(t - 1) = 1.0;
  }

  lra::RankRevealConfig cfg;
  cfg.block_size = o.block_size;
  cfg.power_iters = o.power_iters;
  if (o.theta > 0) {
    cfg.threshold = o.theta;
  } else {
    cfg.threshold = std::numeric_limits<double>::min();  // fixed-rank mode
    cfg.max_rank = o.rank;
  }
  RngStream rng = lra::substream(o.seed, 0x151);
  const auto res = lra::rank_reveal(a, cfg, rng);
  if (o.theta > 0 && !res.threshold_reached) return kExitThreshold;

  const Vec qhat = res.basis.transpose() * query;
  const Mat w = res.basis.transpose() * a;
  const double qnorm = query.norm();
  std::vector<std::pair<double, Index>> scores(a.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    const double wnorm = w.col(j).norm();
    const double s = wnorm > 0 ? qhat.dot(w.col(j)) / (qnorm * wnorm) : 0.0;
    scores[j] = {s, j};
  }
  std::stable_sort(scores.begin(), scores.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });

  fs::create_directories(o.out_dir);
  const fs::path csv_path = o.out_dir / "lsi_scores.csv";
  CsvWriter csv(csv_path);
  csv.row("rank", "document", "score");
  const Index limit = o.top > 0 ? std::min<Index>(o.top, a.cols()) : a.cols();
  for (Index i = 0; i < limit; ++i) csv.row(i + 1, scores[i].second + 1, scores[i].first);

  lra::RunManifest man;
  man.set("command", "lsi");
  man.set("arg.matrix", fs::absolute(o.matrix).string());
  man.set("arg.query", join_indices(o.query));
  if (o.theta > 0) man.set("arg.theta", o.theta);
  if (o.rank > 0) man.set("arg.rank", static_cast<std::int64_t>(o.rank));
  if (o.top > 0) man.set("arg.top", static_cast<std::int64_t>(o.top));
  man.set("arg.block_size", static_cast<std::int64_t>(o.block_size));
  man.set("arg.power_iters", static_cast<std::int64_t>(o.power_iters));
  man.set("seed", o.seed);
  man.set("output.csv", csv_path.filename().string());
  man.set("metric.crank", static_cast<std::int64_t>(res.rank));
  man.set("metric.top_document",
          static_cast<std::int64_t>(scores.empty() ? 0 : scores[0].second + 1));
  man.set("metric.top_score", scores.empty() ? 0.0 : scores[0].first);
  man.set("info.elapsed_seconds", elapsed_since(t0));
  man.write(o.out_dir / "manifest.txt");
  return kExitOk;
}

// ---------------------------------------------------------------------------
// rpca

struct RpcaOpts {
  fs::path frames;
  std::string backend = "approximate";
  double lambda = -1;
  double mu0 = 1e-3;
  double rho = 1.1;
  int max_iters = 100;
  double tol = 9e-5;
  Index block_size = 10;
  int power_iters = 0;
  bool step2_subtract_prev_sparse = false;
  std::uint64_t seed = 0;
  fs::path out_dir = ".";
};

int cmd_rpca(const RpcaOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!fs::is_directory(o.frames))
    throw std::invalid_argument("rpca: --frames must be a directory of PGM files");
  std::vector<fs::path> frame_paths;
  for (const auto& e : fs::directory_iterator(o.frames))
    if (e.is_regular_file() && e.path().extension() == ".pgm") frame_paths.push_back(e.path());
  std::sort(frame_paths.begin(), frame_paths.end());
  if (frame_paths.empty()) throw std::invalid_argument("rpca: no .pgm frames found");

  Index height = 0, width = 0;
  Mat a;
  for (std::size_t f = 0; f < frame_paths.size(); ++f) {
    const auto img = lra::io::read_pnm(frame_paths[f]);
    if (img.color())
      throw std::invalid_argument(frame_paths[f].string() + ": expected grayscale PGM");
    if (f == 0) {
      height = img.height();
      width = img.width();
      a.resize(height * width, static_cast<Index>(frame_paths.size()));
    } else if (img.height() != height || img.width() != width) {
      throw std::invalid_argument(frame_paths[f].string() + ": frame size differs");
    }
    a.col(static_cast<Index>(f)) =
        Eigen::Map<const Vec>(img.planes[0].data(), height * width);
  }

  lra::RpcaConfig cfg;
  cfg.lambda = o.lambda;
  cfg.mu0 = o.mu0;
  cfg.rho = o.rho;
  cfg.max_iters = o.max_iters;
  cfg.tol = o.tol;
  if (o.backend != "exact" && o.backend != "approximate")
    throw std::invalid_argument("rpca: --backend must be exact or approximate");
  cfg.backend = o.backend == "exact" ? lra::RpcaBackend::exact : lra::RpcaBackend::approximate;
  cfg.block_size = o.block_size;
  cfg.power_iters = o.power_iters;
  cfg.step2_subtract_prev_sparse = o.step2_subtract_prev_sparse;

  RngStream rng = lra::substream(o.seed, 0x69ca);
  const auto st = lra::alm_rpca(a, cfg, rng);

  fs::create_directories(o.out_dir);
  char name[64];
  for (std::size_t f = 0; f < frame_paths.size(); ++f) {
    const auto col_image = [&](const Mat& m) {
      return Mat(Eigen::Map<const Mat>(m.col(static_cast<Index>(f)).data(), height, width));
    };
    std::snprintf(name, sizeof(name), "background_%04zu.pgm", f);
    lra::io::write_pgm(o.out_dir / name, col_image(st.low_rank));
    std::snprintf(name, sizeof(name), "foreground_%04zu.pgm", f);
    lra::io::write_pgm(o.out_dir / name, col_image(st.sparse));
  }
  const fs::path trace_path = o.out_dir / "trace.csv";
  {
    CsvWriter csv(trace_path);
    csv.row("iter", "mu", "rank", "nnz", "relerror");
    for (std::size_t j = 0; j < st.relerror_trace.size(); ++j)
      csv.row(j + 1, st.mu_trace[j], st.rank_trace[j], st.nnz_trace[j], st.relerror_trace[j]);
  }

  lra::RunManifest man;
  man.set("command", "rpca");
  man.set("arg.frames", fs::absolute(o.frames).string());
  man.set("arg.backend", o.backend);
  man.set("arg.lambda", o.lambda);
  man.set("arg.mu0", o.mu0);
  man.set("arg.rho", o.rho);
  man.set("arg.max_iters", static_cast<std::int64_t>(o.max_iters));
  man.set("arg.tol", o.tol);
  man.set("arg.block_size", static_cast<std::int64_t>(o.block_size));
  man.set("arg.power_iters", static_cast<std::int64_t>(o.power_iters));
  man.set("arg.step2_subtract_prev_sparse", o.step2_subtract_prev_sparse ? "1" : "0");
  man.set("seed", o.seed);
  man.set("output.trace", trace_path.filename().string());
  man.set("metric.converged", st.converged ? "1" : "0");
  man.set("metric.iterations", static_cast<std::int64_t>(st.iter));
  man.set("metric.final_relerror", st.relerror_trace.back());
  man.set("metric.final_rank", static_cast<std::int64_t>(st.rank_trace.back()));
  man.set("info.frames", static_cast<std::int64_t>(frame_paths.size()));
  man.set("info.height", static_cast<std::int64_t>(height));
  man.set("info.width", static_cast<std::int64_t>(width));
  man.set("info.elapsed_seconds", elapsed_since(t0));
  man.write(o.out_dir / "manifest.txt");

  return st.converged ? kExitOk : kExitNoConvergence;
}

// ---------------------------------------------------------------------------
// replay

struct ReplayOpts {
  fs::path manifest;
  fs::path out_dir = ".";
};

int dispatch_manifest(const lra::RunManifest& man, const fs::path& out_dir) {
  const std::string command = man.get("command");
  const std::uint64_t seed = std::stoull(man.get_or("seed", "0"));
  if (command == "bench-synthetic") {
    BenchOpts o;
    o.type = man.get("arg.type");
    o.method = man.get("arg.method");
    o.block_size = std::stoll(man.get("arg.block_size"));
    o.power_iters = std::stoi(man.get("arg.power_iters"));
    o.theta = std::stod(man.get("arg.theta"));
    o.seeds = std::stoll(man.get("arg.seeds"));
    o.seed = seed;
    o.out_dir = out_dir;
    return cmd_bench_synthetic(o);
  }
  if (command == "singular-accuracy") {
    SvAccOpts o;
    o.type = man.get("arg.type");
    o.method = man.get("arg.method");
    o.block_sizes = parse_index_list(man.get("arg.block_sizes"), "replay");
    o.power_iters = parse_index_list(man.get("arg.power_iters"), "replay");
    o.theta = std::stod(man.get("arg.theta"));
    o.seeds = std::stoll(man.get("arg.seeds"));
    o.seed = seed;
    o.out_dir = out_dir;
    return cmd_singular_accuracy(o);
  }
  if (command == "compress-image") {
    CompressOpts o;
    o.input = man.get("arg.input");
    o.theta_fraction = std::stod(man.get("arg.theta_fraction"));
    o.block_size = std::stoll(man.get("arg.block_size"));
    o.power_iters = std::stoi(man.get("arg.power_iters"));
    o.seed = seed;
    o.out_dir = out_dir;
    return cmd_compress_image(o);
  }
  if (command == "lsi") {
    LsiOpts o;
    o.matrix = man.get("arg.matrix");
    o.query = parse_index_list(man.get("arg.query"), "replay");
    if (man.contains("arg.theta")) o.theta = std::stod(man.get("arg.theta"));
    if (man.contains("arg.rank")) o.rank = std::stoll(man.get("arg.rank"));
    if (man.contains("arg.top")) o.top = std::stoll(man.get("arg.top"));
    o.block_size = std::stoll(man.get("arg.block_size"));
    o.power_iters = std::stoi(man.get("arg.power_iters"));
    o.seed = seed;
    o.out_dir = out_dir;
    return cmd_lsi(o);
  }
  if (command == "rpca") {
    RpcaOpts o;
    o.frames = man.get("arg.frames");
    o.backend = man.get("arg.backend");
    o.lambda = std::stod(man.get("arg.lambda"));
    o.mu0 = std::stod(man.get("arg.mu0"));
    o.rho = std::stod(man.get("arg.rho"));
    o.max_iters = std::stoi(man.get("arg.max_iters"));
    o.tol = std::stod(man.get("arg.tol"));
    o.block_size = std::stoll(man.get("arg.block_size"));
    o.power_iters = std::stoi(man.get("arg.power_iters"));
    o.step2_subtract_prev_sparse = man.get_or("arg.step2_subtract_prev_sparse", "0") == "1";
    o.seed = seed;
    o.out_dir = out_dir;
    return cmd_rpca(o);
  }
  throw std::invalid_argument("replay: unknown command '" + command + "'");
}

int cmd_replay(const ReplayOpts& o) {
  const auto man = lra::RunManifest::read(o.manifest);
  return dispatch_manifest(man, o.out_dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blocked randomized low-rank approximation toolkit"};
  app.require_subcommand(1);

  BenchOpts bench;
  auto* cb =
      app.add_subcommand("bench-synthetic", "run the synthetic rank-revealing benchmark table");
  cb->add_option("--type", bench.type, "matrix family, I or II")->capture_default_str();
  cb->add_option("--method", bench.method, "plain, stabilized or both")->capture_default_str();
  cb->add_option("-b,--block-size", bench.block_size)->capture_default_str();
  cb->add_option("-q,--power-iters", bench.power_iters)->capture_default_str();
  cb->add_option("--theta", bench.theta, "spectral threshold")->capture_default_str();
  cb->add_option("--seeds", bench.seeds, "number of seeded trials")->capture_default_str();
  cb->add_option("--seed", bench.seed, "base seed")->capture_default_str();
  cb->add_option("--out-dir", bench.out_dir)->capture_default_str();

  SvAccOpts acc;
  std::string acc_bs = "5,10,15", acc_qs = "1,2,3";
  auto* ca = app.add_subcommand("singular-accuracy", "per-index singular value accuracy table");
  ca->add_option("--type", acc.type, "matrix family (II)")->capture_default_str();
  ca->add_option("--method", acc.method)->capture_default_str();
  ca->add_option("--block-sizes", acc_bs, "comma list of b values")->capture_default_str();
  ca->add_option("--power-iters-list", acc_qs, "comma list of q values")->capture_default_str();
  ca->add_option("--theta", acc.theta)->capture_default_str();
  ca->add_option("--seeds", acc.seeds)->capture_default_str();
  ca->add_option("--seed", acc.seed)->capture_default_str();
  ca->add_option("--out-dir", acc.out_dir)->capture_default_str();

  CompressOpts comp;
  auto* cc = app.add_subcommand("compress-image", "low-rank PGM/PPM compression");
  cc->add_option("--input", comp.input, "binary P5/P6 image")->required();
  cc->add_option("--theta-fraction", comp.theta_fraction, "threshold as a fraction of ||A||_2")
      ->capture_default_str();
  cc->add_option("-b,--block-size", comp.block_size)->capture_default_str();
  cc->add_option("-q,--power-iters", comp.power_iters)->capture_default_str();
  cc->add_option("--seed", comp.seed)->capture_default_str();
  cc->add_option("--out-dir", comp.out_dir)->capture_default_str();

  DecompressOpts dec;
  auto* cd = app.add_subcommand("decompress-image", "rebuild the image from stored factors");
  cd->add_option("--manifest", dec.manifest, "manifest written by compress-image")->required();
  cd->add_option("--output", dec.output, "output image path");
  cd->add_option("--out-dir", dec.out_dir)->capture_default_str();

  LsiOpts lsi;
  std::string lsi_query;
  auto* cl = app.add_subcommand("lsi", "latent-semantic-indexing document scores");
  cl->add_option("--matrix", lsi.matrix, "term-document matrix (MatrixMarket or raw-f64)")
      ->required();
  cl->add_option("--query", lsi_query, "comma list of 1-based term indices")->required();
  cl->add_option("--theta", lsi.theta, "spectral threshold (exclusive with --rank)");
  cl->add_option("--rank", lsi.rank, "fixed rank (exclusive with --theta)");
  cl->add_option("--top", lsi.top, "limit output to the best N documents");
  cl->add_option("-b,--block-size", lsi.block_size)->capture_default_str();
  cl->add_option("-q,--power-iters", lsi.power_iters)->capture_default_str();
  cl->add_option("--seed", lsi.seed)->capture_default_str();
  cl->add_option("--out-dir", lsi.out_dir)->capture_default_str();

  RpcaOpts rp;
  auto* cr = app.add_subcommand("rpca", "robust PCA background estimation on PGM frames");
  cr->add_option("--frames", rp.frames, "directory of equally sized .pgm frames")->required();
  cr->add_option("--backend", rp.backend, "exact or approximate")->capture_default_str();
  cr->add_option("--lambda", rp.lambda, "sparse weight; negative means (m n)^{-1/2}")
      ->capture_default_str();
  cr->add_option("--mu0", rp.mu0)->capture_default_str();
  cr->add_option("--rho", rp.rho)->capture_default_str();
  cr->add_option("--max-iters", rp.max_iters)->capture_default_str();
  cr->add_option("--tol", rp.tol)->capture_default_str();
  cr->add_option("-b,--block-size", rp.block_size)->capture_default_str();
  cr->add_option("-q,--power-iters", rp.power_iters)->capture_default_str();
  cr->add_flag("--step2-subtract-prev-sparse", rp.step2_subtract_prev_sparse,
               "threshold A - L - S_prev instead of the multiplier-corrected argument");
  cr->add_option("--seed", rp.seed)->capture_default_str();
  cr->add_option("--out-dir", rp.out_dir)->capture_default_str();

  ReplayOpts rep;
  auto* ce = app.add_subcommand("replay", "re-execute a run from its manifest");
  ce->add_option("--manifest", rep.manifest)->required();
  ce->add_option("--out-dir", rep.out_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (cb->parsed()) return cmd_bench_synthetic(bench);
    if (ca->parsed()) {
      acc.block_sizes = parse_index_list(acc_bs, "--block-sizes");
      acc.power_iters = parse_index_list(acc_qs, "--power-iters-list");
      return cmd_singular_accuracy(acc);
    }
    if (cc->parsed()) return cmd_compress_image(comp);
    if (cd->parsed()) return cmd_decompress_image(dec);
    if (cl->parsed()) {
      lsi.query = parse_index_list(lsi_query, "--query");
      return cmd_lsi(lsi);
    }
    if (cr->parsed()) return cmd_rpca(rp);
    if (ce->parsed()) return cmd_replay(rep);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  }
  return kExitOk;
}
