#include <doctest.h>

#include "test_helpers.hpp"

using lra::BlockTrace;
using lra::BoundReport;
using lra::DenseMatrix;
using lra::DenseVector;
using lra::Index;
using lra::RankRevealConfig;
using lra::RngStream;
using lra::testing::type_i_instance;
using lra::testing::type_ii_instance;
using lra::testing::with_spectrum;
using Mat = DenseMatrix<double>;
using Vec = DenseVector<double>;

namespace {

/// Spectrum with strong gaps at every block boundary, so the per-block
/// deflation assumptions hold for several blocks.
Vec block_gap_spectrum(Index blocks, Index b, Index n, double block_ratio) {
  Vec sigma(n);
  Index pos = 0;
  double level = 1.0;
  for (Index blk = 0; blk < blocks; ++blk) {
    for (Index i = 0; i < b; ++i) sigma(pos++) = level * (1.0 - 0.08 * double(i));
    level *= block_ratio;
  }
  while (pos < n) {
    sigma(pos++) = level;
    level *= 0.9;
  }
  return sigma;
}

int count_holds(const std::vector<BoundReport>& reports, const std::string& prefix,
                int* evaluated = nullptr) {
  int held = 0, seen = 0;
  for (const auto& r : reports) {
    if (r.name.rfind(prefix, 0) != 0 || r.assumption_violated()) continue;
    ++seen;
    if (r.holds) ++held;
  }
  if (evaluated) *evaluated = seen;
  return held;
}

}  // namespace

TEST_CASE("subspace_deviation of a basis with itself is zero") {
  RngStream rng(401);
  const Mat q = lra::random_orthonormal(rng, 20, 6);
  CHECK(lra::subspace_deviation(q, q) <= 1e-12);
}

TEST_CASE("subspace_deviation of orthogonal lines is one") {
  Mat w = Mat::Zero(2, 1), z = Mat::Zero(2, 1);
  w(0, 0) = 1;
  z(1, 0) = 1;
  CHECK(lra::subspace_deviation(w, z) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("subspace_deviation equals the projector distance for equal sizes") {
  RngStream rng(402);
  const Mat w = lra::random_orthonormal(rng, 30, 5);
  const Mat z = lra::random_orthonormal(rng, 30, 5);
  const double dev = lra::subspace_deviation(w, z);
  const double oracle =
      lra::spectral_norm((w * w.transpose() - z * z.transpose()).eval());
  CHECK(std::abs(dev - oracle) <= 1e-10);
  CHECK(std::abs(dev - lra::subspace_deviation(z, w)) <= 1e-10);
}

TEST_CASE("subspace_deviation rejects non-orthonormal input") {
  RngStream rng(403);
  const Mat g = lra::gaussian(rng, 10, 3);
  const Mat q = lra::orth(g);
  CHECK_THROWS_AS((void)lra::subspace_deviation(g, q), std::invalid_argument);
  CHECK_THROWS_AS((void)lra::subspace_deviation(q, g), std::invalid_argument);
}

TEST_CASE("numerical_rank basics") {
  Vec d(3);
  d << 1.0, 0.5, 1e-6;
  CHECK(lra::numerical_rank(Mat(d.asDiagonal()), 1e-3) == 2);
  CHECK(lra::numerical_rank(Mat::Zero(4, 3).eval(), 0.5) == 0);
}

TEST_CASE("numerical_rank of type I at its threshold") {
  CHECK(lra::numerical_rank(type_i_instance().a, 1e-5) == 10);
}

TEST_CASE("numerical_rank is non-increasing in theta") {
  RngStream rng(404);
  const Mat a = lra::gaussian(rng, 15, 10);
  double theta = 1e-6;
  Index prev = lra::numerical_rank(a, theta);
  for (int i = 0; i < 10; ++i) {
    theta *= 4.0;
    const Index now = lra::numerical_rank(a, theta);
    CHECK(now <= prev);
    prev = now;
  }
}

TEST_CASE("range_error endpoints") {
  RngStream rng(405);
  const Mat u = lra::random_orthonormal(rng, 25, 8);
  CHECK(lra::range_error(u.leftCols(4).eval(), u.leftCols(4).eval()) <= 1e-12);
  // Q inside the complement of U_k scores one.
  CHECK(lra::range_error(u.rightCols(4).eval(), u.leftCols(4).eval()) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("range_error of a stabilized type I run") {
  const auto& sm = type_i_instance();
  RankRevealConfig cfg;
  cfg.block_size = 5;
  cfg.threshold = 1e-5;
  cfg.power_iters = 3;
  RngStream rng(406);
  const auto res = lra::rank_reveal(sm.a, cfg, rng);
  REQUIRE(res.rank == 10);
  CHECK(lra::range_error(res.basis, sm.u.leftCols(10).eval()) <= 1e-9);
}

TEST_CASE("gaussian_norm_bound closed-form value") {
  // 2e * 4 * (2 + sqrt(2 log 4)) evaluated to full precision.
  CHECK(lra::gaussian_norm_bound(0.5, 1, 1, 2) ==
        doctest::Approx(79.70239838670082).epsilon(1e-12));
  CHECK_THROWS_AS((void)lra::gaussian_norm_bound(1.5, 1, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS((void)lra::gaussian_norm_bound(0.5, 2, 1, 2), std::invalid_argument);
}

TEST_CASE("gaussian_norm_bound grows with the ambient dimension") {
  double prev = 0;
  for (Index n = 10; n <= 100; n += 10) {
    const double now = lra::gaussian_norm_bound(0.1, 5, 5, n);
    CHECK(now > prev);
    prev = now;
  }
}

TEST_CASE("gaussian_norm_bound is smaller with a thinner split") {
  // r < l can give a smaller constant than r = l.
  CHECK(lra::gaussian_norm_bound(0.1, 4, 5, 50) < lra::gaussian_norm_bound(0.1, 5, 5, 50));
}

TEST_CASE("spectral_norm_of_product matches the dense oracle") {
  RngStream rng(407);
  const Mat x = lra::gaussian(rng, 40, 6);
  const Mat y = lra::gaussian(rng, 6, 25);
  const double fast = lra::spectral_norm_of_product(x, y);
  const double oracle = lra::spectral_norm((x * y).eval());
  CHECK(fast == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("deflation preserves the reindexed tail spectrum exactly") {
  RngStream rng(408);
  for (int trial = 0; trial < 50; ++trial) {
    Vec sigma(12);
    for (Index i = 0; i < 12; ++i) sigma(i) = std::pow(10.0, -0.4 * double(i));
    const auto sm = with_spectrum(rng, 18, sigma);
    const Index j = 3 + static_cast<Index>(rng.next_u64() % 4);
    const Mat w = sm.u.leftCols(j);
    const Mat deflated = sm.a - w * (w.transpose() * sm.a);
    const Vec got = lra::svd_small(deflated).s;
    Vec expect = Vec::Zero(12);
    expect.head(12 - j) = sigma.tail(12 - j);
    for (Index i = 0; i < 12; ++i) REQUIRE(std::abs(got(i) - expect(i)) <= 1e-10 * sigma(0));
  }
}

TEST_CASE("deflating one block lowers the numerical rank by the block size") {
  RngStream gen(409);
  const auto sm = lra::make_gap_matrix(gen, 60, 40, 12, 1e-1, 1e-3);
  const double theta = 1e-2;
  RankRevealConfig cfg;
  cfg.block_size = 4;
  cfg.threshold = theta;
  cfg.power_iters = 2;
  RngStream rng(410);
  BlockTrace<double> trace;
  const auto res = lra::rank_reveal(sm.a, cfg, rng, &trace);
  REQUIRE(res.rank == 12);
  const Mat q1 = trace[0].basis;
  const double eps = lra::subspace_deviation(q1, sm.u.leftCols(12).eval());
  REQUIRE(sm.sigma(11) - eps * sm.sigma(0) > theta);
  REQUIRE(theta > sm.sigma(12) + eps * sm.sigma(0));
  const Mat deflated = sm.a - q1 * (q1.transpose() * sm.a);
  CHECK(lra::numerical_rank(deflated, theta) == lra::numerical_rank(sm.a, theta) - 4);
}

TEST_CASE("first-block bounds hold on a type I instance") {
  const auto& sm = type_i_instance();
  RankRevealConfig cfg;
  cfg.block_size = 5;
  cfg.threshold = 1e-5;
  cfg.power_iters = 2;
  RngStream rng(411);
  BlockTrace<double> trace;
  const auto res = lra::rank_reveal(sm.a, cfg, rng, &trace);
  REQUIRE(res.rank == 10);
  const auto reports =
      lra::check_first_block_bounds(sm, trace[0].omega, trace[0].basis, 2, {5, 10});
  REQUIRE(reports.size() == 6);
  for (const auto& r : reports) {
    INFO(r.to_line());
    CHECK(r.holds);
    CHECK_FALSE(r.assumption_violated());
  }
}

TEST_CASE("first-block subspace bound degenerates cleanly at exact rank") {
  RngStream gen(412);
  const auto sm = lra::make_gap_matrix(gen, 30, 20, 5, 0.2, 0.0);
  RankRevealConfig cfg;
  cfg.block_size = 5;
  cfg.threshold = 1e-2;
  cfg.power_iters = 0;
  RngStream rng(413);
  BlockTrace<double> trace;
  const auto res = lra::rank_reveal(sm.a, cfg, rng, &trace);
  REQUIRE(res.rank == 5);
  const auto reports =
      lra::check_first_block_bounds(sm, trace[0].omega, trace[0].basis, 0, {5});
  for (const auto& r : reports) {
    INFO(r.to_line());
    CHECK(r.holds);
  }
  // sigma_{t+1} = 0 makes both sides of the subspace bound vanish.
  const auto& sub = reports.back();
  CHECK(sub.lhs <= 1e-10);
  CHECK(sub.rhs <= 1e-10);
}

TEST_CASE("first-block bounds over many desk-scale instances") {
  lra::SyntheticSpec spec;
  spec.n = 100;
  spec.k1 = 5;
  spec.k2 = 10;
  int held = 0, total = 0, excluded = 0;
  for (int seed = 0; seed < 100; ++seed) {
    spec.seed = 9000 + seed;
    const auto sm = lra::make_synthetic(spec);
    RankRevealConfig cfg;
    cfg.block_size = 5;
    cfg.threshold = 1e-5;
    cfg.power_iters = 2;
    RngStream rng(9500 + seed);
    BlockTrace<double> trace;
    (void)lra::rank_reveal(sm.a, cfg, rng, &trace);
    const auto reports =
        lra::check_first_block_bounds(sm, trace[0].omega, trace[0].basis, 2, {5});
    for (const auto& r : reports) {
      if (r.assumption_violated()) {
        ++excluded;
        continue;
      }
      ++total;
      if (r.holds) ++held;
    }
  }
  CHECK(held == total);
  CHECK(excluded <= 5);
}

TEST_CASE("deflation bounds along a type II run") {
  const auto& sm = type_ii_instance();
  RankRevealConfig cfg;
  cfg.block_size = 10;
  cfg.threshold = 1e-9;
  cfg.power_iters = 2;
  RngStream rng(414);
  BlockTrace<double> trace;
  const auto res = lra::rank_reveal(sm.a, cfg, rng, &trace);
  REQUIRE(res.rank == 20);
  const auto reports = lra::check_deflation_bounds(sm, trace, 2);
  int evaluated = 0;
  const int held = count_holds(reports, "", &evaluated);
  CHECK(evaluated > 0);
  CHECK(held == evaluated);
  // The first block has no deflation history, so its drift is pure roundoff.
  for (const auto& r : reports)
    if (r.name == "deflate-singvals-drift-block1") {
      CHECK(r.lhs <= 1e-10 * sm.sigma(0));
      CHECK(r.rhs == 0.0);
    }
}

TEST_CASE("deflation bounds evaluate deep blocks on block-gapped spectra") {
  RngStream gen(415);
  const Vec sigma = block_gap_spectrum(3, 4, 40, 0.01);
  const auto sm = with_spectrum(gen, 60, sigma);
  RankRevealConfig cfg;
  cfg.block_size = 4;
  cfg.threshold = sigma(11) * 0.5;  // keep all three strong blocks
  cfg.power_iters = 2;
  RngStream rng(416);
  BlockTrace<double> trace;
  const auto res = lra::rank_reveal(sm.a, cfg, rng, &trace);
  REQUIRE(res.rank == 12);
  const auto reports = lra::check_deflation_bounds(sm, trace, 2);
  int drift_seen = 0, block_seen = 0;
  for (const auto& r : reports) {
    INFO(r.to_line());
    if (r.assumption_violated()) continue;
    CHECK(r.holds);
    if (r.name.rfind("deflate-singvals-drift", 0) == 0) ++drift_seen;
    if (r.name.rfind("block-singvals", 0) == 0) ++block_seen;
  }
  // All three full blocks pass the gap assumption on this spectrum.
  CHECK(drift_seen == 3);
  CHECK(block_seen == 6);
}

TEST_CASE("stabilized runs track the dominant subspace at least as well") {
  lra::SyntheticSpec spec;
  spec.n = 200;
  spec.k1 = 5;
  spec.k2 = 20;
  int wins = 0;
  for (int seed = 0; seed < 100; ++seed) {
    spec.seed = 7000 + seed;
    const auto sm = lra::make_synthetic(spec);
    RankRevealConfig cfg;
    cfg.block_size = 10;
    cfg.threshold = 1e-9;
    cfg.power_iters = 1;

    BlockTrace<double> plain_trace, stab_trace;
    cfg.stabilized = false;
    RngStream r1(7100 + seed);
    (void)lra::rank_reveal(sm.a, cfg, r1, &plain_trace);
    cfg.stabilized = true;
    RngStream r2(7100 + seed);
    (void)lra::rank_reveal(sm.a, cfg, r2, &stab_trace);
    if (plain_trace.size() < 2 || stab_trace.size() < 2) continue;
    if (plain_trace[1].basis.cols() < 10 || stab_trace[1].basis.cols() < 10) continue;

    Mat plain_q(sm.a.rows(), 20), stab_q(sm.a.rows(), 20);
    plain_q << plain_trace[0].basis, plain_trace[1].basis;
    stab_q << stab_trace[0].basis, stab_trace[1].basis;
    const Mat u2 = sm.u.leftCols(20);
    const double eps_plain = lra::subspace_deviation(plain_q, u2);
    const double eps_stab = lra::subspace_deviation(stab_q, u2);
    if (eps_stab <= eps_plain * (1.0 + 1e-10) + 1e-14) ++wins;
  }
  CHECK(wins >= 90);
}

TEST_CASE("bound report serialization") {
  auto r = BoundReport::make("example-bound", 1.0, 2.0, 0.0, {{"b", 5.0}});
  CHECK(r.holds);
  CHECK(r.to_line().find("example-bound") != std::string::npos);
  CHECK(BoundReport::csv_header() == std::string("name,lhs,rhs,holds,context"));
  CHECK(r.to_csv_row().find("example-bound,1,2,1,") == 0);
  auto s = BoundReport::skipped("skipped-bound");
  CHECK(s.assumption_violated());
  CHECK(s.holds);
}
