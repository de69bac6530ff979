#include <doctest.h>

#include "lra/rng.hpp"

using lra::DenseMatrix;
using lra::RngStream;

TEST_CASE("same seed gives bit-identical matrices") {
  RngStream a(0), b(0);
  const DenseMatrix<double> ga = lra::gaussian(a, 3, 2);
  const DenseMatrix<double> gb = lra::gaussian(b, 3, 2);
  CHECK(ga == gb);
}

TEST_CASE("fill order is column-major stream order") {
  RngStream a(7), b(7);
  const DenseMatrix<double> g = lra::gaussian(a, 3, 2);
  for (lra::Index j = 0; j < 2; ++j)
    for (lra::Index i = 0; i < 3; ++i) CHECK(g(i, j) == b.normal());
}

TEST_CASE("sample moments are near standard normal") {
  for (std::uint64_t seed : {0ull, 1ull}) {
    RngStream rng(seed);
    const DenseMatrix<double> g = lra::gaussian(rng, 100, 100);
    const double mean = g.mean();
    const double var = (g.array() - mean).square().sum() / (g.size() - 1);
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.1);
  }
}

TEST_CASE("single sample is finite") {
  RngStream rng(123);
  const DenseMatrix<double> g = lra::gaussian(rng, 1, 1);
  CHECK(std::isfinite(g(0, 0)));
}

TEST_CASE("distinct seeds give distinct streams") {
  RngStream a(1), b(2);
  CHECK(lra::gaussian(a, 4, 4) != lra::gaussian(b, 4, 4));
}

TEST_CASE("substreams are decorrelated from the base stream") {
  RngStream base(42);
  RngStream sub = lra::substream(42, 0);
  CHECK(base.next_u64() != sub.next_u64());
}
