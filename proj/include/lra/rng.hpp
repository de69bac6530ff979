#pragma once

#include <cmath>
#include <cstdint>

#include "lra/types.hpp"

namespace lra {

/// Counter-based pseudo-random stream. The integer core is SplitMix64 over
/// an incrementing counter, so a given seed always yields the same scalar
/// sequence regardless of platform. Streams are single-owner: concurrent
/// draws from one stream are not allowed; give each task its own stream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal deviate, Marsaglia polar method with the spare cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0;
  bool have_spare_ = false;
};

/// Independent stream for a tagged sub-task of a base seed.
inline RngStream substream(std::uint64_t seed, std::uint64_t tag) {
  RngStream mix(seed ^ (0x632BE59BD9B4E019ULL * (tag + 1)));
  return RngStream(mix.next_u64());
}

/// rows-by-cols matrix of i.i.d. standard normal samples, filled in
/// column-major stream order.
template <typename Scalar = double>
DenseMatrix<Scalar> gaussian(RngStream& rng, Index rows, Index cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("gaussian: dimensions must be >= 1");
  DenseMatrix<Scalar> g(rows, cols);
  Scalar* p = g.data();  // column-major storage: linear order is fill order
  for (Index i = 0; i < rows * cols; ++i) p[i] = static_cast<Scalar>(rng.normal());
  return g;
}

}  // namespace lra
