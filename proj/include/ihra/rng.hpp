#pragma once

#include <cstdint>
#include <random>

namespace ihra {

// Random source with distributions implemented here rather than taken from
// <random>, whose distribution algorithms are implementation-defined. The
// engine (mt19937_64) is fully specified by the standard, so a given seed
// yields the same stream with every compiler and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on [0, n) by rejection; n must be positive.
  std::uint64_t below(std::uint64_t n);

  /// Uniform on the closed range [lo, hi].
  int uniform_int(int lo, int hi);

  /// Poisson(lambda) by Knuth's multiplication method. Rates above 500 are
  /// split into chunks of at most 500 and the chunk draws summed, which keeps
  /// exp(-chunk) away from underflow.
  std::uint64_t poisson(double lambda);

 private:
  std::mt19937_64 engine_;
};

/// Mixes a base seed with two indices into an independent substream seed
/// (splitmix64 finalizer chained over the inputs).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace ihra
