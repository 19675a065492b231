#include "ihra/rng.hpp"

#include <cmath>
#include <limits>

#include "ihra/errors.hpp"

namespace ihra {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kPoissonChunk = 500.0;

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw InputError("Rng::below: n must be positive");
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw InputError("Rng::uniform_int: empty range");
  const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(hi) - lo) + 1;
  return static_cast<int>(lo + static_cast<std::int64_t>(below(span)));
}

std::uint64_t Rng::poisson(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw InputError("Rng::poisson: lambda must be finite and non-negative");
  }
  std::uint64_t total = 0;
  double remaining = lambda;
  while (remaining > 0.0) {
    const double chunk = std::min(remaining, kPoissonChunk);
    remaining -= chunk;
    const double threshold = std::exp(-chunk);
    double product = uniform();
    std::uint64_t k = 0;
    while (product > threshold) {
      ++k;
      product *= uniform();
    }
    total += k;
  }
  return total;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix64(base);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b * 0xd1b54a32d192ed03ULL));
  return h;
}

}  // namespace ihra
