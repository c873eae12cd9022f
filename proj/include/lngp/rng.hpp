#pragma once

#include <cstdint>
#include <random>

#include "lngp/common.hpp"

namespace lngp {

// Random stream with all variate transforms implemented explicitly, so a
// given seed produces the same draw sequence on every platform and build.
// std::mt19937_64 output is fully specified by the standard; the std
// distribution adaptors are not, which is why none are used here.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t integer(std::uint64_t n);

  // Standard normal via Marsaglia polar, one spare cached.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Unit-rate exponential.
  double exponential() { return -std::log1p(-uniform()); }

  // Gamma(shape, scale) via Marsaglia-Tsang, shape boost below 1.
  double gamma(double shape, double scale);

  double chi_squared(double df) { return gamma(0.5 * df, 2.0); }

  // Draw index with probability weights[i] / sum(weights). Weights must be
  // nonnegative with a positive sum.
  int categorical(const Vector& weights);

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Deterministic substream derivation (splitmix64 over seed ^ index tag).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace lngp
