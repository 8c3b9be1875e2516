#pragma once

#include <cstdint>
#include <random>

namespace adnms {

/// SplitMix64 finaliser. Bijective on 64-bit values.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed of item `index` in stream `stream` under `master`:
///   splitmix64(splitmix64(master ^ splitmix64(stream)) + index)
/// Streams separate independent consumers (scene vs detector); the index
/// is typically the image number.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

// Random source with hand-written distributions on top of mt19937_64. The
// engine's sequence is fixed by the standard; the <random> distributions are
// not, so they are avoided to keep outputs identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform in the open interval (lo, hi).
  double uniform_open(double lo, double hi);

  /// Standard normal (Box-Muller, one value per call).
  double normal();

  /// Poisson variate (Knuth's product method). Mean must be in [0, 500].
  unsigned poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace adnms
