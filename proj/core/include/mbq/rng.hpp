#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mbq {

/// Deterministic random stream used for every stochastic draw in the
/// library.  Wraps mt19937_64 but generates uniforms and categorical
/// draws itself, so identical seeds reproduce identical streams
/// bit-for-bit across platforms and standard-library versions.
///
/// Generator id recorded in run metadata: "mt19937_64/v1".
class Rng {
 public:
  static constexpr const char* kGeneratorId = "mt19937_64/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n).  Rejection sampling, no modulo bias.
  int uniform_int(int n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r = next_u64();
    while (r >= limit) r = next_u64();
    return static_cast<int>(r % bound);
  }

  /// Draw an index from a probability vector by inverse-CDF walk.
  /// Rounding shortfall at the tail falls back to the last index.
  int categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

  /// Derive an independent child seed, e.g. one per Monte Carlo trial.
  static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 over the combined value
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mbq
