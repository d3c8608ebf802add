#pragma once

#include <cstdint>

// Portable random streams. Generator: xoshiro256** seeded through SplitMix64.
//
// Stream splitting: the stream for (seed, a, b) starts from
//   h = mix(mix(mix(seed + G) ^ (a * K1)) ^ (b * K2))
// where mix is the SplitMix64 finalizer, G = 0x9E3779B97F4A7C15,
// K1 = 0xD1B54A32D192ED03 and K2 = 0x8CB92BA72F3D8DD7. The four state words
// are the next four SplitMix64 outputs from h. The simulator uses
// a = user index, b = step index, so every (user, step) draw sequence is
// fixed regardless of thread scheduling.
namespace attn {

std::uint64_t splitmix64_mix(std::uint64_t z);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

  std::uint64_t next();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in (0, 1].
  double uniform_open_low() { return 1.0 - uniform(); }
  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();
  double lognormal(double mu, double sigma);
  /// Pareto(shape, scale) conditioned on x <= cap, by inversion.
  double truncated_pareto(double shape, double scale, double cap);
  /// Gamma(shape, 1).
  double gamma(double shape);
  /// Exact Binomial(n, p): inversion for small means, otherwise recursive
  /// splitting at a beta-distributed order statistic. p is clamped to [0, 1].
  std::int64_t binomial(std::int64_t n, double p);

 private:
  std::uint64_t s_[4];
};

}  // namespace attn
