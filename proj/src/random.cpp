#include "attn/random.hpp"

#include <cmath>
#include <numbers>

namespace attn {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamA = 0xD1B54A32D192ED03ULL;
constexpr std::uint64_t kStreamB = 0x8CB92BA72F3D8DD7ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

// Mean below which plain inversion is used.
constexpr double kInversionMean = 30.0;

}  // namespace

std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& word : s_) {
    x += kGolden;
    word = splitmix64_mix(x);
  }
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix64_mix(seed + kGolden);
  h = splitmix64_mix(h ^ (a * kStreamA));
  h = splitmix64_mix(h ^ (b * kStreamB));
  return Rng(h);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  const double u1 = uniform_open_low();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::lognormal(double mu, double sigma) { return std::exp(mu + sigma * normal()); }

double Rng::truncated_pareto(double shape, double scale, double cap) {
  const double u = uniform();
  const double tail = 1.0 - std::pow(scale / cap, shape);
  return scale * std::pow(1.0 - u * tail, -1.0 / shape);
}

double Rng::gamma(double shape) {
  if (shape < 1.0) {
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform_open_low(), 1.0 / shape);
  }
  // Marsaglia-Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double z = 0.0;
    double v = 0.0;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open_low();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
  }
}

std::int64_t Rng::binomial(std::int64_t n, double p) {
  if (n <= 0 || !(p > 0.0)) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - binomial(n, 1.0 - p);
  if (static_cast<double>(n) * p >= kInversionMean) {
    // The a-th smallest of n uniforms is Beta(a, n + 1 - a); count the
    // successes on either side of it.
    const std::int64_t a = 1 + n / 2;
    const std::int64_t b = n + 1 - a;
    const double ga = gamma(static_cast<double>(a));
    const double x = ga / (ga + gamma(static_cast<double>(b)));
    if (x >= p) return binomial(a - 1, p / x);
    return a + binomial(b - 1, (p - x) / (1.0 - x));
  }
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = static_cast<double>(n + 1) * s;
  double r = std::pow(q, static_cast<double>(n));
  double u = uniform();
  std::int64_t x = 0;
  while (u > r) {
    u -= r;
    ++x;
    if (x > n) return n;
    r *= a / static_cast<double>(x) - s;
  }
  return x;
}

}  // namespace attn
