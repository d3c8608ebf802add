#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "attn/random.hpp"

namespace attn {
namespace {

TEST(Rng, SplitMixReferenceOutputs) {
  // First SplitMix64 outputs for seed 0 seed the four state words.
  EXPECT_EQ(splitmix64_mix(0x9E3779B97F4A7C15ULL), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64_mix(2 * 0x9E3779B97F4A7C15ULL), 0x6E789E6AA1B965F4ULL);
}

TEST(Rng, XoshiroMatchesReference) {
  // Independent transcription of xoshiro256** over the same seeding.
  std::uint64_t s[4];
  std::uint64_t x = 12345;
  for (auto& w : s) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    w = z ^ (z >> 31);
  }
  auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
  Rng rng(12345);
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t expect = rotl(s[1] * 5, 7) * 9;
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    ASSERT_EQ(rng.next(), expect);
  }
}

TEST(Rng, StreamsAreDistinctAndReproducible) {
  auto a = Rng::stream(7, 3, 4);
  auto b = Rng::stream(7, 3, 4);
  auto c = Rng::stream(7, 4, 3);
  auto d = Rng::stream(8, 3, 4);
  const auto va = a.next();
  EXPECT_EQ(va, b.next());
  EXPECT_NE(va, c.next());
  EXPECT_NE(va, d.next());
}

TEST(Rng, UniformRanges) {
  Rng rng(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_open_low();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Rng, NormalMoments) {
  Rng rng(2);
  const int n = 200000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.01);
}

TEST(Rng, LognormalMedian) {
  Rng rng(3);
  std::vector<double> x(20001);
  for (auto& v : x) v = rng.lognormal(1.0, 0.5);
  std::nth_element(x.begin(), x.begin() + 10000, x.end());
  EXPECT_NEAR(std::log(x[10000]), 1.0, 0.02);
}

TEST(Rng, TruncatedParetoSupportAndTail) {
  Rng rng(4);
  const int n = 100000;
  int above = 0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.truncated_pareto(1.16, 10.0, 1e4);
    ASSERT_GE(v, 10.0);
    ASSERT_LE(v, 1e4);
    if (v > 100.0) ++above;
  }
  // P(X > 100 | X <= 1e4) for Pareto(1.16, 10).
  const double tail = (std::pow(0.1, 1.16) - std::pow(1e-3, 1.16)) / (1 - std::pow(1e-3, 1.16));
  EXPECT_NEAR(static_cast<double>(above) / n, tail, 0.005);
}

class BinomialMoments : public ::testing::TestWithParam<std::pair<std::int64_t, double>> {};

TEST_P(BinomialMoments, MeanAndVarianceWithinThreeStandardErrors) {
  const auto [n, p] = GetParam();
  Rng rng(static_cast<std::uint64_t>(n) * 31 + 5);
  const int draws = 40000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < draws; ++i) {
    const auto k = rng.binomial(n, p);
    ASSERT_GE(k, 0);
    ASSERT_LE(k, n);
    s1 += static_cast<double>(k);
    s2 += static_cast<double>(k) * static_cast<double>(k);
  }
  const double mean = static_cast<double>(n) * p;
  const double var = mean * (1 - p);
  const double got_mean = s1 / draws;
  const double got_var = s2 / draws - got_mean * got_mean;
  EXPECT_NEAR(got_mean, mean, 3.0 * std::sqrt(var / draws) + 1e-12);
  EXPECT_NEAR(got_var, var, 0.05 * var + 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Range, BinomialMoments,
                         ::testing::Values(std::make_pair(10, 0.3), std::make_pair(100, 0.01),
                                           std::make_pair(1000, 0.2), std::make_pair(5599, 0.0398),
                                           std::make_pair(1000000, 0.5), std::make_pair(50, 0.97)));

TEST(Rng, GammaMoments) {
  Rng rng(6);
  for (double shape : {0.4, 1.0, 3.5, 500.0}) {
    const int n = 100000;
    double s1 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double g = rng.gamma(shape);
      ASSERT_GT(g, 0.0);
      s1 += g;
      s2 += g * g;
    }
    const double mean = s1 / n;
    EXPECT_NEAR(mean, shape, 3.0 * std::sqrt(shape / n));
    EXPECT_NEAR(s2 / n - mean * mean, shape, 0.05 * shape);
  }
}

TEST(Rng, BinomialEdges) {
  Rng rng(5);
  EXPECT_EQ(rng.binomial(0, 0.5), 0);
  EXPECT_EQ(rng.binomial(100, 0.0), 0);
  EXPECT_EQ(rng.binomial(100, 1.0), 100);
  EXPECT_EQ(rng.binomial(100, -0.2), 0);
  EXPECT_EQ(rng.binomial(100, 1.7), 100);
}

}  // namespace
}  // namespace attn
