#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "attn/error.hpp"
#include "attn/inequality.hpp"
#include "oracles.hpp"

namespace attn {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected attn::Error";
  return ErrorCode::BadConfig;
}

TEST(Gini, Examples) {
  EXPECT_EQ(gini(std::vector<double>{5, 5, 5, 5}), 0.0);
  EXPECT_NEAR(gini(std::vector<double>{8, 0, 0, 0}), 0.75, 1e-15);
  EXPECT_NEAR(gini(std::vector<double>{1, 2, 3, 4}), 0.25, 1e-12);
  EXPECT_EQ(gini(std::vector<double>{42}), 0.0);
}

TEST(Gini, Errors) {
  EXPECT_EQ(code_of([] { gini(std::vector<double>{}); }), ErrorCode::EmptySample);
  EXPECT_EQ(code_of([] { gini(std::vector<double>{0, 0, 0}); }), ErrorCode::ZeroMean);
  EXPECT_EQ(code_of([] { gini(std::vector<double>{1, -1}); }), ErrorCode::NegativeValue);
}

TEST(Gini, MatchesPairwiseOracle) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 300; ++trial) {
    const auto x = oracle::random_sample(gen, 1 + gen() % 300);
    ASSERT_NEAR(gini(x), static_cast<double>(oracle::gini_pairwise(x)), 1e-10);
  }
}

TEST(Gini, BoundsAndScaleInvariance) {
  std::mt19937_64 gen(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto x = oracle::random_sample(gen, 1 + gen() % 200);
    const double g = gini(x);
    const double n = static_cast<double>(x.size());
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, (n - 1.0) / n + 1e-12);
    for (auto& v : x) v *= 37.5;
    EXPECT_NEAR(gini(x), g, 1e-12);
  }
}

TEST(Lorenz, Examples) {
  const auto eq = lorenz(std::vector<double>{1, 1, 1, 1});
  ASSERT_EQ(eq.size(), 5u);
  for (std::size_t i = 0; i < eq.size(); ++i) {
    EXPECT_DOUBLE_EQ(eq[i].population_fraction, 0.25 * static_cast<double>(i));
    EXPECT_DOUBLE_EQ(eq[i].value_fraction, 0.25 * static_cast<double>(i));
  }
  const auto two = lorenz(std::vector<double>{3, 1});
  ASSERT_EQ(two.size(), 3u);
  EXPECT_DOUBLE_EQ(two[1].population_fraction, 0.5);
  EXPECT_DOUBLE_EQ(two[1].value_fraction, 0.25);
  EXPECT_DOUBLE_EQ(two[2].value_fraction, 1.0);
}

TEST(Lorenz, ShapeAndAreaProperty) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::random_sample(gen, 100);
    const auto curve = lorenz(x);
    EXPECT_EQ(curve.front().population_fraction, 0.0);
    EXPECT_EQ(curve.front().value_fraction, 0.0);
    EXPECT_EQ(curve.back().population_fraction, 1.0);
    EXPECT_EQ(curve.back().value_fraction, 1.0);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      EXPECT_GE(curve[i].value_fraction, curve[i - 1].value_fraction);
      EXPECT_LE(curve[i].value_fraction, curve[i].population_fraction + 1e-12);
      if (i + 1 < curve.size()) {
        const double second = curve[i + 1].value_fraction - 2 * curve[i].value_fraction + curve[i - 1].value_fraction;
        EXPECT_GE(second, -1e-12);
      }
    }
    EXPECT_NEAR(2.0 * lorenz_area_gap(curve), gini(x), 1e-9);
    EXPECT_NEAR(static_cast<double>(oracle::twice_lorenz_gap(x)), gini(x), 1e-9);
  }
}

TEST(TopShare, Examples) {
  EXPECT_NEAR(top_share(std::vector<double>{60, 20, 10, 6, 4}, 0.20), 0.60, 1e-15);
  EXPECT_NEAR(top_share(std::vector<double>{1, 1, 1, 1, 1}, 0.20), 0.20, 1e-15);
  // 0.07 * 100 rounds up to 7.000000000000001 in binary; still the top 7.
  std::vector<double> hundred(100, 1.0);
  EXPECT_NEAR(top_share(hundred, 0.07), 0.07, 1e-15);
}

TEST(TopShare, Errors) {
  const std::vector<double> x{1, 2};
  EXPECT_EQ(code_of([&] { top_share(x, 0.0); }), ErrorCode::FractionOutOfRange);
  EXPECT_EQ(code_of([&] { top_share(x, 1.0); }), ErrorCode::FractionOutOfRange);
  EXPECT_EQ(code_of([] { top_share(std::vector<double>{0, 0}, 0.5); }), ErrorCode::ZeroMean);
  EXPECT_EQ(code_of([] { top_share(std::vector<double>{}, 0.5); }), ErrorCode::EmptySample);
}

TEST(TopShare, MonotoneInFraction) {
  std::mt19937_64 gen(14);
  const auto x = oracle::random_sample(gen, 257);
  double prev = 0.0;
  for (double f = 0.001; f < 1.0; f += 0.013) {
    const double s = top_share(x, f);
    EXPECT_GE(s, prev);
    prev = s;
  }
  EXPECT_NEAR(top_share(x, 1.0 - 1e-9), 1.0, 1e-12);
}

TEST(Kurtosis, Examples) {
  EXPECT_NEAR(kurtosis_burstiness(std::vector<double>{0, 0, 0, 4}), 21.0 / 9.0, 1e-12);
  EXPECT_EQ(code_of([] { kurtosis_burstiness(std::vector<double>{3, 3, 3, 3}); }), ErrorCode::DegenerateSeries);
  EXPECT_EQ(code_of([] { kurtosis_burstiness(std::vector<double>{3}); }), ErrorCode::TooShort);
}

TEST(Kurtosis, GaussianIsThree) {
  std::mt19937_64 gen(15);
  std::normal_distribution<double> normal(10.0, 2.0);
  std::vector<double> x(100000);
  for (auto& v : x) v = normal(gen);
  EXPECT_NEAR(kurtosis_burstiness(x), 3.0, 0.1);
  EXPECT_NEAR(kurtosis_burstiness(x), static_cast<double>(oracle::kurtosis_moments(x)), 1e-9);
}

TEST(Kurtosis, AffineInvariant) {
  std::mt19937_64 gen(16);
  for (int trial = 0; trial < 50; ++trial) {
    auto x = oracle::random_sample(gen, 2 + gen() % 50);
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) continue;
    const double k = kurtosis_burstiness(x);
    for (auto& v : x) v = 3.0 - 0.25 * v;
    EXPECT_NEAR(kurtosis_burstiness(x), k, 1e-9 * std::max(1.0, k));
  }
}

TEST(LogBin, ConservationAndEdges) {
  std::vector<double> x;
  for (int i = 1; i <= 1000; ++i) x.push_back(i);
  const auto bins = log_bin(x, 2.0);
  std::size_t total = 0;
  for (const auto& b : bins) total += b.count;
  EXPECT_EQ(total, 1000u);
  EXPECT_EQ(bins.front().lower, 1.0);
  EXPECT_EQ(bins.front().count, 1u);  // [1, 2)
  EXPECT_EQ(bins[1].count, 2u);       // [2, 4)
  EXPECT_EQ(bins.back().lower, 512.0);

  EXPECT_TRUE(log_bin(std::vector<double>{}, 2.0).empty());
  EXPECT_EQ(code_of([] { log_bin(std::vector<double>{1.0}, 1.0); }), ErrorCode::BadBase);

  const auto with_zeros = log_bin(std::vector<double>{0, 0, 3, 0.25}, 2.0);
  EXPECT_EQ(with_zeros.front().count, 2u);
  EXPECT_EQ(with_zeros.front().upper, 0.0);
  EXPECT_EQ(with_zeros[1].lower, 0.25);
  std::size_t n = 0;
  for (const auto& b : with_zeros) n += b.count;
  EXPECT_EQ(n, 4u);
}

TEST(LogBin, ConservationProperty) {
  std::mt19937_64 gen(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::random_sample(gen, gen() % 300);
    const double base = 1.1 + 3.0 * static_cast<double>(gen() % 1000) / 1000.0;
    std::size_t total = 0;
    for (const auto& b : log_bin(x, base)) total += b.count;
    EXPECT_EQ(total, x.size());
  }
}

TEST(LogBin, ParetoDensityDecreasesPastMode) {
  // Deterministic Pareto(1.5, 1) quantiles.
  const std::size_t n = 100000;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::pow(1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(n), -1.0 / 1.5);
  }
  const auto bins = log_bin(x, 2.0);
  std::size_t mode = 0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i].density > bins[mode].density) mode = i;
  }
  for (std::size_t i = mode + 1; i < bins.size(); ++i) EXPECT_LE(bins[i].density, bins[i - 1].density);
}

TEST(Report, GiniMatchesLorenzArea) {
  const std::vector<double> x{1, 5, 9, 0, 30};
  const double fractions[] = {0.2, 0.5};
  const auto r = inequality_report(x, fractions);
  EXPECT_NEAR(r.gini, 2.0 * lorenz_area_gap(r.lorenz), 1e-9);
  EXPECT_NEAR(r.top_shares.at(0.2), 30.0 / 45.0, 1e-15);
}

}  // namespace
}  // namespace attn
