#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "attn/error.hpp"
#include "attn/fitting.hpp"
#include "attn/ingest.hpp"
#include "attn/synthetic.hpp"

namespace attn {
namespace {

constexpr std::int64_t kSeedUsers = 5600;

double log_uniform(std::mt19937_64& gen, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(gen));
}

std::vector<GainSample> gain_samples(const ModelParams& p, std::size_t n, std::uint64_t seed,
                                     double noise, bool zero_m = false) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<GainSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = log_uniform(gen, 1, 200);
    const double m = zero_m ? 0.0 : log_uniform(gen, 1, 50);
    double y = raw_gain(p, r, m) * (1.0 + noise * z(gen));
    out.push_back({r, m, std::clamp(y, 0.0, 1.0)});
  }
  return out;
}

std::vector<LossSample> loss_samples(const ModelParams& p, std::size_t n, std::uint64_t seed,
                                     double noise) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::vector<LossSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = log_uniform(gen, 1, 200);
    out.push_back({r, raw_loss(p, r) * (1.0 + noise * z(gen))});
  }
  return out;
}

TEST(Quintiles, TenUsers) {
  std::vector<UserSummary> users;
  for (UserId i = 1; i <= 10; ++i) users.push_back({100 + i, static_cast<double>(i), 0});
  const auto t = assign_quintiles(users);
  EXPECT_EQ(t.classes[0].members, (std::vector<UserId>{110, 109}));
  EXPECT_EQ(t.classes[4].members, (std::vector<UserId>{102, 101}));
  EXPECT_EQ(t.class_of(105), Quintile::Q3);
  EXPECT_THROW(t.class_of(1), Error);
}

TEST(Quintiles, TiesSplitByIdAndUnevenSizes) {
  std::vector<UserSummary> users;
  for (UserId i : {7, 3, 9, 1, 5, 2, 8}) users.push_back({i, 4.0, 10.0});
  const auto t = assign_quintiles(users);
  EXPECT_EQ(t.classes[0].members, (std::vector<UserId>{1, 2}));
  EXPECT_EQ(t.classes[1].members, (std::vector<UserId>{3, 5}));
  EXPECT_EQ(t.classes[2].members, (std::vector<UserId>{7}));
  for (const auto& c : t.classes) {
    EXPECT_EQ(c.mean_followers, 4.0);
    EXPECT_EQ(c.mean_statuses, 10.0);
  }
  std::vector<UserSummary> four(users.begin(), users.begin() + 4);
  try {
    assign_quintiles(four);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::TooFewUsers);
  }
}

TEST(Quintiles, CalibratedPopulationMatchesTargets) {
  const auto data = generate_calibrated_dataset();
  std::vector<UserSummary> users;
  for (const auto& row : data.snapshot) users.push_back({row.user_id, row.followers, row.statuses});
  const auto t = assign_quintiles(users);
  EXPECT_NEAR(t.classes[0].mean_followers / 29021.0, 1.0, 0.15);
  EXPECT_NEAR(t.classes[0].mean_statuses / 14086.0, 1.0, 0.15);
  EXPECT_NEAR(t.classes[1].mean_followers / 1058.0, 1.0, 0.15);
  EXPECT_NEAR(t.classes[2].mean_followers / 445.0, 1.0, 0.15);
}

TEST(Rmse, Examples) {
  const std::vector<double> a{1, 2, 3};
  EXPECT_EQ(evaluate_rmse(a, a), 0.0);
  EXPECT_NEAR(evaluate_rmse(std::vector<double>{1, 3}, std::vector<double>{1, 1}), std::sqrt(2.0), 1e-15);
  EXPECT_THROW(evaluate_rmse(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
  EXPECT_THROW(evaluate_rmse(std::vector<double>{}, std::vector<double>{}), Error);
}

TEST(Rmse, PermutationCovariant) {
  std::mt19937_64 gen(91);
  std::vector<double> a(50), b(50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<double>(gen() % 1000);
    b[i] = static_cast<double>(gen() % 1000);
  }
  const double before = evaluate_rmse(a, b);
  std::vector<std::size_t> idx(a.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), gen);
  std::vector<double> pa, pb;
  for (auto i : idx) {
    pa.push_back(a[i]);
    pb.push_back(b[i]);
  }
  EXPECT_NEAR(evaluate_rmse(pa, pb), before, 1e-12 * before);
}

TEST(Grid, ParallelMatchesSerial) {
  const std::array<GridAxis, 2> axes{GridAxis{0.0, 2.0, 0.05}, GridAxis{-1.0, 1.0, 0.1}};
  EXPECT_EQ(axes[0].size(), 41u);
  EXPECT_EQ(axes[1].size(), 21u);
  auto objective = [](std::span<const double> x) {
    return std::pow(x[0] - 0.73, 2) + std::pow(x[1] + 0.31, 2) + 0.01 * std::sin(20 * x[0] * x[1]);
  };
  const auto par = scan_grid(axes, objective);
  const auto ser = scan_grid_serial(axes, objective);
  EXPECT_EQ(par.index, ser.index);
  EXPECT_EQ(par.value, ser.value);

  // Ties resolve to the first point in row-major order.
  auto flat = [](std::span<const double>) { return 1.0; };
  EXPECT_EQ(scan_grid(axes, flat).index, 0u);
  EXPECT_EQ(scan_grid_serial(axes, flat).index, 0u);
}

TEST(NelderMead, Rosenbrock) {
  auto rosen = [](std::span<const double> x) {
    return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
  };
  const std::array<double, 2> start{-1.2, 1.0};
  const auto res = nelder_mead(rosen, start, 0.1, 5000, 1e-14);
  EXPECT_NEAR(res.point[0], 1.0, 1e-3);
  EXPECT_NEAR(res.point[1], 1.0, 1e-3);
  const auto capped = nelder_mead(rosen, start, 0.1, 3, 1e-14);
  EXPECT_FALSE(capped.converged);
  EXPECT_LE(capped.iterations, 3);
}

TEST(GainFit, NoiselessQ1Recovery) {
  const auto q1 = table3_params(Quintile::Q1, kSeedUsers);
  const auto fit = fit_gain_params(gain_samples(q1, 500, 41, 0.0));
  EXPECT_NEAR(fit.params.alpha, q1.alpha, 1e-3);
  EXPECT_NEAR(fit.params.beta, q1.beta, 1e-3);
  EXPECT_NEAR(fit.params.w1, q1.w1, 1e-3 * q1.w1 * 10);
  EXPECT_NEAR(fit.params.w2, q1.w2, 1e-3 * q1.w2 * 10);
  EXPECT_LT(fit.rmse, 1e-6);
}

TEST(GainFit, EveryRowFitsToZeroRmse) {
  for (auto q : {Quintile::Q1, Quintile::Q2, Quintile::Q3}) {
    const auto p = table3_params(q, kSeedUsers);
    const auto samples = gain_samples(p, 300, 43, 0.0);
    const auto a = fit_gain_params(samples);
    EXPECT_LE(a.rmse, 1e-6) << to_string(q);
    const auto b = fit_gain_params(samples);
    EXPECT_EQ(a.params, b.params);
  }
}

TEST(GainFit, ZeroMentionsGivesZeroW2) {
  const auto q1 = table3_params(Quintile::Q1, kSeedUsers);
  auto only_r = q1;
  only_r.w2 = 0.0;
  const auto fit = fit_gain_params(gain_samples(only_r, 300, 42, 0.0, true));
  EXPECT_EQ(fit.params.w2, 0.0);
  EXPECT_EQ(fit.params.beta, 0.0);
  EXPECT_NEAR(fit.params.alpha, q1.alpha, 1e-3);
}

TEST(GainFit, NoisyRecoveryMostSeeds) {
  const auto q1 = table3_params(Quintile::Q1, kSeedUsers);
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto fit = fit_gain_params(gain_samples(q1, 2000, 1000 + seed, 0.05));
    const bool ok = std::fabs(fit.params.alpha / q1.alpha - 1) <= 0.10 &&
                    std::fabs(fit.params.w1 / q1.w1 - 1) <= 0.20;
    passed += ok ? 1 : 0;
  }
  EXPECT_GE(passed, 18);
}

TEST(GainFit, Errors) {
  const auto q1 = table3_params(Quintile::Q1, kSeedUsers);
  EXPECT_THROW(fit_gain_params(gain_samples(q1, 19, 1, 0.0)), Error);
  std::vector<GainSample> zeros(30, GainSample{0, 0, 0.1});
  EXPECT_THROW(fit_gain_params(zeros), Error);
}

TEST(LossFit, NoiselessQ1IsExact) {
  const auto q1 = table3_params(Quintile::Q1, kSeedUsers);
  const auto fit = fit_loss_params(loss_samples(q1, 200, 51, 0.0));
  EXPECT_NEAR(fit.params.theta, q1.theta, 1e-6);
  EXPECT_NEAR(fit.params.w3, q1.w3, 1e-6);
}

TEST(LossFit, ConstantLoss) {
  std::vector<LossSample> s;
  for (int i = 1; i <= 40; ++i) s.push_back({static_cast<double>(i), 0.02});
  const auto fit = fit_loss_params(s);
  EXPECT_NEAR(fit.params.theta, 0.0, 1e-12);
  EXPECT_NEAR(fit.params.w3, 0.02, 1e-12);
}

TEST(LossFit, SignedRowsUseRawValues) {
  for (auto q : {Quintile::Q2, Quintile::Q3}) {
    const auto p = table3_params(q, kSeedUsers);
    const auto fit = fit_loss_params(loss_samples(p, 200, 52, 0.0));
    EXPECT_NEAR(fit.params.theta, p.theta, 1e-3);
    EXPECT_NEAR(fit.params.w3 / p.w3, 1.0, 1e-3);
  }
}

TEST(LossFit, NoisyTheta) {
  const auto q1 = table3_params(Quintile::Q1, kSeedUsers);
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto fit = fit_loss_params(loss_samples(q1, 2000, 2000 + seed, 0.05));
    passed += std::fabs(fit.params.theta / q1.theta - 1) <= 0.10 ? 1 : 0;
  }
  EXPECT_GE(passed, 18);
}

TEST(LossFit, AllZeroAndTooFew) {
  std::vector<LossSample> zeros(30, LossSample{5, 0.0});
  const auto fit = fit_loss_params(zeros);
  EXPECT_EQ(fit.params.w3, 0.0);
  EXPECT_EQ(fit.params.theta, 0.0);
  std::vector<LossSample> small_r(30, LossSample{0.5, 0.1});
  EXPECT_THROW(fit_loss_params(small_r), Error);
}

std::vector<ProxySample> proxy_samples(const ProxyParams& truth, std::size_t n, std::uint64_t seed,
                                       double f_lo, double f_hi) {
  std::mt19937_64 gen(seed);
  std::vector<ProxySample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = log_uniform(gen, f_lo, f_hi);
    const double p = log_uniform(gen, 1, 100);
    out.push_back({f, p, retweet_count(truth, f, p), mention_count(truth, f)});
  }
  return out;
}

TEST(ProxyFit, RetweetRoundTrip) {
  const ProxyParams truth{0.5, 1.1, 0.2, 0.9, 3.0, 0.001};
  const auto fit = fit_proxy_models(proxy_samples(truth, 400, 61, 10, 1000));
  const auto got = fit.combined();
  EXPECT_NEAR(got.a, truth.a, 1e-6);
  EXPECT_NEAR(got.b, truth.b, 1e-6);
  EXPECT_NEAR(got.c, truth.c, 1e-6);
  EXPECT_NEAR(got.d, truth.d, 1e-6);
  EXPECT_NEAR(got.a_m, truth.a_m, 1e-6);
  EXPECT_NEAR(got.b_m, truth.b_m, 1e-9);

  // Held-out points reproduce the generator.
  const auto held = proxy_samples(truth, 50, 62, 10, 1000);
  for (const auto& s : held) {
    EXPECT_NEAR(retweet_count(got, s.f, s.p) / s.r, 1.0, 0.05);
    EXPECT_NEAR(mention_count(got, s.f) / s.m, 1.0, 0.05);
  }
}

TEST(ProxyFit, ConstantMentions) {
  std::vector<ProxySample> s;
  for (int i = 0; i < 30; ++i) s.push_back({10.0 + i, 1.0 + i % 4, 2.0 + i, 4.0});
  const auto fit = fit_proxy_models(s);
  EXPECT_NEAR(fit.mention.params.a_m, 4.0, 1e-12);
  EXPECT_NEAR(fit.mention.params.b_m, 0.0, 1e-15);
}

TEST(ProxyFit, ZeroMentionWindowsExcluded) {
  const ProxyParams truth{0.5, 1.1, 0.2, 0.9, 3.0, 0.001};
  auto s = proxy_samples(truth, 60, 63, 10, 100);
  for (std::size_t i = 0; i < s.size(); i += 3) s[i].m = 0.0;
  const auto fit = fit_proxy_models(s);
  EXPECT_EQ(fit.mention_excluded, 20u);
  EXPECT_NEAR(fit.mention.params.b_m, truth.b_m, 1e-9);
}

TEST(ProxyFit, FromWindows) {
  const ProxyParams truth{0.5, 1.1, 0.2, 0.9, 3.0, 0.001};
  std::vector<UserWindow> windows;
  for (const auto& s : proxy_samples(truth, 100, 64, 10, 1000)) {
    windows.push_back({windows.size(), 0, s.p, s.f, s.r, s.m, 0, 0});
  }
  const auto fit = fit_proxy_models(windows);
  EXPECT_NEAR(fit.retweet.params.b, truth.b, 1e-6);
}

TEST(TrajectoryConstant, RecoversC) {
  auto p = table3_params(Quintile::Q1, kSeedUsers);
  std::vector<UserTrajectory> users;
  std::mt19937_64 gen(71);
  for (int u = 0; u < 20; ++u) {
    UserTrajectory t;
    t.state = {log_uniform(gen, 100, 3000), log_uniform(gen, 1, 100), log_uniform(gen, 1, 30), 0};
    for (int k = 0; k <= 8; ++k) {
      t.times.push_back(k);
      t.observed.push_back(follower_trajectory_closed(p, t.state, k).f);
    }
    users.push_back(t);
  }
  auto start = p;
  start.C = 0.0;
  const auto fit = fit_trajectory_constant(start, users);
  EXPECT_NEAR(fit.params.C, p.C, 1e-6 * p.C);
  EXPECT_LT(fit.rmse, 1e-6);
}

TEST(Pipeline, SummarizeUsers) {
  std::vector<UserWindow> w{{5, 1, 2, 10, 0, 0, 3, 1}, {5, 0, 1, 8, 0, 0, 2, 0}, {9, 0, 4, 1, 0, 0, 0, 0}};
  const auto s = summarize_users(w);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].id, 5u);
  EXPECT_EQ(s[0].followers, 12.0);
  EXPECT_EQ(s[0].statuses, 3.0);
  EXPECT_EQ(s[1].followers, 1.0);
}

TEST(Pipeline, QuintileFitZeroNoise) {
  const auto q1 = table3_params(Quintile::Q1, kSeedUsers);
  WindowSynthesis spec;
  spec.params = q1;
  spec.n_users = 100;
  spec.n_windows = 20;
  const auto windows = synthesize_windows(spec);
  const auto fit = fit_quintile(Quintile::Q1, windows, kSeedUsers);
  EXPECT_NEAR(fit.model.params.alpha, q1.alpha, 1e-3);
  EXPECT_NEAR(fit.model.params.theta, q1.theta, 1e-3);
  EXPECT_EQ(fit.model.params.N, kSeedUsers);
  EXPECT_FALSE(fit.low_confidence);
  EXPECT_TRUE(std::isfinite(fit.model.params.C));
}

TEST(Pipeline, TooFewWindows) {
  std::vector<UserWindow> w(5, UserWindow{1, 0, 1, 10, 1, 1, 1, 0});
  EXPECT_THROW(fit_quintile(Quintile::Q1, w, 100), Error);
}

}  // namespace
}  // namespace attn
