#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "attn/model.hpp"

// Quintile stratification and regression estimates of the model and proxy
// parameters. Every fitter is deterministic: fixed exponent grids, a
// conditional linear least-squares solve at each grid point, then a
// Nelder-Mead polish with a fixed iteration order.
namespace attn {

using UserId = std::uint64_t;

struct UserWindow {
  UserId user_id = 0;
  std::int64_t window_index = 0;
  double p = 0.0;
  double f_start = 0.0;
  double r = 0.0;
  double m = 0.0;
  double gained = 0.0;
  double lost = 0.0;

  bool operator==(const UserWindow&) const = default;
};

struct UserSummary {
  UserId id = 0;
  double followers = 0.0;
  double statuses = 0.0;
};

struct QuintileClass {
  Quintile label = Quintile::Q1;
  std::vector<UserId> members;  // in rank order
  double mean_followers = 0.0;
  double mean_statuses = 0.0;
};

struct QuintileTable {
  std::array<QuintileClass, 5> classes;

  /// Throws BadConfig for an id not in the table.
  Quintile class_of(UserId id) const;
};

/// Ranks by followers descending (ties by id ascending) and cuts into five
/// groups whose sizes differ by at most one; earlier classes take the extra
/// members. Throws TooFewUsers below five users.
QuintileTable assign_quintiles(std::span<const UserSummary> users);

template <class Params>
struct FitReport {
  Params params{};
  double rmse = 0.0;
  std::size_t n_samples = 0;
  bool converged = true;
};

struct GainSample {
  double r;
  double m;
  double p_plus;
};

struct LossSample {
  double r;
  double p_minus;
};

struct ProxySample {
  double f;
  double p;
  double r;
  double m;
};

struct ProxyFit {
  FitReport<ProxyParams> retweet;  // fills a, b, c, d
  FitReport<ProxyParams> mention;  // fills a_m, b_m
  std::size_t mention_excluded = 0;  // windows with m = 0

  ProxyParams combined() const;
};

inline constexpr std::size_t kMinFitSamples = 20;
inline constexpr int kPolishMaxIterations = 500;
inline constexpr double kPolishTolerance = 1e-9;
inline constexpr double kGridStep = 0.05;

/// Fits w1 r^alpha + w2 m^beta over (alpha, beta) in [0,2]^2 with
/// nonnegative weights. Fills alpha, beta, w1, w2 of the returned params.
/// An all-zero m column fixes w2 = beta = 0 (likewise for r).
FitReport<ModelParams> fit_gain_params(std::span<const GainSample> samples);

/// Fits w3 r^(-theta). Log-log regression when every P- is positive,
/// otherwise a theta grid over [-2, 2] with a signed w3. Samples with r < 1
/// are ignored. Fills theta and w3.
FitReport<ModelParams> fit_loss_params(std::span<const LossSample> samples);

/// r = a f^b + c p^d on a (b, d) grid with nonnegative (a, c);
/// m = a_m e^(b_m f) by log-linear regression over windows with m > 0.
ProxyFit fit_proxy_models(std::span<const ProxySample> samples);
ProxyFit fit_proxy_models(std::span<const UserWindow> windows);

/// One-dimensional least squares for C with every other parameter frozen,
/// against observed per-user follower trajectories.
struct UserTrajectory {
  AttentionState state;        // f0 and mean activity over the observed windows
  std::vector<double> times;   // model time units since the first window
  std::vector<double> observed;
};
FitReport<ModelParams> fit_trajectory_constant(const ModelParams& params,
                                               std::span<const UserTrajectory> users);

double evaluate_rmse(std::span<const double> predicted, std::span<const double> actual);

// Exponent grid search, the hot loop of every fitter.
struct GridAxis {
  double lo;
  double hi;
  double step;
  std::size_t size() const;
  double at(std::size_t i) const;
};

struct GridBest {
  std::size_t index = 0;  // row-major over the axes
  double value = 0.0;
};

/// Evaluates the objective at every grid point (OpenMP over points) and
/// returns the first minimum in row-major order.
GridBest scan_grid(std::span<const GridAxis> axes,
                   const std::function<double(std::span<const double>)>& objective);
/// Single-threaded reference for scan_grid.
GridBest scan_grid_serial(std::span<const GridAxis> axes,
                          const std::function<double(std::span<const double>)>& objective);

struct PolishResult {
  std::vector<double> point;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead from `start` with initial edge `step` along each axis.
/// Converged once the spread of simplex values drops to `tolerance`.
PolishResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                         std::span<const double> start, double step,
                         int max_iterations = kPolishMaxIterations,
                         double tolerance = kPolishTolerance);

// Per-quintile pipeline used by the fit command.
struct QuintileFit {
  Quintile label = Quintile::Q1;
  FitReport<ModelParams> model;  // rmse and n_samples refer to follower trajectories
  FitReport<ModelParams> gain;
  FitReport<ModelParams> loss;
  ProxyFit proxy;
  std::size_t skipped_gain_rows = 0;
  bool low_confidence = false;  // Q4 and Q5
};

/// Summaries per user from their windows: followers at the end of the last
/// window and total tweets.
std::vector<UserSummary> summarize_users(std::span<const UserWindow> windows);

/// Fits one quintile from its members' windows. Throws DegenerateData.
QuintileFit fit_quintile(Quintile label, std::span<const UserWindow> windows,
                         std::int64_t population);

}  // namespace attn
