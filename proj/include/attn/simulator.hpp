#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "attn/model.hpp"

// Seeded agent-based simulation: each step every user tweets, receives
// retweets and mentions through the proxy models, then gains followers from
// the pool of non-followers and loses existing ones by binomial draws.
namespace attn {

struct LogNormalSpec {
  double mu = 1.0;
  double sigma = 1.0;
};

struct ParetoSpec {
  double shape = 1.16;
  double scale = 10.0;
};

struct SimConfig {
  std::int64_t n_users = 2000;
  std::int64_t n_steps = 50;
  std::uint64_t seed = 1;
  /// Parameters per class; params.N is ignored (n_users is the population).
  std::map<Quintile, ModelParams> class_params;
  LogNormalSpec activity;
  ParetoSpec initial_followers;
  ProxyParams proxy;

  /// Throws BadConfig.
  void validate() const;
  const ModelParams& params_for(Quintile q) const;
};

struct StepMetrics {
  std::int64_t step = 0;
  double gini_followers = 0.0;  // NaN when every user has zero followers
  double top01_share = 0.0;
  double top20_share = 0.0;
  double mean_followers = 0.0;
};

struct SimState {
  std::int64_t step = 0;
  std::vector<std::int64_t> followers;  // each in [0, n_users - 1]
  std::vector<Quintile> classes;
  std::vector<double> tweets;    // cumulative
  std::vector<double> retweets;  // cumulative
  std::vector<double> mentions;  // cumulative
  std::vector<StepMetrics> metrics;
};

/// Stream index `b` reserved for the initial follower draw.
inline constexpr std::uint64_t kInitStream = ~std::uint64_t{0};

StepMetrics summarize_followers(std::int64_t step, const std::vector<std::int64_t>& followers);

/// Draws initial followers (truncated Pareto, floored) and assigns classes by
/// follower rank exactly as assign_quintiles does.
SimState init_population(const SimConfig& cfg);

/// One step with the per-user loop parallelised by OpenMP.
void step(SimState& state, const SimConfig& cfg);
/// Single-threaded reference for step; produces identical state.
void step_serial(SimState& state, const SimConfig& cfg);

SimState run(const SimConfig& cfg);
SimState run_serial(const SimConfig& cfg);

/// Reference setup: 2000 users, 50 steps, Table 3 Q1 dynamics for every class.
SimConfig reference_sim_config(std::uint64_t seed);

/// JSON config. `class_params` maps Q1..Q5 (or "default") to parameter
/// objects without N; missing classes fall back to "default".
SimConfig sim_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SimConfig& cfg);

std::string metrics_to_csv(const std::vector<StepMetrics>& metrics);
std::string users_to_csv(const SimState& state);

}  // namespace attn
