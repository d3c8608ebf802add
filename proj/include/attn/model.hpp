#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Follower-dynamics model: gain/loss probabilities, the closed-form follower
// trajectory, an RK4 integration of the rate equations, and the retweet and
// mention proxy models. Time is measured in model units (4 days by default).
namespace attn {

enum class Quintile { Q1 = 1, Q2, Q3, Q4, Q5 };

std::string_view to_string(Quintile q);
std::optional<Quintile> parse_quintile(std::string_view text);

/// One quintile's fitted constants plus the population size N.
/// w3 and C may be negative; probabilities are clamped where they are used.
struct ModelParams {
  double alpha = 0.0;
  double beta = 0.0;
  double theta = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double w3 = 0.0;
  double C = 0.0;
  std::int64_t N = 1;
  Quintile quintile = Quintile::Q1;

  bool operator==(const ModelParams&) const = default;
};

/// Per-user activity held constant over a trajectory horizon.
struct AttentionState {
  double f0 = 0.0;  // followers at t = 0
  double r = 0.0;   // retweets received per period
  double m = 0.0;   // mentions received per period
  double p = 0.0;   // tweets per period
};

/// Coefficients of r = a f^b + c p^d and m = a_m e^(b_m f).
struct ProxyParams {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double a_m = 0.0;
  double b_m = 0.0;

  bool operator==(const ProxyParams&) const = default;
};

struct TrajectoryPoint {
  double t;
  double f;
};

/// Smallest retweet count used inside r^(-theta); caps the loss term at w3.
inline constexpr double kMinEffectiveRetweets = 1.0;

/// Seconds in one model time unit.
inline constexpr std::int64_t kDefaultTimeUnitSeconds = 4 * 24 * 3600;

/// x^e with 0^e = 0 for e > 0 and 0^0 = 1.
double safe_pow(double x, double e);

/// Table 3 parameter rows for the top three quintiles, with the given N.
ModelParams table3_params(Quintile q, std::int64_t population);

/// w1 r^alpha + w2 m^beta before clamping.
double raw_gain(const ModelParams& params, double r, double m);
/// w3 max(r, 1)^(-theta) before clamping.
double raw_loss(const ModelParams& params, double r);

double gain_probability(const ModelParams& params, const AttentionState& state);
double loss_probability(const ModelParams& params, const AttentionState& state);

/// f(t) = f0 + C e^(b t) - C e^(w3 r_eff^(-theta) t) - b N t with
/// b = -(w1 r^alpha + w2 m^beta), evaluated as written (no clamping).
/// Throws NonFiniteResult on overflow.
TrajectoryPoint follower_trajectory_closed(const ModelParams& params,
                                           const AttentionState& state, double t);

/// Analytic df/dt of the closed form at time t.
double follower_trajectory_closed_slope(const ModelParams& params,
                                        const AttentionState& state, double t);

/// Fixed-step RK4 on df/dt = (N - f) P+ - f P- with clamped probabilities.
/// Returns points at t = 0, dt, 2 dt, ..., with a shortened final step landing
/// on t_end. Throws BadStep for dt <= 0 and BadConfig for f0 outside [0, N].
std::vector<TrajectoryPoint> follower_trajectory_ode(const ModelParams& params,
                                                     const AttentionState& state,
                                                     double t_end, double dt);

double retweet_count(const ProxyParams& proxy, double f, double p);
/// Throws NonFiniteResult when e^(b_m f) overflows.
double mention_count(const ProxyParams& proxy, double f);

}  // namespace attn
