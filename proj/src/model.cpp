#include "attn/model.hpp"

#include <algorithm>
#include <cmath>

#include "attn/error.hpp"

namespace attn {

std::string_view to_string(Quintile q) {
  switch (q) {
    case Quintile::Q1: return "Q1";
    case Quintile::Q2: return "Q2";
    case Quintile::Q3: return "Q3";
    case Quintile::Q4: return "Q4";
    case Quintile::Q5: return "Q5";
  }
  return "Q?";
}

std::optional<Quintile> parse_quintile(std::string_view text) {
  if (text.size() != 2 || (text[0] != 'Q' && text[0] != 'q')) return std::nullopt;
  if (text[1] < '1' || text[1] > '5') return std::nullopt;
  return static_cast<Quintile>(text[1] - '0');
}

double safe_pow(double x, double e) {
  if (x == 0.0) return e == 0.0 ? 1.0 : (e > 0.0 ? 0.0 : HUGE_VAL);
  return std::pow(x, e);
}

ModelParams table3_params(Quintile q, std::int64_t population) {
  ModelParams p;
  p.N = population;
  p.quintile = q;
  switch (q) {
    case Quintile::Q1:
      p.alpha = 0.634; p.beta = 0.865; p.theta = 0.129;
      p.w1 = 0.00215; p.w2 = 0.00038; p.w3 = 0.00836; p.C = 8546;
      break;
    case Quintile::Q2:
      p.alpha = 1.0145; p.beta = 0.0; p.theta = -0.730;
      p.w1 = 0.0; p.w2 = 0.00030; p.w3 = -0.00135; p.C = 754;
      break;
    case Quintile::Q3:
      p.alpha = 0.448; p.beta = 1.141; p.theta = -0.020;
      p.w1 = 0.00006; p.w2 = 0.0; p.w3 = -300.0; p.C = -9;
      break;
    default:
      throw Error(ErrorCode::BadConfig, "no published parameters for " + std::string(to_string(q)));
  }
  return p;
}

double raw_gain(const ModelParams& params, double r, double m) {
  return params.w1 * safe_pow(r, params.alpha) + params.w2 * safe_pow(m, params.beta);
}

double raw_loss(const ModelParams& params, double r) {
  return params.w3 * std::pow(std::max(r, kMinEffectiveRetweets), -params.theta);
}

static double clamp_probability(double p) {
  if (std::isnan(p)) return 0.0;
  return std::clamp(p, 0.0, 1.0);
}

double gain_probability(const ModelParams& params, const AttentionState& state) {
  return clamp_probability(raw_gain(params, state.r, state.m));
}

double loss_probability(const ModelParams& params, const AttentionState& state) {
  return clamp_probability(raw_loss(params, state.r));
}

TrajectoryPoint follower_trajectory_closed(const ModelParams& params,
                                           const AttentionState& state, double t) {
  const double b = -raw_gain(params, state.r, state.m);
  const double loss_rate = raw_loss(params, state.r);
  const auto n = static_cast<double>(params.N);
  // Grouping the exponentials keeps f(0) = f0 exact for any C.
  const double f = state.f0 + params.C * (std::exp(b * t) - std::exp(loss_rate * t)) - b * n * t;
  if (!std::isfinite(f)) {
    throw Error(ErrorCode::NonFiniteResult, "closed-form trajectory overflowed at t=" + std::to_string(t));
  }
  return {t, f};
}

double follower_trajectory_closed_slope(const ModelParams& params,
                                        const AttentionState& state, double t) {
  const double b = -raw_gain(params, state.r, state.m);
  const double loss_rate = raw_loss(params, state.r);
  return params.C * b * std::exp(b * t) - params.C * loss_rate * std::exp(loss_rate * t) -
         b * static_cast<double>(params.N);
}

std::vector<TrajectoryPoint> follower_trajectory_ode(const ModelParams& params,
                                                     const AttentionState& state,
                                                     double t_end, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::BadStep, "dt must be positive");
  if (!(t_end >= 0.0)) throw Error(ErrorCode::BadStep, "t_end must be >= 0");
  const auto n = static_cast<double>(params.N);
  if (!(state.f0 >= 0.0 && state.f0 <= n)) {
    throw Error(ErrorCode::BadConfig, "f0 must lie in [0, N]");
  }

  const double gain = gain_probability(params, state);
  const double loss = loss_probability(params, state);
  auto rate = [&](double f) { return (n - f) * gain - f * loss; };

  std::vector<TrajectoryPoint> out;
  out.reserve(static_cast<std::size_t>(std::ceil(t_end / dt)) + 1);
  double t = 0.0;
  double f = state.f0;
  out.push_back({t, f});
  std::size_t k = 0;
  while (t < t_end) {
    const double next_t = std::min(static_cast<double>(k + 1) * dt, t_end);
    const double h = next_t - t;
    const double k1 = rate(f);
    const double k2 = rate(f + 0.5 * h * k1);
    const double k3 = rate(f + 0.5 * h * k2);
    const double k4 = rate(f + h * k3);
    f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // The flow points inward at 0 and N; this only absorbs rounding.
    f = std::clamp(f, 0.0, n);
    t = next_t;
    ++k;
    out.push_back({t, f});
  }
  return out;
}

double retweet_count(const ProxyParams& proxy, double f, double p) {
  return proxy.a * safe_pow(f, proxy.b) + proxy.c * safe_pow(p, proxy.d);
}

double mention_count(const ProxyParams& proxy, double f) {
  const double m = proxy.a_m * std::exp(proxy.b_m * f);
  if (!std::isfinite(m)) throw Error(ErrorCode::NonFiniteResult, "mention model overflowed");
  return m;
}

}  // namespace attn
