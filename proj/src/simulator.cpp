#include "attn/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "attn/error.hpp"
#include "attn/fitting.hpp"
#include "attn/inequality.hpp"
#include "attn/params_io.hpp"
#include "attn/random.hpp"

namespace attn {

void SimConfig::validate() const {
  if (n_users < 5) throw Error(ErrorCode::BadConfig, "n_users must be >= 5");
  if (n_steps < 0) throw Error(ErrorCode::BadConfig, "n_steps must be >= 0");
  if (!(activity.sigma >= 0.0) || !std::isfinite(activity.mu) || !std::isfinite(activity.sigma)) {
    throw Error(ErrorCode::BadConfig, "activity model needs finite mu and sigma >= 0");
  }
  if (!(initial_followers.shape > 0.0) || !(initial_followers.scale > 0.0) ||
      initial_followers.scale > static_cast<double>(n_users - 1)) {
    throw Error(ErrorCode::BadConfig, "initial followers need shape > 0 and 0 < scale <= n_users - 1");
  }
  for (int q = 1; q <= 5; ++q) (void)params_for(static_cast<Quintile>(q));
  for (const auto& [label, params] : class_params) {
    for (double v : {params.alpha, params.beta, params.theta, params.w1, params.w2, params.w3}) {
      if (!std::isfinite(v)) throw Error(ErrorCode::BadConfig, "non-finite class parameter");
    }
  }
  for (double v : {proxy.a, proxy.b, proxy.c, proxy.d, proxy.a_m, proxy.b_m}) {
    if (!std::isfinite(v)) throw Error(ErrorCode::BadConfig, "non-finite proxy parameter");
  }
  try {
    (void)mention_count(proxy, static_cast<double>(n_users - 1));
  } catch (const Error&) {
    throw Error(ErrorCode::BadConfig, "mention proxy overflows within the population range");
  }
}

const ModelParams& SimConfig::params_for(Quintile q) const {
  auto it = class_params.find(q);
  if (it == class_params.end()) {
    throw Error(ErrorCode::BadConfig, "no parameters for class " + std::string(to_string(q)));
  }
  return it->second;
}

StepMetrics summarize_followers(std::int64_t step, const std::vector<std::int64_t>& followers) {
  StepMetrics m;
  m.step = step;
  std::vector<double> values(followers.begin(), followers.end());
  const long double total = std::accumulate(values.begin(), values.end(), 0.0L);
  m.mean_followers = static_cast<double>(total / static_cast<long double>(values.size()));
  if (total > 0.0L) {
    m.gini_followers = gini(values);
    m.top01_share = top_share(values, 0.01);
    m.top20_share = top_share(values, 0.20);
  } else {
    m.gini_followers = std::numeric_limits<double>::quiet_NaN();
    m.top01_share = std::numeric_limits<double>::quiet_NaN();
    m.top20_share = std::numeric_limits<double>::quiet_NaN();
  }
  return m;
}

SimState init_population(const SimConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_users);
  const double cap = static_cast<double>(cfg.n_users - 1);

  SimState state;
  state.followers.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng = Rng::stream(cfg.seed, i, kInitStream);
    const double x = rng.truncated_pareto(cfg.initial_followers.shape, cfg.initial_followers.scale, cap);
    state.followers[i] = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(x)), 0, cfg.n_users - 1);
  }

  std::vector<UserSummary> summaries(n);
  for (std::size_t i = 0; i < n; ++i) summaries[i] = {i, static_cast<double>(state.followers[i]), 0.0};
  const QuintileTable table = assign_quintiles(summaries);
  state.classes.resize(n);
  for (const auto& cls : table.classes) {
    for (UserId id : cls.members) state.classes[id] = cls.label;
  }

  state.tweets.assign(n, 0.0);
  state.retweets.assign(n, 0.0);
  state.mentions.assign(n, 0.0);
  state.metrics.push_back(summarize_followers(0, state.followers));
  return state;
}

namespace {

struct UserUpdate {
  std::int64_t followers;
  double p;
  double r;
  double m;
};

UserUpdate advance_user(const SimState& state, const SimConfig& cfg, std::size_t i) {
  Rng rng = Rng::stream(cfg.seed, i, static_cast<std::uint64_t>(state.step));
  const std::int64_t f = state.followers[i];
  const auto fd = static_cast<double>(f);

  AttentionState att;
  att.f0 = fd;
  att.p = rng.lognormal(cfg.activity.mu, cfg.activity.sigma);
  att.r = retweet_count(cfg.proxy, fd, att.p);
  att.m = mention_count(cfg.proxy, fd);

  const ModelParams& params = cfg.params_for(state.classes[i]);
  const double gain = gain_probability(params, att);
  const double loss = loss_probability(params, att);
  const std::int64_t gains = rng.binomial(cfg.n_users - 1 - f, gain);
  const std::int64_t losses = rng.binomial(f, loss);
  return {f + gains - losses, att.p, att.r, att.m};
}

void apply(SimState& state, std::size_t i, const UserUpdate& u) {
  state.followers[i] = u.followers;
  state.tweets[i] += u.p;
  state.retweets[i] += u.r;
  state.mentions[i] += u.m;
}

void finish_step(SimState& state, std::vector<std::int64_t>&& next) {
  state.followers = std::move(next);
  ++state.step;
  state.metrics.push_back(summarize_followers(state.step, state.followers));
}

}  // namespace

void step(SimState& state, const SimConfig& cfg) {
  const auto n = static_cast<std::int64_t>(state.followers.size());
  std::vector<UserUpdate> updates(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    updates[static_cast<std::size_t>(i)] = advance_user(state, cfg, static_cast<std::size_t>(i));
  }
  std::vector<std::int64_t> next(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < updates.size(); ++i) {
    apply(state, i, updates[i]);
    next[i] = updates[i].followers;
  }
  finish_step(state, std::move(next));
}

void step_serial(SimState& state, const SimConfig& cfg) {
  const std::size_t n = state.followers.size();
  std::vector<UserUpdate> updates(n);
  for (std::size_t i = 0; i < n; ++i) updates[i] = advance_user(state, cfg, i);
  std::vector<std::int64_t> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    apply(state, i, updates[i]);
    next[i] = updates[i].followers;
  }
  finish_step(state, std::move(next));
}

SimState run(const SimConfig& cfg) {
  SimState state = init_population(cfg);
  for (std::int64_t s = 0; s < cfg.n_steps; ++s) step(state, cfg);
  return state;
}

SimState run_serial(const SimConfig& cfg) {
  SimState state = init_population(cfg);
  for (std::int64_t s = 0; s < cfg.n_steps; ++s) step_serial(state, cfg);
  return state;
}

SimConfig reference_sim_config(std::uint64_t seed) {
  SimConfig cfg;
  cfg.n_users = 2000;
  cfg.n_steps = 50;
  cfg.seed = seed;
  for (int q = 1; q <= 5; ++q) {
    ModelParams p = table3_params(Quintile::Q1, cfg.n_users);
    p.quintile = static_cast<Quintile>(q);
    cfg.class_params[p.quintile] = p;
  }
  cfg.activity = {1.0, 1.0};
  cfg.initial_followers = {1.16, 10.0};
  cfg.proxy = {1e-5, 2.0, 0.0, 1.0, 0.05, 0.002};
  return cfg;
}

namespace {

ModelParams class_params_from_json(const nlohmann::json& j, Quintile q, std::int64_t n_users) {
  nlohmann::json copy = j;
  copy["N"] = n_users;
  copy["quintile"] = std::string(to_string(q));
  if (!copy.contains("C")) copy["C"] = 0.0;
  return copy.get<ModelParams>();
}

}  // namespace

SimConfig sim_config_from_json(const nlohmann::json& j) {
  SimConfig cfg;
  try {
    cfg.n_users = j.at("n_users").get<std::int64_t>();
    cfg.n_steps = j.at("n_steps").get<std::int64_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    const auto& act = j.at("activity");
    cfg.activity = {act.at("mu").get<double>(), act.at("sigma").get<double>()};
    const auto& init = j.at("initial_followers");
    cfg.initial_followers = {init.at("shape").get<double>(), init.at("scale").get<double>()};
    cfg.proxy = j.at("proxy").get<ProxyParams>();
    const auto& classes = j.at("class_params");
    for (int qi = 1; qi <= 5; ++qi) {
      const auto q = static_cast<Quintile>(qi);
      const std::string label(to_string(q));
      if (classes.contains(label)) {
        cfg.class_params[q] = class_params_from_json(classes.at(label), q, cfg.n_users);
      } else if (classes.contains("default")) {
        cfg.class_params[q] = class_params_from_json(classes.at("default"), q, cfg.n_users);
      }
    }
    for (const auto& [key, value] : classes.items()) {
      if (key != "default" && !parse_quintile(key)) throw Error(ErrorCode::BadConfig, "unknown class " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadConfig, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadConfig) throw;
    throw Error(ErrorCode::BadConfig, e.what());
  }
  cfg.validate();
  return cfg;
}

nlohmann::json to_json(const SimConfig& cfg) {
  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [q, p] : cfg.class_params) {
    nlohmann::json pj = p;
    pj.erase("N");
    pj.erase("quintile");
    classes[std::string(to_string(q))] = pj;
  }
  return nlohmann::json{
      {"n_users", cfg.n_users},
      {"n_steps", cfg.n_steps},
      {"seed", cfg.seed},
      {"class_params", classes},
      {"activity", {{"mu", cfg.activity.mu}, {"sigma", cfg.activity.sigma}}},
      {"initial_followers", {{"shape", cfg.initial_followers.shape}, {"scale", cfg.initial_followers.scale}}},
      {"proxy", cfg.proxy},
  };
}

std::string metrics_to_csv(const std::vector<StepMetrics>& metrics) {
  std::string out = "step,gini_followers,top01_share,top20_share,mean_f\n";
  for (const auto& m : metrics) {
    out += std::to_string(m.step);
    for (double v : {m.gini_followers, m.top01_share, m.top20_share, m.mean_followers}) {
      out += ',';
      out += format_csv(v);
    }
    out += '\n';
  }
  return out;
}

std::string users_to_csv(const SimState& state) {
  std::string out = "user,f,class,tweets,retweets,mentions\n";
  for (std::size_t i = 0; i < state.followers.size(); ++i) {
    out += std::to_string(i) + ',' + std::to_string(state.followers[i]) + ',' +
           std::string(to_string(state.classes[i])) + ',' + format_csv(state.tweets[i]) + ',' +
           format_csv(state.retweets[i]) + ',' + format_csv(state.mentions[i]) + '\n';
  }
  return out;
}

}  // namespace attn
