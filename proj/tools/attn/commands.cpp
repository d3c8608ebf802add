#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "attn/error.hpp"
#include "attn/fitting.hpp"
#include "attn/inequality.hpp"
#include "attn/ingest.hpp"
#include "attn/model.hpp"
#include "attn/params_io.hpp"
#include "attn/simulator.hpp"
#include "attn/synthetic.hpp"
#include "output.hpp"

namespace attn::cli {

namespace {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::BadAction:
    case ErrorCode::TimestampBeforeOrigin:
    case ErrorCode::BadConfig:
    case ErrorCode::BadStep:
    case ErrorCode::LengthMismatch:
      return kInputError;
    case ErrorCode::NonFiniteResult:
      return kNumericFailure;
    default:
      return kDegenerateData;
  }
}

// Runs a command body, mapping library errors onto exit codes.
template <class Body>
int guarded(const char* command, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    spdlog::error("{}: {}", command, e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    spdlog::error("{}: {}", command, e.what());
    return kInputError;
  }
}

// Parse errors are reported with the file they came from.
template <class Fn>
auto parse_named(const std::filesystem::path& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message(), e.line());
  }
}

std::string lorenz_csv(const LorenzCurve& curve) {
  std::string out = "pop_frac,value_frac\n";
  for (const auto& p : curve) out += format_csv(p.population_fraction) + ',' + format_csv(p.value_fraction) + '\n';
  return out;
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
  std::string out = "bin_lo,bin_hi,count,density\n";
  for (const auto& b : bins) {
    out += format_csv(b.lower) + ',' + format_csv(b.upper) + ',' + std::to_string(b.count) + ',' +
           format_csv(b.density) + '\n';
  }
  return out;
}

// Gini when defined, otherwise an empty CSV cell.
std::string gini_cell(const std::vector<double>& values) {
  const bool any = std::any_of(values.begin(), values.end(), [](double v) { return v > 0.0; });
  return any ? format_csv(gini(values)) : std::string();
}

constexpr double kReportFractions[] = {0.01, 0.2};

}  // namespace

void configure_logging() {
  if (!spdlog::get("attn")) spdlog::set_default_logger(spdlog::stderr_color_mt("attn"));
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("ATTN_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

int cmd_analyze(const AnalyzeOptions& opts) {
  return guarded("analyze", [&] {
    RunManifest manifest("analyze");
    const std::string edge_bytes = manifest.read(opts.edges);
    const std::string activity_bytes = manifest.read(opts.activity);
    std::string snapshot_bytes;
    if (opts.snapshot) snapshot_bytes = manifest.read(*opts.snapshot);

    std::istringstream edge_in(edge_bytes), activity_in(activity_bytes), snapshot_in(snapshot_bytes);
    const EdgeLog edges = parse_named(opts.edges, [&] { return parse_temporal_edges(edge_in); });
    const auto activity = parse_named(opts.activity, [&] { return parse_activity_log(activity_in); });
    std::vector<SnapshotRow> snapshot;
    if (opts.snapshot) snapshot = parse_named(*opts.snapshot, [&] { return parse_snapshot(snapshot_in); });
    if (edges.duplicate_creates + edges.orphan_deletes > 0) {
      spdlog::warn("edge log: dropped {} duplicate creates and {} deletes of inactive edges",
                   edges.duplicate_creates, edges.orphan_deletes);
    }

    WindowingConfig windowing;
    windowing.window_seconds = opts.window_seconds;
    if (opts.t0) {
      windowing.t0 = *opts.t0;
    } else {
      std::int64_t t0 = std::numeric_limits<std::int64_t>::max();
      for (const auto& e : edges.edges) t0 = std::min(t0, e.timestamp);
      for (const auto& a : activity) t0 = std::min(t0, a.timestamp);
      windowing.t0 = t0 == std::numeric_limits<std::int64_t>::max() ? 0 : t0;
    }
    const WindowPanel panel = build_windows(edges, activity, windowing, snapshot);
    if (panel.users.empty()) throw Error(ErrorCode::EmptySample, "no users in the input");

    const std::size_t n_users = panel.users.size();
    std::map<std::string, std::vector<double>> metrics;
    auto& followers = metrics["followers"] = panel.final_followers;
    auto& retweets = metrics["retweets"] = std::vector<double>(n_users, 0.0);
    auto& mentions = metrics["mentions"] = std::vector<double>(n_users, 0.0);
    metrics["friends"] = panel.final_friends;
    auto& tweets = metrics["tweets"] = std::vector<double>(n_users, 0.0);
    for (std::size_t u = 0; u < n_users; ++u) {
      for (std::size_t k = 0; k < panel.n_windows; ++k) {
        const auto& w = panel.at(u, k);
        retweets[u] += w.r;
        mentions[u] += w.m;
        tweets[u] += w.p;
      }
    }

    OutputSet outputs(opts.out_dir);
    json report{{"users", n_users},
                {"windows", panel.n_windows},
                {"window_seconds", windowing.window_seconds},
                {"t0", windowing.t0},
                {"edge_log",
                 {{"rows", edges.rows},
                  {"duplicate_creates", edges.duplicate_creates},
                  {"orphan_deletes", edges.orphan_deletes}}}};
    for (const auto& [name, values] : metrics) {
      if (std::none_of(values.begin(), values.end(), [](double v) { return v > 0.0; })) {
        spdlog::warn("analyze: {} are all zero; Gini undefined", name);
        report["metrics"][name] = {{"gini", nullptr}, {"top_shares", json::object()}};
        continue;
      }
      const InequalityReport r = inequality_report(values, kReportFractions);
      json shares = json::object();
      for (const auto& [fraction, share] : r.top_shares) shares[format_shortest(fraction)] = share;
      report["metrics"][name] = {{"gini", r.gini}, {"top_shares", shares}};
      outputs.add("lorenz_" + name + ".csv", lorenz_csv(r.lorenz));
    }
    outputs.add("hist_followers.csv", histogram_csv(log_bin(followers, 2.0)));

    std::vector<UserSummary> summaries(n_users);
    for (std::size_t u = 0; u < n_users; ++u) {
      summaries[u] = {panel.users[u], followers[u], panel.statuses[u] + tweets[u]};
    }
    if (n_users >= 5) {
      const QuintileTable table = assign_quintiles(summaries);
      for (const auto& cls : table.classes) {
        report["quintiles"].push_back({{"quintile", std::string(to_string(cls.label))},
                                       {"size", cls.members.size()},
                                       {"mean_followers", cls.mean_followers},
                                       {"mean_statuses", cls.mean_statuses}});
      }
    }
    outputs.add("inequality_report.json", report.dump(2) + "\n");

    std::string series = "window,gini_followers,gini_retweets,gini_mentions\n";
    for (std::size_t k = 0; k < panel.n_windows; ++k) {
      std::vector<double> f(n_users), r(n_users), m(n_users);
      for (std::size_t u = 0; u < n_users; ++u) {
        const auto& w = panel.at(u, k);
        f[u] = std::max(0.0, w.f_start + w.gained - w.lost);
        r[u] = w.r;
        m[u] = w.m;
      }
      series += std::to_string(k) + ',' + gini_cell(f) + ',' + gini_cell(r) + ',' + gini_cell(m) + '\n';
    }
    outputs.add("gini_series.csv", series);
    outputs.add("windows.csv", windows_to_csv(panel.windows));

    manifest.set_config({{"edges", opts.edges.string()},
                         {"activity", opts.activity.string()},
                         {"snapshot", opts.snapshot ? opts.snapshot->string() : ""},
                         {"window_seconds", windowing.window_seconds},
                         {"t0", windowing.t0}});
    manifest.finish(outputs);
    outputs.commit();
    return static_cast<int>(kOk);
  });
}

int cmd_fit(const FitOptions& opts) {
  return guarded("fit", [&] {
    RunManifest manifest("fit");
    const std::string bytes = manifest.read(opts.windows);
    std::istringstream in(bytes);
    const auto windows = parse_named(opts.windows, [&] { return parse_windows_csv(in); });
    if (opts.population < 1) throw Error(ErrorCode::BadConfig, "--population-n must be >= 1");
    for (const auto& w : windows) {
      if (w.f_start >= static_cast<double>(opts.population)) {
        throw Error(ErrorCode::BadConfig, "population N must exceed every f_start");
      }
    }

    const auto summaries = summarize_users(windows);
    const QuintileTable table = assign_quintiles(summaries);

    OutputSet outputs(opts.out_dir);
    std::string summary = "quintile,rmse,n_samples,converged\n";
    int status = kOk;
    for (const auto& cls : table.classes) {
      const std::string label(to_string(cls.label));
      const std::set<UserId> ids(cls.members.begin(), cls.members.end());
      std::vector<UserWindow> members;
      for (const auto& w : windows) {
        if (ids.contains(w.user_id)) members.push_back(w);
      }
      try {
        const QuintileFit fit = fit_quintile(cls.label, members, opts.population);
        json j{{"quintile", label},
               {"params", fit.model.params},
               {"proxy", fit.proxy.combined()},
               {"fit",
                {{"rmse", fit.model.rmse},
                 {"n_samples", fit.model.n_samples},
                 {"converged", fit.model.converged},
                 {"low_confidence", fit.low_confidence},
                 {"gain_rmse", fit.gain.rmse},
                 {"gain_samples", fit.gain.n_samples},
                 {"loss_rmse", fit.loss.rmse},
                 {"loss_samples", fit.loss.n_samples},
                 {"retweet_proxy_rmse", fit.proxy.retweet.rmse},
                 {"mention_proxy_rmse", fit.proxy.mention.rmse},
                 {"mention_windows_excluded", fit.proxy.mention_excluded},
                 {"skipped_gain_rows", fit.skipped_gain_rows}}}};
        outputs.add("params_" + label + ".json", j.dump(2) + "\n");
        summary += label + ',' + format_csv(fit.model.rmse) + ',' + std::to_string(fit.model.n_samples) + ',' +
                   (fit.model.converged ? "true" : "false") + '\n';
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateData) throw;
        spdlog::error("fit {}: {}", label, e.what());
        summary += label + ",nan,0,false\n";
        status = kDegenerateData;
      }
    }
    outputs.add("fit_summary.csv", summary);
    manifest.set_config({{"windows", opts.windows.string()}, {"population_n", opts.population}});
    manifest.finish(outputs);
    outputs.commit();
    return status;
  });
}

int cmd_predict(const PredictOptions& opts) {
  return guarded("predict", [&] {
    if (opts.mode != "closed" && opts.mode != "ode") throw Error(ErrorCode::BadConfig, "--mode must be closed or ode");
    if (opts.horizon < 0) throw Error(ErrorCode::BadConfig, "--horizon must be >= 0");
    RunManifest manifest("predict");
    const std::string param_bytes = manifest.read(opts.params);
    const std::string state_bytes = manifest.read(opts.state);
    const ModelParams params = parse_named(opts.params, [&] { return load_model_params(param_bytes); });

    struct UserState {
      UserId id;
      AttentionState state;
    };
    std::vector<UserState> users = parse_named(opts.state, [&] {
      std::istringstream in(state_bytes);
      std::vector<UserState> out;
      std::string line;
      std::getline(in, line);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line != "user_id,f0,r,m,p") throw Error(ErrorCode::ParseError, "expected header 'user_id,f0,r,m,p'", 1);
      std::size_t line_no = 1;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields;
        std::stringstream row(line);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 5) throw Error(ErrorCode::ParseError, "expected 5 fields", line_no);
        UserState u;
        const double id = parse_double(fields[0], line_no);
        if (id < 0 || id != std::floor(id)) throw Error(ErrorCode::ParseError, "bad user_id", line_no);
        u.id = static_cast<UserId>(id);
        u.state = {parse_double(fields[1], line_no), parse_double(fields[2], line_no),
                   parse_double(fields[3], line_no), parse_double(fields[4], line_no)};
        if (!(u.state.f0 >= 0 && u.state.r >= 0 && u.state.m >= 0 && u.state.p >= 0)) {
          throw Error(ErrorCode::ParseError, "state values must be >= 0", line_no);
        }
        out.push_back(u);
      }
      return out;
    });
    if (users.empty()) throw Error(ErrorCode::EmptyInput, "no user states");

    const auto steps = static_cast<std::size_t>(opts.horizon);
    std::vector<std::vector<double>> f(users.size(), std::vector<double>(steps + 1));
    for (std::size_t i = 0; i < users.size(); ++i) {
      try {
        if (opts.mode == "closed") {
          for (std::size_t t = 0; t <= steps; ++t) {
            f[i][t] = follower_trajectory_closed(params, users[i].state, static_cast<double>(t)).f;
          }
        } else {
          AttentionState s = users[i].state;
          f[i][0] = s.f0;
          for (std::size_t t = 1; t <= steps; ++t) {
            s.f0 = follower_trajectory_ode(params, s, 1.0, opts.dt).back().f;
            f[i][t] = s.f0;
          }
        }
      } catch (const Error& e) {
        throw Error(e.code(), "user " + std::to_string(users[i].id) + ": " + e.message());
      }
    }

    std::string traj = "user,t,f\n";
    for (std::size_t i = 0; i < users.size(); ++i) {
      for (std::size_t t = 0; t <= steps; ++t) {
        traj += std::to_string(users[i].id) + ',' + std::to_string(t) + ',' + format_csv(f[i][t]) + '\n';
      }
    }
    std::string ginis = "t,gini\n";
    for (std::size_t t = 0; t <= steps; ++t) {
      std::vector<double> column(users.size());
      // Negative closed-form values are shown as zero followers.
      for (std::size_t i = 0; i < users.size(); ++i) column[i] = std::max(0.0, f[i][t]);
      ginis += std::to_string(t) + ',' + (gini_cell(column).empty() ? "nan" : gini_cell(column)) + '\n';
    }

    OutputSet outputs(opts.out_dir);
    outputs.add("trajectories.csv", traj);
    outputs.add("predicted_gini.csv", ginis);
    manifest.set_config({{"params", opts.params.string()},
                         {"state", opts.state.string()},
                         {"horizon", opts.horizon},
                         {"mode", opts.mode},
                         {"dt", opts.dt},
                         {"model", params}});
    manifest.finish(outputs);
    outputs.commit();
    return static_cast<int>(kOk);
  });
}

int cmd_simulate(const SimulateOptions& opts) {
  return guarded("simulate", [&] {
    RunManifest manifest("simulate");
    const std::string bytes = manifest.read(opts.config);
    SimConfig cfg = parse_named(opts.config, [&] {
      json j;
      try {
        j = json::parse(bytes);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::BadConfig, e.what());
      }
      if (opts.seed) j["seed"] = *opts.seed;
      return sim_config_from_json(j);
    });
    const SimState state = run(cfg);
    OutputSet outputs(opts.out_dir);
    outputs.add("sim_metrics.csv", metrics_to_csv(state.metrics));
    outputs.add("sim_users.csv", users_to_csv(state));
    manifest.set_config(to_json(cfg));
    manifest.finish(outputs);
    outputs.commit();
    return static_cast<int>(kOk);
  });
}

int cmd_generate(const GenerateOptions& opts) {
  return guarded("generate", [&] {
    RunManifest manifest("generate");
    const SyntheticDataset data = generate_calibrated_dataset(opts.seed, opts.users, opts.edge_events);
    OutputSet outputs(opts.out_dir);
    outputs.add("snapshot.csv", snapshot_to_csv(data.snapshot));
    outputs.add("edges.csv", edges_to_csv(data.edges));
    outputs.add("activity.csv", activity_to_csv(data.activity));
    json config{{"seed", opts.seed}, {"users", opts.users}, {"edge_events", opts.edge_events}};
    if (opts.windows_quintile) {
      const auto q = parse_quintile(*opts.windows_quintile);
      if (!q) throw Error(ErrorCode::BadConfig, "unknown quintile " + *opts.windows_quintile);
      if (opts.population < 1) throw Error(ErrorCode::BadConfig, "--population-n is required with --windows-from");
      WindowSynthesis spec;
      spec.params = table3_params(*q, opts.population);
      spec.n_users = opts.window_users;
      spec.n_windows = opts.windows_per_user;
      spec.seed = opts.seed;
      spec.noise = opts.noise;
      outputs.add("windows.csv", windows_to_csv(synthesize_windows(spec)));
      config["windows_from"] = *opts.windows_quintile;
      config["population_n"] = opts.population;
      config["noise"] = opts.noise;
    }
    manifest.set_config(config);
    manifest.finish(outputs);
    outputs.commit();
    return static_cast<int>(kOk);
  });
}

}  // namespace attn::cli
