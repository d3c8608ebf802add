#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace attn::cli;
  configure_logging();

  CLI::App app{"attn: attention inequality analysis, model fitting, prediction and simulation"};
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  auto* a = app.add_subcommand("analyze", "Inequality report from edge and activity logs");
  a->add_option("--edges", analyze.edges, "src,dst,action,timestamp CSV")->required();
  a->add_option("--activity", analyze.activity, "user_id,timestamp,kind,count CSV")->required();
  a->add_option("--snapshot", analyze.snapshot, "user_id,followers,friends,statuses CSV");
  a->add_option("--window-seconds", analyze.window_seconds, "Window length")->capture_default_str();
  a->add_option("--t0", analyze.t0, "Origin of window 0 (default: earliest event)");
  a->add_option("--out", analyze.out_dir, "Output directory")->required();

  FitOptions fit;
  auto* f = app.add_subcommand("fit", "Per-quintile parameter estimates from windowed observations");
  f->add_option("--windows", fit.windows, "user_id,window,p,f_start,r,m,gained,lost CSV")->required();
  f->add_option("--population-n", fit.population, "Population size N")->required();
  f->add_option("--out", fit.out_dir, "Output directory")->required();

  PredictOptions predict;
  auto* p = app.add_subcommand("predict", "Follower trajectories and predicted Gini");
  p->add_option("--params", predict.params, "Model parameters (JSON or name=value)")->required();
  p->add_option("--state", predict.state, "user_id,f0,r,m,p CSV")->required();
  p->add_option("--horizon", predict.horizon, "Steps of 4 days")->capture_default_str();
  p->add_option("--mode", predict.mode, "closed or ode")->check(CLI::IsMember({"closed", "ode"}))->capture_default_str();
  p->add_option("--dt", predict.dt, "RK4 step for ode mode")->capture_default_str();
  p->add_option("--out", predict.out_dir, "Output directory")->required();

  SimulateOptions simulate;
  auto* s = app.add_subcommand("simulate", "Agent-based follower dynamics");
  s->add_option("--config", simulate.config, "Simulation JSON config")->required();
  s->add_option("--seed", simulate.seed, "Override the config seed");
  s->add_option("--out", simulate.out_dir, "Output directory")->required();

  GenerateOptions generate;
  auto* g = app.add_subcommand("generate", "Write the bundled calibrated synthetic dataset");
  g->add_option("--out", generate.out_dir, "Output directory")->required();
  g->add_option("--seed", generate.seed)->capture_default_str();
  g->add_option("--users", generate.users)->capture_default_str();
  g->add_option("--edge-events", generate.edge_events)->capture_default_str();
  g->add_option("--windows-from", generate.windows_quintile, "Also synthesize windows.csv from Q1, Q2 or Q3");
  g->add_option("--population-n", generate.population, "N for --windows-from");
  g->add_option("--window-users", generate.window_users)->capture_default_str();
  g->add_option("--windows-per-user", generate.windows_per_user)->capture_default_str();
  g->add_option("--noise", generate.noise)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  if (*a) return cmd_analyze(analyze);
  if (*f) return cmd_fit(fit);
  if (*p) return cmd_predict(predict);
  if (*s) return cmd_simulate(simulate);
  if (*g) return cmd_generate(generate);
  return kInputError;
}
