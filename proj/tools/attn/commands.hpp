#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace attn::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 2,
  kDegenerateData = 3,
  kNumericFailure = 4,
};

struct AnalyzeOptions {
  std::filesystem::path edges;
  std::filesystem::path activity;
  std::optional<std::filesystem::path> snapshot;
  std::int64_t window_seconds = 345600;
  std::optional<std::int64_t> t0;  // defaults to the earliest event
  std::filesystem::path out_dir;
};

struct FitOptions {
  std::filesystem::path windows;
  std::int64_t population = 0;
  std::filesystem::path out_dir;
};

struct PredictOptions {
  std::filesystem::path params;
  std::filesystem::path state;
  std::int64_t horizon = 0;
  std::string mode = "closed";  // closed | ode
  double dt = 0.01;
  std::filesystem::path out_dir;
};

struct SimulateOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out_dir;
};

struct GenerateOptions {
  std::filesystem::path out_dir;
  std::uint64_t seed = 20140320;
  std::size_t users = 1000;
  std::size_t edge_events = 10000;
  // When set, also write windows.csv synthesized from a Table 3 row.
  std::optional<std::string> windows_quintile;
  std::int64_t population = 0;
  std::size_t window_users = 100;
  std::size_t windows_per_user = 20;
  double noise = 0.0;
};

int cmd_analyze(const AnalyzeOptions& opts);
int cmd_fit(const FitOptions& opts);
int cmd_predict(const PredictOptions& opts);
int cmd_simulate(const SimulateOptions& opts);
int cmd_generate(const GenerateOptions& opts);

/// Applies ATTN_LOG (trace, debug, info, warn, error, off; default warn).
void configure_logging();

}  // namespace attn::cli
