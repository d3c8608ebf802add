#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attn/ingest.hpp"
#include "attn/model.hpp"

// Deterministic synthetic data standing in for a follower-network crawl.
namespace attn {

inline constexpr std::uint64_t kCalibrationSeed = 20140320;

/// Seed-user population shaped like the published crawl: quintile means of
/// followers and statuses, a heavy head (top 1% near 60% of followers,
/// follower Gini above 0.9), plus a ~10k-row follow/unfollow log and an
/// activity log over eight 4-day windows.
struct SyntheticDataset {
  std::vector<SnapshotRow> snapshot;
  std::vector<TemporalEdge> edges;  // file order (timestamp order)
  std::vector<ActivityRecord> activity;
  WindowingConfig windowing;
};

SyntheticDataset generate_calibrated_dataset(std::uint64_t seed = kCalibrationSeed,
                                             std::size_t n_users = 1000,
                                             std::size_t n_edge_events = 10000);

std::string edges_to_csv(std::span<const TemporalEdge> edges);
std::string activity_to_csv(std::span<const ActivityRecord> activity);
std::string snapshot_to_csv(std::span<const SnapshotRow> snapshot);

struct WindowSynthesis {
  ModelParams params;       // drives gains and losses; params.N is the pool
  std::size_t n_users = 100;
  std::size_t n_windows = 20;
  std::uint64_t seed = 1;
  double noise = 0.0;       // relative multiplicative noise on gained/lost
};

/// Real-valued windows whose gained/lost equal (N - f) P+ and f P- exactly
/// (times 1 + noise * z, z standard normal), with r and m drawn log-uniformly
/// and independently of f so every exponent is identifiable.
std::vector<UserWindow> synthesize_windows(const WindowSynthesis& spec);

}  // namespace attn
