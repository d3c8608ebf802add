#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "attn/fitting.hpp"

// Temporal follow-edge and activity logs, windowed into per-user observations.
namespace attn {

enum class EdgeAction { Create, Delete };

struct TemporalEdge {
  UserId src = 0;  // follower
  UserId dst = 0;  // followee
  EdgeAction action = EdgeAction::Create;
  std::int64_t timestamp = 0;
};

/// Edges in replay order (timestamp, then file order) after dropping a CREATE
/// of an already-active edge or a DELETE of an inactive one.
struct EdgeLog {
  std::vector<TemporalEdge> edges;
  std::size_t rows = 0;
  std::size_t duplicate_creates = 0;
  std::size_t orphan_deletes = 0;
};

enum class ActivityKind { Tweet, RetweetReceived, MentionReceived };

struct ActivityRecord {
  UserId user_id = 0;
  std::int64_t timestamp = 0;
  ActivityKind kind = ActivityKind::Tweet;
  std::int64_t count = 1;
};

/// Optional profile snapshot at the start of the edge log.
struct SnapshotRow {
  UserId user_id = 0;
  double followers = 0.0;
  double friends = 0.0;
  double statuses = 0.0;
};

struct WindowingConfig {
  std::int64_t window_seconds = kDefaultTimeUnitSeconds;
  std::int64_t t0 = 0;
};

/// CSV with header `src,dst,action,timestamp`; action is create/delete in any case.
EdgeLog parse_temporal_edges(std::istream& in);
/// CSV with header `user_id,timestamp,kind,count`; kind is tweet,
/// retweet_received or mention_received in any case; count >= 1.
std::vector<ActivityRecord> parse_activity_log(std::istream& in);
/// CSV with header `user_id,followers,friends,statuses`.
std::vector<SnapshotRow> parse_snapshot(std::istream& in);

/// Per-user windowed panel. Users are every followee in the edge log, every
/// user in the activity log and every snapshot row, sorted by id.
struct WindowPanel {
  std::vector<UserId> users;
  std::size_t n_windows = 0;
  std::vector<UserWindow> windows;      // user-major, window-minor
  std::vector<double> initial_followers;
  std::vector<double> final_followers;  // in-degree after the full replay
  std::vector<double> final_friends;    // out-degree toward anyone, after replay
  std::vector<double> statuses;         // snapshot statuses (0 without a snapshot)

  const UserWindow& at(std::size_t user, std::size_t window) const {
    return windows[user * n_windows + window];
  }
};

/// Window k covers [t0 + k w, t0 + (k+1) w). f_start is the active in-degree
/// (plus any snapshot baseline) at the window start. Throws
/// TimestampBeforeOrigin.
WindowPanel build_windows(const EdgeLog& edges, std::span<const ActivityRecord> activity,
                          const WindowingConfig& cfg,
                          std::span<const SnapshotRow> snapshot = {});

struct TransitionSample {
  double r = 0.0;
  double m = 0.0;
  std::optional<double> p_plus;  // empty when f_start >= N
  double p_minus = 0.0;
};

struct TransitionSamples {
  std::vector<TransitionSample> samples;
  std::size_t skipped_gain = 0;
  std::size_t inconsistent = 0;  // rows with f_start < lost
};

/// P+ = gained / (N - f_start), P- = lost / max(f_start, 1), both clamped to [0,1].
TransitionSamples empirical_transition_probs(std::span<const UserWindow> windows,
                                             std::int64_t population);

/// `user_id,window,p,f_start,r,m,gained,lost`
std::string windows_to_csv(std::span<const UserWindow> windows);
std::vector<UserWindow> parse_windows_csv(std::istream& in);

}  // namespace attn
