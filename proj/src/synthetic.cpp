#include "attn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attn/random.hpp"

namespace attn {

namespace {

struct FollowerBand {
  double lo;
  double hi;
  double shape;
  double target_mean;  // <= 0 leaves the band unscaled
  double target_statuses;
};

// Quintile bands, richest first. Bands do not overlap, so follower rank and
// band membership coincide. The first three targets follow the published
// quintile table; the last two are low-activity fill.
constexpr FollowerBand kBands[5] = {
    {2600.0, 3.0e6, 0.6, 29021.0, 14086.0},
    {700.0, 2500.0, 1.5, 1058.0, 7184.0},
    {260.0, 690.0, 1.5, 445.0, 4053.0},
    {60.0, 250.0, 1.2, 0.0, 2000.0},
    {1.0, 55.0, 0.8, 0.0, 900.0},
};

constexpr std::int64_t kOrigin = 1395273600;  // 2014-03-20T00:00:00Z
constexpr std::size_t kWindows = 8;
constexpr UserId kFollowerIdBase = 1'000'000;

double band_draw(const FollowerBand& band, double u) {
  const double tail = 1.0 - std::pow(band.lo / band.hi, band.shape);
  return band.lo * std::pow(1.0 - u * tail, -1.0 / band.shape);
}

// Shift values above the band floor so their mean hits the target exactly.
void rescale_above_floor(std::vector<double>& values, double floor, double target) {
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  const double k = (target - floor) / (mean - floor);
  for (double& v : values) v = floor + (v - floor) * k;
}

}  // namespace

SyntheticDataset generate_calibrated_dataset(std::uint64_t seed, std::size_t n_users,
                                             std::size_t n_edge_events) {
  SyntheticDataset data;
  data.windowing = {kDefaultTimeUnitSeconds, kOrigin};
  Rng rng(seed);

  const std::size_t per_band = n_users / 5;
  std::vector<double> followers;
  std::vector<double> statuses;
  for (std::size_t q = 0; q < 5; ++q) {
    const FollowerBand& band = kBands[q];
    const std::size_t size = per_band + (q < n_users % 5 ? 1 : 0);
    std::vector<double> f(size), s(size);
    for (std::size_t j = 0; j < size; ++j) {
      const double u = (static_cast<double>(j) + rng.uniform()) / static_cast<double>(size);
      f[j] = band_draw(band, u);
      s[j] = rng.lognormal(0.0, 0.5);
    }
    if (band.target_mean > 0.0) rescale_above_floor(f, band.lo, band.target_mean);
    const double s_mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(size);
    for (double& v : s) v *= band.target_statuses / s_mean;
    for (std::size_t j = 0; j < size; ++j) {
      followers.push_back(std::floor(f[j]));
      statuses.push_back(std::round(s[j]));
    }
  }

  // Interleave bands across ids so id order says nothing about rank.
  std::vector<std::size_t> order(followers.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform() * static_cast<double>(i))]);
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t k = order[i];
    data.snapshot.push_back({static_cast<UserId>(i + 1), followers[k], std::floor(rng.lognormal(std::log(400.0), 1.0)),
                             statuses[k]});
  }

  // Follow events favour already-popular users; unfollows undo earlier follows.
  const std::int64_t span = static_cast<std::int64_t>(kWindows) * kDefaultTimeUnitSeconds;
  std::vector<double> weight(data.snapshot.size());
  for (std::size_t i = 0; i < weight.size(); ++i) weight[i] = std::pow(data.snapshot[i].followers + 1.0, 0.8);
  std::vector<double> cumulative(weight.size());
  std::partial_sum(weight.begin(), weight.end(), cumulative.begin());

  const std::size_t n_creates = n_edge_events * 7 / 10;
  const std::size_t n_deletes = n_edge_events - n_creates;
  std::vector<TemporalEdge> creates;
  for (std::size_t e = 0; e < n_creates; ++e) {
    const double x = rng.uniform() * cumulative.back();
    const auto idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), x) - cumulative.begin());
    TemporalEdge edge;
    edge.src = kFollowerIdBase + e;
    edge.dst = data.snapshot[std::min(idx, cumulative.size() - 1)].user_id;
    edge.action = EdgeAction::Create;
    // Leave the last minute free so every unfollow can land after its follow.
    edge.timestamp = kOrigin + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(span - 60));
    creates.push_back(edge);
  }
  std::vector<std::size_t> pick(creates.size());
  std::iota(pick.begin(), pick.end(), 0);
  for (std::size_t i = pick.size(); i > 1; --i) {
    std::swap(pick[i - 1], pick[static_cast<std::size_t>(rng.uniform() * static_cast<double>(i))]);
  }
  data.edges = creates;
  for (std::size_t d = 0; d < n_deletes && d < pick.size(); ++d) {
    TemporalEdge del = creates[pick[d]];
    del.action = EdgeAction::Delete;
    const std::int64_t room = kOrigin + span - 1 - del.timestamp;
    del.timestamp += 1 + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(room - 1));
    data.edges.push_back(del);
  }
  std::stable_sort(data.edges.begin(), data.edges.end(),
                   [](const TemporalEdge& a, const TemporalEdge& b) { return a.timestamp < b.timestamp; });

  // Per-window activity; retweets and mentions scale with followers.
  for (const auto& user : data.snapshot) {
    const double tweet_rate = user.statuses / 400.0;
    for (std::size_t k = 0; k < kWindows; ++k) {
      const std::int64_t start = kOrigin + static_cast<std::int64_t>(k) * kDefaultTimeUnitSeconds;
      auto stamp = [&] { return start + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(kDefaultTimeUnitSeconds)); };
      const auto tweets = static_cast<std::int64_t>(std::floor(tweet_rate * rng.lognormal(0.0, 0.8)));
      const auto retweets = static_cast<std::int64_t>(std::floor(0.002 * std::pow(user.followers, 0.95) * rng.lognormal(0.0, 1.0)));
      const auto mentions = static_cast<std::int64_t>(std::floor(0.001 * std::pow(user.followers, 1.0) * rng.lognormal(0.0, 1.0)));
      if (tweets > 0) data.activity.push_back({user.user_id, stamp(), ActivityKind::Tweet, tweets});
      if (retweets > 0) data.activity.push_back({user.user_id, stamp(), ActivityKind::RetweetReceived, retweets});
      if (mentions > 0) data.activity.push_back({user.user_id, stamp(), ActivityKind::MentionReceived, mentions});
    }
  }
  std::stable_sort(data.activity.begin(), data.activity.end(),
                   [](const ActivityRecord& a, const ActivityRecord& b) { return a.timestamp < b.timestamp; });
  return data;
}

std::string edges_to_csv(std::span<const TemporalEdge> edges) {
  std::string out = "src,dst,action,timestamp\n";
  for (const auto& e : edges) {
    out += std::to_string(e.src) + ',' + std::to_string(e.dst) + ',' +
           (e.action == EdgeAction::Create ? "create" : "delete") + ',' + std::to_string(e.timestamp) + '\n';
  }
  return out;
}

std::string activity_to_csv(std::span<const ActivityRecord> activity) {
  std::string out = "user_id,timestamp,kind,count\n";
  for (const auto& a : activity) {
    const char* kind = a.kind == ActivityKind::Tweet             ? "tweet"
                       : a.kind == ActivityKind::RetweetReceived ? "retweet_received"
                                                                 : "mention_received";
    out += std::to_string(a.user_id) + ',' + std::to_string(a.timestamp) + ',' + kind + ',' +
           std::to_string(a.count) + '\n';
  }
  return out;
}

std::string snapshot_to_csv(std::span<const SnapshotRow> snapshot) {
  std::string out = "user_id,followers,friends,statuses\n";
  for (const auto& s : snapshot) {
    out += std::to_string(s.user_id) + ',' + std::to_string(static_cast<std::int64_t>(s.followers)) + ',' +
           std::to_string(static_cast<std::int64_t>(s.friends)) + ',' +
           std::to_string(static_cast<std::int64_t>(s.statuses)) + '\n';
  }
  return out;
}

std::vector<UserWindow> synthesize_windows(const WindowSynthesis& spec) {
  std::vector<UserWindow> out;
  out.reserve(spec.n_users * spec.n_windows);
  const auto n = static_cast<double>(spec.params.N);
  for (std::size_t u = 0; u < spec.n_users; ++u) {
    Rng rng = Rng::stream(spec.seed, u, 0);
    // Log-uniform initial followers over [10, N / 100].
    double f = std::floor(10.0 * std::pow(std::max(n / 1000.0, 1.0), rng.uniform()));
    for (std::size_t k = 0; k < spec.n_windows; ++k) {
      UserWindow w;
      w.user_id = u + 1;
      w.window_index = static_cast<std::int64_t>(k);
      w.f_start = f;
      w.p = std::exp(std::log(200.0) * rng.uniform());
      w.r = std::exp(std::log(200.0) * rng.uniform());
      w.m = std::exp(std::log(50.0) * rng.uniform());
      const AttentionState att{f, w.r, w.m, w.p};
      const double gain = gain_probability(spec.params, att);
      const double loss = loss_probability(spec.params, att);
      const double z1 = spec.noise > 0.0 ? rng.normal() : 0.0;
      const double z2 = spec.noise > 0.0 ? rng.normal() : 0.0;
      w.gained = std::max(0.0, (n - f) * gain * (1.0 + spec.noise * z1));
      w.lost = std::max(0.0, f * loss * (1.0 + spec.noise * z2));
      out.push_back(w);
      f = std::clamp(f + w.gained - w.lost, 0.0, n);
    }
  }
  return out;
}

}  // namespace attn
