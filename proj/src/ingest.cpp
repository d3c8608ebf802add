#include "attn/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <string_view>
#include <unordered_map>
#include <utility>

#include "attn/error.hpp"
#include "attn/params_io.hpp"

namespace attn {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

template <class Int>
Int parse_int(std::string_view token, std::size_t line, const char* what) {
  token = trim(token);
  Int value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || token.empty()) {
    throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + std::string(token) + "'", line);
  }
  return value;
}

// Reads the header and yields (line number, fields) for each non-empty row.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string_view expected_header, std::size_t columns)
      : in_(in), columns_(columns) {
    std::string header;
    if (!std::getline(in_, header)) throw Error(ErrorCode::ParseError, "missing header row", 1);
    line_ = 1;
    if (trim(header) != expected_header) {
      throw Error(ErrorCode::ParseError, "expected header '" + std::string(expected_header) + "'", 1);
    }
  }

  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, buffer_)) {
      ++line_;
      if (trim(buffer_).empty()) continue;
      fields = split_fields(trim(buffer_));
      if (fields.size() != columns_) {
        throw Error(ErrorCode::ParseError,
                    "expected " + std::to_string(columns_) + " fields, got " + std::to_string(fields.size()),
                    line_);
      }
      return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t columns_;
  std::size_t line_ = 0;
  std::string buffer_;
};

}  // namespace

EdgeLog parse_temporal_edges(std::istream& in) {
  CsvReader reader(in, "src,dst,action,timestamp", 4);
  std::vector<TemporalEdge> rows;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    TemporalEdge e;
    e.src = parse_int<UserId>(f[0], reader.line(), "src");
    e.dst = parse_int<UserId>(f[1], reader.line(), "dst");
    const std::string action = lower(trim(f[2]));
    if (action == "create") {
      e.action = EdgeAction::Create;
    } else if (action == "delete") {
      e.action = EdgeAction::Delete;
    } else {
      throw Error(ErrorCode::BadAction, "unknown action '" + std::string(trim(f[2])) + "'", reader.line());
    }
    e.timestamp = parse_int<std::int64_t>(f[3], reader.line(), "timestamp");
    if (e.timestamp < 0) throw Error(ErrorCode::ParseError, "negative timestamp", reader.line());
    if (e.src == e.dst) throw Error(ErrorCode::ParseError, "self-follow edge", reader.line());
    rows.push_back(e);
  }

  EdgeLog log;
  log.rows = rows.size();
  std::stable_sort(rows.begin(), rows.end(),
                   [](const TemporalEdge& a, const TemporalEdge& b) { return a.timestamp < b.timestamp; });
  std::set<std::pair<UserId, UserId>> active;
  for (const auto& e : rows) {
    const auto key = std::make_pair(e.src, e.dst);
    if (e.action == EdgeAction::Create) {
      if (!active.insert(key).second) {
        ++log.duplicate_creates;
        continue;
      }
    } else if (active.erase(key) == 0) {
      ++log.orphan_deletes;
      continue;
    }
    log.edges.push_back(e);
  }
  return log;
}

std::vector<ActivityRecord> parse_activity_log(std::istream& in) {
  CsvReader reader(in, "user_id,timestamp,kind,count", 4);
  std::vector<ActivityRecord> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    ActivityRecord rec;
    rec.user_id = parse_int<UserId>(f[0], reader.line(), "user_id");
    rec.timestamp = parse_int<std::int64_t>(f[1], reader.line(), "timestamp");
    if (rec.timestamp < 0) throw Error(ErrorCode::ParseError, "negative timestamp", reader.line());
    const std::string kind = lower(trim(f[2]));
    if (kind == "tweet") {
      rec.kind = ActivityKind::Tweet;
    } else if (kind == "retweet_received") {
      rec.kind = ActivityKind::RetweetReceived;
    } else if (kind == "mention_received") {
      rec.kind = ActivityKind::MentionReceived;
    } else {
      throw Error(ErrorCode::ParseError, "unknown kind '" + std::string(trim(f[2])) + "'", reader.line());
    }
    rec.count = parse_int<std::int64_t>(f[3], reader.line(), "count");
    if (rec.count < 1) throw Error(ErrorCode::ParseError, "count must be >= 1", reader.line());
    out.push_back(rec);
  }
  return out;
}

std::vector<SnapshotRow> parse_snapshot(std::istream& in) {
  CsvReader reader(in, "user_id,followers,friends,statuses", 4);
  std::vector<SnapshotRow> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    SnapshotRow row;
    row.user_id = parse_int<UserId>(f[0], reader.line(), "user_id");
    row.followers = static_cast<double>(parse_int<std::int64_t>(f[1], reader.line(), "followers"));
    row.friends = static_cast<double>(parse_int<std::int64_t>(f[2], reader.line(), "friends"));
    row.statuses = static_cast<double>(parse_int<std::int64_t>(f[3], reader.line(), "statuses"));
    if (row.followers < 0 || row.friends < 0 || row.statuses < 0) {
      throw Error(ErrorCode::ParseError, "snapshot counts must be >= 0", reader.line());
    }
    out.push_back(row);
  }
  return out;
}

WindowPanel build_windows(const EdgeLog& edges, std::span<const ActivityRecord> activity,
                          const WindowingConfig& cfg, std::span<const SnapshotRow> snapshot) {
  if (cfg.window_seconds <= 0) throw Error(ErrorCode::BadConfig, "window_seconds must be positive");

  std::set<UserId> ids;
  std::int64_t max_ts = cfg.t0;
  bool any_event = false;
  for (const auto& e : edges.edges) {
    if (e.timestamp < cfg.t0) throw Error(ErrorCode::TimestampBeforeOrigin, "edge at " + std::to_string(e.timestamp));
    ids.insert(e.dst);
    max_ts = std::max(max_ts, e.timestamp);
    any_event = true;
  }
  for (const auto& a : activity) {
    if (a.timestamp < cfg.t0) throw Error(ErrorCode::TimestampBeforeOrigin, "activity at " + std::to_string(a.timestamp));
    ids.insert(a.user_id);
    max_ts = std::max(max_ts, a.timestamp);
    any_event = true;
  }
  for (const auto& s : snapshot) ids.insert(s.user_id);

  WindowPanel panel;
  panel.users.assign(ids.begin(), ids.end());
  std::unordered_map<UserId, std::size_t> index;
  for (std::size_t i = 0; i < panel.users.size(); ++i) index.emplace(panel.users[i], i);
  const std::size_t n_users = panel.users.size();

  std::vector<double> indeg(n_users, 0.0);
  panel.final_friends.assign(n_users, 0.0);
  panel.statuses.assign(n_users, 0.0);
  for (const auto& s : snapshot) {
    const std::size_t u = index.at(s.user_id);
    indeg[u] = s.followers;
    panel.final_friends[u] = s.friends;
    panel.statuses[u] = s.statuses;
  }
  panel.initial_followers = indeg;

  auto window_of = [&](std::int64_t ts) { return static_cast<std::size_t>((ts - cfg.t0) / cfg.window_seconds); };
  panel.n_windows = any_event ? window_of(max_ts) + 1 : 0;
  panel.windows.resize(n_users * panel.n_windows);
  for (std::size_t u = 0; u < n_users; ++u) {
    for (std::size_t k = 0; k < panel.n_windows; ++k) {
      auto& w = panel.windows[u * panel.n_windows + k];
      w.user_id = panel.users[u];
      w.window_index = static_cast<std::int64_t>(k);
    }
  }

  for (const auto& a : activity) {
    auto& w = panel.windows[index.at(a.user_id) * panel.n_windows + window_of(a.timestamp)];
    const auto c = static_cast<double>(a.count);
    switch (a.kind) {
      case ActivityKind::Tweet: w.p += c; break;
      case ActivityKind::RetweetReceived: w.r += c; break;
      case ActivityKind::MentionReceived: w.m += c; break;
    }
  }

  // Edges are already in replay order.
  std::size_t next_edge = 0;
  for (std::size_t k = 0; k < panel.n_windows; ++k) {
    for (std::size_t u = 0; u < n_users; ++u) panel.windows[u * panel.n_windows + k].f_start = indeg[u];
    while (next_edge < edges.edges.size() && window_of(edges.edges[next_edge].timestamp) == k) {
      const auto& e = edges.edges[next_edge++];
      const double delta = e.action == EdgeAction::Create ? 1.0 : -1.0;
      const std::size_t dst = index.at(e.dst);
      auto& w = panel.windows[dst * panel.n_windows + k];
      (e.action == EdgeAction::Create ? w.gained : w.lost) += 1.0;
      indeg[dst] += delta;
      if (auto it = index.find(e.src); it != index.end()) panel.final_friends[it->second] += delta;
    }
  }
  panel.final_followers = std::move(indeg);
  return panel;
}

TransitionSamples empirical_transition_probs(std::span<const UserWindow> windows,
                                             std::int64_t population) {
  if (population < 1) throw Error(ErrorCode::BadConfig, "population N must be >= 1");
  const auto n = static_cast<double>(population);
  TransitionSamples out;
  out.samples.reserve(windows.size());
  for (const auto& w : windows) {
    TransitionSample s;
    s.r = w.r;
    s.m = w.m;
    if (w.f_start < n) {
      s.p_plus = std::clamp(w.gained / (n - w.f_start), 0.0, 1.0);
    } else {
      ++out.skipped_gain;
    }
    s.p_minus = std::clamp(w.lost / std::max(w.f_start, 1.0), 0.0, 1.0);
    if (w.f_start < w.lost) ++out.inconsistent;
    out.samples.push_back(s);
  }
  return out;
}

std::string windows_to_csv(std::span<const UserWindow> windows) {
  std::string out = "user_id,window,p,f_start,r,m,gained,lost\n";
  for (const auto& w : windows) {
    out += std::to_string(w.user_id);
    out += ',';
    out += std::to_string(w.window_index);
    for (double v : {w.p, w.f_start, w.r, w.m, w.gained, w.lost}) {
      out += ',';
      out += format_csv(v);
    }
    out += '\n';
  }
  return out;
}

std::vector<UserWindow> parse_windows_csv(std::istream& in) {
  CsvReader reader(in, "user_id,window,p,f_start,r,m,gained,lost", 8);
  std::vector<UserWindow> out;
  std::vector<std::string_view> f;
  while (reader.next(f)) {
    UserWindow w;
    w.user_id = parse_int<UserId>(f[0], reader.line(), "user_id");
    w.window_index = parse_int<std::int64_t>(f[1], reader.line(), "window");
    double* fields[] = {&w.p, &w.f_start, &w.r, &w.m, &w.gained, &w.lost};
    for (std::size_t i = 0; i < 6; ++i) {
      *fields[i] = parse_double(f[i + 2], reader.line());
      if (!(*fields[i] >= 0.0) || !std::isfinite(*fields[i])) {
        throw Error(ErrorCode::ParseError, "window counts must be finite and >= 0", reader.line());
      }
    }
    if (w.window_index < 0) throw Error(ErrorCode::ParseError, "negative window index", reader.line());
    out.push_back(w);
  }
  return out;
}

}  // namespace attn
