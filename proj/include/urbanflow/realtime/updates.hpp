#pragma once

#include <cmath>
#include <istream>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "urbanflow/routing/snapshot.hpp"

namespace urbanflow::realtime {

using routing::EdgeId;
using routing::SnapshotPtr;
using routing::TrafficSnapshot;

struct TrafficUpdate {
  EdgeId edge = 0;
  double factor = 1.0;
  double timestamp = 0;

  bool operator==(const TrafficUpdate&) const = default;
};

inline bool valid_factor(double f) { return std::isfinite(f) && f > 0.0 && f <= 1.0; }

struct ApplyResult {
  SnapshotPtr snapshot;
  std::size_t applied = 0;
  std::size_t rejected = 0;
};

/// New snapshot (version + 1) with the batch folded in left to right.
/// Updates with a factor outside (0, 1] are skipped and counted.
inline ApplyResult apply_updates(const TrafficSnapshot& base, std::span<const TrafficUpdate> updates) {
  auto next = std::make_shared<TrafficSnapshot>(base);
  next->version = base.version + 1;
  ApplyResult r;
  for (const auto& u : updates) {
    if (!valid_factor(u.factor)) {
      ++r.rejected;
      continue;
    }
    next->speed_factor[u.edge] = u.factor;
    next->timestamp = std::max(next->timestamp, u.timestamp);
    ++r.applied;
  }
  r.snapshot = std::move(next);
  return r;
}

// ---------------------------------------------------------------------------
// Live feed: newline-delimited JSON, one {"edge", "factor", "timestamp"}
// object per line.

struct FeedError {
  std::size_t line = 0;
  std::string message;
};

struct FeedBatch {
  std::vector<TrafficUpdate> updates;
  std::vector<FeedError> errors;
};

/// Parses a feed. Malformed lines and lines whose timestamp goes backwards
/// are reported and skipped.
inline FeedBatch parse_feed(std::istream& in, double last_timestamp = -INFINITY) {
  FeedBatch batch;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      TrafficUpdate u{j.at("edge").get<EdgeId>(), j.at("factor").get<double>(), j.at("timestamp").get<double>()};
      if (u.timestamp < last_timestamp) {
        batch.errors.push_back({n, "timestamp goes backwards"});
        continue;
      }
      last_timestamp = u.timestamp;
      batch.updates.push_back(u);
    } catch (const nlohmann::json::exception& e) {
      batch.errors.push_back({n, e.what()});
    }
  }
  return batch;
}

inline std::string format_feed_line(const TrafficUpdate& u) {
  return nlohmann::json{{"edge", u.edge}, {"factor", u.factor}, {"timestamp", u.timestamp}}.dump();
}

/// The single writer for a SnapshotStore: folds each batch into the current
/// snapshot and publishes the result in one step.
class FeedApplier {
 public:
  explicit FeedApplier(routing::SnapshotStore& store) : store_(store) {}

  ApplyResult apply(std::span<const TrafficUpdate> updates) {
    auto r = apply_updates(*store_.current(), updates);
    store_.publish(r.snapshot);
    return r;
  }

 private:
  routing::SnapshotStore& store_;
};

}  // namespace urbanflow::realtime
