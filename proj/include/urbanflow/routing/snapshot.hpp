#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <utility>

#include "urbanflow/routing/graph.hpp"

namespace urbanflow::routing {

/// Versioned map of edge speed factors in (0, 1]. Edges not listed run at
/// free flow. Instances are never mutated once published.
struct TrafficSnapshot {
  std::uint64_t version = 0;
  double timestamp = 0;
  std::unordered_map<EdgeId, double> speed_factor;

  double factor(EdgeId e) const {
    auto it = speed_factor.find(e);
    return it == speed_factor.end() ? 1.0 : it->second;
  }

  std::map<EdgeId, double> sorted_factors() const { return {speed_factor.begin(), speed_factor.end()}; }

  bool operator==(const TrafficSnapshot&) const = default;
};

using SnapshotPtr = std::shared_ptr<const TrafficSnapshot>;

inline SnapshotPtr free_flow_snapshot() { return std::make_shared<const TrafficSnapshot>(); }

/// Seconds to traverse an arc under a snapshot.
inline double edge_cost(const Arc& arc, const TrafficSnapshot& snapshot) {
  return arc.length_m / (arc.speed_mps * snapshot.factor(arc.edge));
}

/// Single-writer publication point for snapshots. Readers take a shared
/// pointer and keep using that version for as long as they hold it.
class SnapshotStore {
 public:
  explicit SnapshotStore(SnapshotPtr initial = free_flow_snapshot()) : current_(std::move(initial)) {}

  SnapshotPtr current() const {
    std::lock_guard lock(mu_);
    return current_;
  }

  void publish(SnapshotPtr next) {
    std::lock_guard lock(mu_);
    current_ = std::move(next);
  }

 private:
  mutable std::mutex mu_;
  SnapshotPtr current_;
};

}  // namespace urbanflow::routing
