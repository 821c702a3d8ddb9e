#pragma once

// Temporal and spatial congestion aggregation.
//
// The congestion index of a group of trips is the mean, over trips with
// positive distance, of duration in minutes per mile travelled.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "urbanflow/ingest/trip.hpp"
#include "urbanflow/spatiotemporal/grid.hpp"

namespace urbanflow::spatiotemporal {

struct TimeBin {
  int day_of_week = 0;  // 0 = Monday
  int hour = 0;

  int index() const { return day_of_week * 24 + hour; }
  static TimeBin from_index(int i) { return {i / 24, i % 24}; }
  auto operator<=>(const TimeBin&) const = default;
};

inline constexpr int kTimeBins = 168;

inline double minutes_per_mile(const ingest::EngineeredTrip& t) {
  return t.duration_min() / t.trip.trip_distance;
}

struct TemporalAggregation {
  std::array<std::size_t, kTimeBins> counts{};
  std::array<std::optional<double>, kTimeBins> index{};

  std::size_t total() const {
    std::size_t n = 0;
    for (auto c : counts) n += c;
    return n;
  }
  bool operator==(const TemporalAggregation&) const = default;
};

/// Every trip is counted in its pickup bin; zero-distance trips add to the
/// count but not to the index. Bins without an index are absent.
inline TemporalAggregation aggregate_temporal(std::span<const ingest::EngineeredTrip> trips) {
  TemporalAggregation agg;
  std::array<double, kTimeBins> sum{};
  std::array<std::size_t, kTimeBins> support{};
  for (const auto& t : trips) {
    const int b = TimeBin{t.day_of_week, t.hour_of_day}.index();
    ++agg.counts[static_cast<std::size_t>(b)];
    if (t.trip.trip_distance > 0) {
      sum[static_cast<std::size_t>(b)] += minutes_per_mile(t);
      ++support[static_cast<std::size_t>(b)];
    }
  }
  for (std::size_t b = 0; b < kTimeBins; ++b)
    if (support[b] > 0) agg.index[b] = sum[b] / static_cast<double>(support[b]);
  return agg;
}

/// Bins in the top `top_q` fraction by index: the ceil(top_q * present)
/// highest bins plus any bin tied with the cutoff value. Sorted by index
/// descending, then (day, hour).
inline std::vector<TimeBin> peak_periods(const TemporalAggregation& agg, double top_q) {
  std::vector<std::pair<double, TimeBin>> present;
  for (int b = 0; b < kTimeBins; ++b)
    if (agg.index[static_cast<std::size_t>(b)]) present.emplace_back(*agg.index[static_cast<std::size_t>(b)], TimeBin::from_index(b));
  if (present.empty()) return {};
  std::sort(present.begin(), present.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const double q = std::clamp(top_q, 0.0, 1.0);
  auto take = static_cast<std::size_t>(std::ceil(q * static_cast<double>(present.size())));
  take = std::clamp<std::size_t>(take, 1, present.size());
  const double cutoff = present[take - 1].first;
  std::vector<TimeBin> out;
  for (const auto& [value, bin] : present)
    if (value >= cutoff) out.push_back(bin);
  return out;
}

// ---------------------------------------------------------------------------

/// Restricts aggregation to one day and/or hour; unset fields match all.
struct BinFilter {
  std::optional<int> day_of_week;
  std::optional<int> hour;

  bool matches(int day, int hour_of_day) const {
    return (!day_of_week || *day_of_week == day) && (!hour || *hour == hour_of_day);
  }
  bool operator==(const BinFilter&) const = default;
};

struct CongestionCell {
  Cell cell;
  TimeBin bin;
  std::size_t trip_count = 0;
  double congestion_index = 0;

  bool operator==(const CongestionCell&) const = default;
};

struct SpatialAggregation {
  std::vector<CongestionCell> cells;  // sorted by (bin, row, col)
  std::size_t assigned = 0;           // trips that fell inside the grid
  std::size_t outside = 0;            // trips outside the bbox
  std::size_t filtered_out = 0;       // trips rejected by the bin filter
};

inline constexpr std::size_t kDefaultMinSupport = 10;

/// Groups trips by (pickup cell, time bin). Groups with fewer than
/// `min_support` trips with positive distance are omitted.
inline SpatialAggregation aggregate_spatial(std::span<const ingest::EngineeredTrip> trips, const GridSpec& grid,
                                            const BinFilter& filter = {},
                                            std::size_t min_support = kDefaultMinSupport) {
  grid.validate();
  SpatialAggregation agg;
  struct Acc {
    std::size_t count = 0, support = 0;
    double sum = 0;
  };
  std::map<std::pair<TimeBin, Cell>, Acc> groups;
  for (const auto& t : trips) {
    if (!filter.matches(t.day_of_week, t.hour_of_day)) {
      ++agg.filtered_out;
      continue;
    }
    const auto cell = grid.cell_of(t.trip.pickup_lat, t.trip.pickup_lon);
    if (!cell) {
      ++agg.outside;
      continue;
    }
    ++agg.assigned;
    auto& acc = groups[{TimeBin{t.day_of_week, t.hour_of_day}, *cell}];
    ++acc.count;
    if (t.trip.trip_distance > 0) {
      ++acc.support;
      acc.sum += minutes_per_mile(t);
    }
  }
  for (const auto& [key, acc] : groups) {
    if (acc.support < std::max<std::size_t>(min_support, 1)) continue;
    agg.cells.push_back({key.second, key.first, acc.count, acc.sum / static_cast<double>(acc.support)});
  }
  return agg;
}

}  // namespace urbanflow::spatiotemporal
