#pragma once

#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "urbanflow/ingest/trip.hpp"

namespace urbanflow::ingest {

struct BoundingBox {
  double lat_min = 40.50, lon_min = -74.30;
  double lat_max = 41.00, lon_max = -73.60;

  bool contains(double lat, double lon) const {
    return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
  }
  bool operator==(const BoundingBox&) const = default;
};

/// Outlier bounds. Defaults are NYC sanity bounds.
struct CleanConfig {
  BoundingBox bbox{};
  double max_speed_mph = 60.0;
  double max_duration_sec = 4 * 3600.0;
  double max_distance_mi = 100.0;
  double min_duration_sec = 60.0;

  void validate() const {
    if (!(bbox.lat_min < bbox.lat_max && bbox.lon_min < bbox.lon_max))
      throw std::invalid_argument("clean config: degenerate bounding box");
    if (!(max_speed_mph > 0 && max_duration_sec > 0 && max_distance_mi > 0 && min_duration_sec > 0))
      throw std::invalid_argument("clean config: bounds must be strictly positive");
    if (min_duration_sec > max_duration_sec)
      throw std::invalid_argument("clean config: min_duration exceeds max_duration");
  }
};

struct CleanReport {
  std::size_t rows_in = 0;
  std::size_t rows_out = 0;
  std::map<std::string, std::size_t> dropped_by_rule;
  std::size_t imputed_values = 0;

  std::size_t dropped() const {
    std::size_t n = 0;
    for (const auto& [rule, count] : dropped_by_rule) n += count;
    return n;
  }

  // Reports from disjoint batches add up.
  CleanReport& operator+=(const CleanReport& o) {
    rows_in += o.rows_in;
    rows_out += o.rows_out;
    imputed_values += o.imputed_values;
    for (const auto& [rule, count] : o.dropped_by_rule) dropped_by_rule[rule] += count;
    return *this;
  }
};

namespace rule {
inline constexpr const char* kOutsideBbox = "outside_bbox";
inline constexpr const char* kSpeed = "speed_above_max";
inline constexpr const char* kMinDuration = "duration_below_min";
inline constexpr const char* kMaxDuration = "duration_above_max";
inline constexpr const char* kZeroDistance = "zero_distance";
inline constexpr const char* kMaxDistance = "distance_above_max";
}  // namespace rule

/// First rule a record violates, or nullptr if it survives. Rules are
/// checked in a fixed order (bbox, speed, duration, distance) so each
/// dropped row is charged to exactly one rule.
inline const char* violated_rule(const TripRecord& r, const CleanConfig& cfg) {
  if (!cfg.bbox.contains(r.pickup_lat, r.pickup_lon) || !cfg.bbox.contains(r.dropoff_lat, r.dropoff_lon))
    return rule::kOutsideBbox;
  const double duration = static_cast<double>(r.dropoff_time - r.pickup_time);
  if (r.trip_distance > 0) {
    const double speed =
        duration > 0 ? r.trip_distance / (duration / 3600.0) : std::numeric_limits<double>::infinity();
    if (speed > cfg.max_speed_mph) return rule::kSpeed;
  }
  if (duration < cfg.min_duration_sec) return rule::kMinDuration;
  if (duration > cfg.max_duration_sec) return rule::kMaxDuration;
  if (r.trip_distance <= 0) return rule::kZeroDistance;
  if (r.trip_distance > cfg.max_distance_mi) return rule::kMaxDistance;
  return nullptr;
}

inline std::vector<TripRecord> clean_trips(const std::vector<TripRecord>& records, const CleanConfig& cfg,
                                           CleanReport* report = nullptr) {
  cfg.validate();
  CleanReport rep;
  rep.rows_in = records.size();
  std::vector<TripRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (const char* why = violated_rule(r, cfg)) {
      ++rep.dropped_by_rule[why];
    } else {
      out.push_back(r);
    }
  }
  rep.rows_out = out.size();
  if (report) *report = std::move(rep);
  return out;
}

}  // namespace urbanflow::ingest
