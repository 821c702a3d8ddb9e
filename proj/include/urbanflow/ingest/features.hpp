#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "urbanflow/ingest/timezone.hpp"
#include "urbanflow/ingest/trip.hpp"
#include "urbanflow/rng.hpp"

namespace urbanflow::ingest {

class ImputeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fills gaps in a time-ordered series by linear interpolation between the
/// nearest present neighbours. Endpoints must be present.
inline std::vector<double> impute_missing(std::span<const std::optional<double>> series,
                                          std::size_t* imputed = nullptr) {
  if (series.size() < 2) throw ImputeError("impute: series needs at least two entries");
  if (!series.front() || !series.back()) throw ImputeError("impute: first and last entries must be present");
  std::vector<double> out(series.size());
  std::size_t filled = 0;
  std::size_t left = 0;
  out[0] = *series[0];
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (!series[i]) continue;
    out[i] = *series[i];
    const double a = out[left], b = out[i];
    const double span = static_cast<double>(i - left);
    for (std::size_t j = left + 1; j < i; ++j) {
      const double t = static_cast<double>(j - left) / span;
      out[j] = a + (b - a) * t;
      ++filled;
    }
    left = i;
  }
  if (imputed) *imputed = filled;
  return out;
}

inline EngineeredTrip engineer_features(const TripRecord& r, const TimeZone& tz) {
  EngineeredTrip e;
  e.trip = r;
  e.duration_sec = r.dropoff_time - r.pickup_time;
  const std::int64_t local = tz.to_local(r.pickup_time);
  e.hour_of_day = civil::hour(local);
  e.day_of_week = civil::weekday(local);
  e.day_onehot[static_cast<std::size_t>(e.day_of_week)] = 1;
  return e;
}

inline std::vector<EngineeredTrip> engineer_features(std::span<const TripRecord> records, const TimeZone& tz) {
  std::vector<EngineeredTrip> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(engineer_features(r, tz));
  return out;
}

// ---------------------------------------------------------------------------
// Named numeric features

/// Extracts a named scalar feature from an engineered trip. Known names:
/// the six duration-model inputs, duration_sec, duration_min, hour_of_day,
/// day_of_week, day_0..day_6 and hour_0..hour_23 (one-hot indicators).
inline double feature_value(const EngineeredTrip& e, const std::string& name) {
  const auto& t = e.trip;
  if (name == "trip_distance") return t.trip_distance;
  if (name == "pickup_longitude") return t.pickup_lon;
  if (name == "pickup_latitude") return t.pickup_lat;
  if (name == "dropoff_longitude") return t.dropoff_lon;
  if (name == "dropoff_latitude") return t.dropoff_lat;
  if (name == "passenger_count") return t.passenger_count;
  if (name == "fare_amount") return t.fare_amount;
  if (name == "duration_sec") return static_cast<double>(e.duration_sec);
  if (name == "duration_min") return e.duration_min();
  if (name == "hour_of_day") return e.hour_of_day;
  if (name == "day_of_week") return e.day_of_week;
  if (name.size() == 5 && name.starts_with("day_") && name[4] >= '0' && name[4] <= '6')
    return e.day_onehot[static_cast<std::size_t>(name[4] - '0')];
  if (name.starts_with("hour_") && name.size() <= 7) {
    const int h = std::stoi(name.substr(5));
    if (h >= 0 && h < 24) return e.hour_of_day == h ? 1.0 : 0.0;
  }
  throw std::invalid_argument("unknown feature '" + name + "'");
}

/// Per-feature mean and population standard deviation.
struct NormStats {
  std::vector<std::string> features;
  std::vector<double> mean;
  std::vector<double> stddev;

  bool operator==(const NormStats&) const = default;
};

class ZeroVarianceError : public std::invalid_argument {
 public:
  explicit ZeroVarianceError(const std::string& feature)
      : std::invalid_argument("feature '" + feature + "' has zero variance"), feature_(feature) {}
  const std::string& feature() const { return feature_; }

 private:
  std::string feature_;
};

/// Fits z-score statistics over the rows of a row-major matrix whose
/// columns are named by `features`.
inline NormStats fit_normalizer(std::span<const std::vector<double>> rows, std::vector<std::string> features) {
  if (rows.size() < 2) throw std::invalid_argument("fit_normalizer: need at least two rows");
  const std::size_t n = features.size();
  NormStats s{std::move(features), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const double m = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    if (r.size() != n) throw std::invalid_argument("fit_normalizer: row width mismatch");
    for (std::size_t j = 0; j < n; ++j) s.mean[j] += r[j];
  }
  for (auto& v : s.mean) v /= m;
  for (const auto& r : rows)
    for (std::size_t j = 0; j < n; ++j) {
      const double d = r[j] - s.mean[j];
      s.stddev[j] += d * d;
    }
  for (std::size_t j = 0; j < n; ++j) {
    s.stddev[j] = std::sqrt(s.stddev[j] / m);
    if (!(s.stddev[j] > 0) || s.stddev[j] <= 1e-12 * std::max(1.0, std::abs(s.mean[j])))
      throw ZeroVarianceError(s.features[j]);
  }
  return s;
}

inline std::vector<double> feature_row(const EngineeredTrip& e, std::span<const std::string> features) {
  std::vector<double> row;
  row.reserve(features.size());
  for (const auto& f : features) row.push_back(feature_value(e, f));
  return row;
}

inline std::vector<std::vector<double>> feature_matrix(std::span<const EngineeredTrip> trips,
                                                       std::span<const std::string> features) {
  std::vector<std::vector<double>> rows;
  rows.reserve(trips.size());
  for (const auto& t : trips) rows.push_back(feature_row(t, features));
  return rows;
}

inline NormStats fit_normalizer(std::span<const EngineeredTrip> trips, std::vector<std::string> features) {
  const auto rows = feature_matrix(trips, features);
  return fit_normalizer(std::span<const std::vector<double>>(rows), std::move(features));
}

inline std::vector<double> normalize(std::span<const double> x, const NormStats& stats) {
  if (x.size() != stats.mean.size()) throw std::invalid_argument("normalize: dimension mismatch");
  std::vector<double> z(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - stats.mean[j]) / stats.stddev[j];
  return z;
}

// ---------------------------------------------------------------------------
// Train/test split

template <class T>
struct DatasetSplit {
  std::vector<T> train;
  std::vector<T> test;
  double ratio = 0;
  std::uint64_t seed = 0;
};

/// Seeded shuffle then cut: round(ratio * n) rows go to train.
template <class T>
DatasetSplit<T> split(std::span<const T> items, double ratio, std::uint64_t seed) {
  if (items.empty()) throw std::invalid_argument("split: empty input");
  if (!(ratio > 0 && ratio < 1)) throw std::invalid_argument("split: ratio must lie in (0, 1)");
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(items.size())));
  DatasetSplit<T> out;
  out.ratio = ratio;
  out.seed = seed;
  out.train.reserve(n_train);
  out.test.reserve(items.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i)
    (i < n_train ? out.train : out.test).push_back(items[order[i]]);
  return out;
}

template <class T>
DatasetSplit<T> split(const std::vector<T>& items, double ratio, std::uint64_t seed) {
  return split(std::span<const T>(items), ratio, seed);
}

}  // namespace urbanflow::ingest
