#pragma once

// Seeded generator of TLC-schema yellow-taxi CSV text. Trips start at a
// handful of Manhattan hotspots, travel slower in weekday rush hours, and a
// configurable fraction of rows is corrupted the way real exports are
// (zero coordinates, impossible speeds, bad timestamps, short rows).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "urbanflow/ingest/parse.hpp"
#include "urbanflow/ingest/trip.hpp"
#include "urbanflow/rng.hpp"

namespace urbanflow::ingest {

struct SyntheticConfig {
  std::size_t rows = 10000;
  std::uint64_t seed = 2015;
  double dirty_fraction = 0.05;
  // Local start of the sampled month.
  std::int64_t month_start_local = civil::to_seconds({2015, 1, 1, 0, 0, 0});
  int days = 31;
};

namespace synthetic_detail {

struct Hotspot {
  double lat, lon, spread_deg, weight;
};

inline constexpr Hotspot kHotspots[] = {
    {40.7580, -73.9855, 0.010, 0.30},  // Times Square / Midtown
    {40.7074, -74.0113, 0.008, 0.15},  // Financial District
    {40.7812, -73.9665, 0.012, 0.15},  // Central Park
    {40.7505, -73.9934, 0.008, 0.15},  // Penn Station
    {40.7282, -73.9942, 0.010, 0.15},  // Greenwich Village
    {40.6413, -73.7781, 0.010, 0.10},  // JFK
};

// Mean network speed in mph by local hour; weekday rush hours are slower.
inline double mean_speed_mph(int hour, int weekday) {
  const bool weekend = weekday >= 5;
  if (!weekend && (hour >= 7 && hour <= 9)) return 7.5;
  if (!weekend && (hour >= 17 && hour <= 19)) return 7.0;
  if (hour >= 12 && hour <= 15) return 12.0;
  if (hour >= 0 && hour <= 5) return 18.0;
  return 10.5;
}

// Relative pickup frequency by hour.
inline constexpr double kHourWeight[24] = {0.6, 0.4, 0.3, 0.2, 0.2, 0.3, 0.7, 1.2, 1.5, 1.4, 1.1, 1.1,
                                           1.2, 1.2, 1.2, 1.2, 1.1, 1.5, 1.7, 1.6, 1.4, 1.3, 1.1, 0.9};

inline double haversine_mi(double lat1, double lon1, double lat2, double lon2) {
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const double dphi = (lat2 - lat1) * kDeg, dl = (lon2 - lon1) * kDeg;
  const double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(lat1 * kDeg) * std::cos(lat2 * kDeg) * std::sin(dl / 2) * std::sin(dl / 2);
  return 2 * 3958.7613 * std::asin(std::sqrt(a));
}

}  // namespace synthetic_detail

/// Generates `cfg.rows` data rows (plus header) in the TLC yellow schema.
inline std::string generate_synthetic_trips(const SyntheticConfig& cfg) {
  using namespace synthetic_detail;
  Rng rng(cfg.seed);
  std::ostringstream out;
  out << "VendorID,tpep_pickup_datetime,tpep_dropoff_datetime,passenger_count,trip_distance,"
         "pickup_longitude,pickup_latitude,RateCodeID,store_and_fwd_flag,dropoff_longitude,"
         "dropoff_latitude,payment_type,fare_amount\n";

  double hour_total = 0;
  for (double w : kHourWeight) hour_total += w;
  double spot_total = 0;
  for (const auto& h : kHotspots) spot_total += h.weight;

  auto pick_spot = [&]() -> const Hotspot& {
    double u = rng.uniform01() * spot_total;
    for (const auto& h : kHotspots) {
      if (u < h.weight) return h;
      u -= h.weight;
    }
    return kHotspots[0];
  };

  for (std::size_t i = 0; i < cfg.rows; ++i) {
    double u = rng.uniform01() * hour_total;
    int hour = 0;
    while (hour < 23 && u >= kHourWeight[hour]) u -= kHourWeight[hour++];
    const auto day = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(cfg.days)));
    const std::int64_t local_pickup =
        cfg.month_start_local + day * 86400 + hour * 3600 + static_cast<std::int64_t>(rng.below(3600));
    const int weekday = civil::weekday(local_pickup);

    const Hotspot& a = pick_spot();
    const Hotspot& b = pick_spot();
    double plat = rng.normal(a.lat, a.spread_deg), plon = rng.normal(a.lon, a.spread_deg);
    double dlat = rng.normal(b.lat, b.spread_deg), dlon = rng.normal(b.lon, b.spread_deg);
    const double crow = haversine_mi(plat, plon, dlat, dlon);
    double distance = std::max(0.1, crow * rng.uniform(1.15, 1.45));
    const double speed = mean_speed_mph(hour, weekday) * std::exp(rng.normal(0.0, 0.15));
    double duration = distance / speed * 3600.0 + rng.uniform(60.0, 240.0);
    int passengers = 1 + static_cast<int>(rng.below(4));
    double fare = 2.5 + 2.5 * distance + 0.5 * duration / 60.0;
    std::string pickup_text = civil::format(local_pickup);
    std::int64_t local_dropoff = local_pickup + static_cast<std::int64_t>(std::llround(duration));
    std::string dropoff_text = civil::format(local_dropoff);
    bool short_row = false;

    if (rng.uniform01() < cfg.dirty_fraction) {
      switch (rng.below(8)) {
        case 0: plat = plon = 0.0; break;                          // GPS dropout
        case 1: dropoff_text = pickup_text; distance = 5.0; break; // zero duration
        case 2: distance = 250.0; break;                           // odometer glitch
        case 3: plat = 91.0; break;                                // out of range
        case 4: pickup_text = "2015-13-45 99:00:00"; break;         // bad timestamp
        case 5: short_row = true; break;
        case 6: fare = -fare; break;                               // refund row
        case 7: dropoff_text = civil::format(local_pickup + 6 * 3600); break;
      }
    }
    out << (1 + rng.below(2)) << ',' << pickup_text << ',' << dropoff_text << ',' << passengers << ','
        << detail::shortest(std::round(distance * 100) / 100) << ',' << detail::shortest(plon) << ','
        << detail::shortest(plat);
    if (short_row) {
      out << '\n';
      continue;
    }
    out << ",1,N," << detail::shortest(dlon) << ',' << detail::shortest(dlat) << ",1,"
        << detail::shortest(std::round(fare * 100) / 100) << '\n';
  }
  return out.str();
}

}  // namespace urbanflow::ingest
