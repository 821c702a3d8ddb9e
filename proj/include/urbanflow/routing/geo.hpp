#pragma once

#include <cmath>

namespace urbanflow::routing {

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kPi = 3.14159265358979323846;

struct LatLon {
  double lat = 0;
  double lon = 0;
  bool operator==(const LatLon&) const = default;
};

inline bool valid(const LatLon& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90 && p.lat <= 90 && p.lon >= -180 &&
         p.lon <= 180;
}

/// Great-circle distance in metres by the haversine formula.
inline double haversine(const LatLon& a, const LatLon& b) {
  constexpr double kDeg = kPi / 180.0;
  const double phi1 = a.lat * kDeg, phi2 = b.lat * kDeg;
  const double sdphi = std::sin((phi2 - phi1) / 2);
  const double sdl = std::sin((b.lon - a.lon) * kDeg / 2);
  double h = sdphi * sdphi + std::cos(phi1) * std::cos(phi2) * sdl * sdl;
  if (h > 1) h = 1;
  return 2 * kEarthRadiusM * std::asin(std::sqrt(h));
}

}  // namespace urbanflow::routing
