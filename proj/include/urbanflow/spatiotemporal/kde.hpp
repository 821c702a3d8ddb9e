#pragma once

// Gaussian kernel density on grid cell centres.
//
// Points are projected to local equirectangular metres about the bbox
// centre. The kernel is normalised in the plane, so the surface integrates
// to about one when the bandwidth is small next to the bbox; cell values
// are densities per square metre.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "urbanflow/spatiotemporal/grid.hpp"
#include "urbanflow/spatiotemporal/heatmap.hpp"

namespace urbanflow::spatiotemporal {

struct LatLon {
  double lat = 0;
  double lon = 0;
};

inline constexpr double kEarthRadiusM = 6371000.0;
inline constexpr double kDefaultBandwidthM = 250.0;

/// Equirectangular projection about (lat0, lon0), in metres.
struct LocalProjection {
  double lat0, lon0, cos_lat0;

  explicit LocalProjection(const BoundingBox& b)
      : lat0(0.5 * (b.lat_min + b.lat_max)),
        lon0(0.5 * (b.lon_min + b.lon_max)),
        cos_lat0(std::cos(lat0 * M_PI / 180.0)) {}

  double x(double lon) const { return kEarthRadiusM * (lon - lon0) * M_PI / 180.0 * cos_lat0; }
  double y(double lat) const { return kEarthRadiusM * (lat - lat0) * M_PI / 180.0; }
};

/// Area of one grid cell in the projection, m^2.
inline double cell_area_m2(const GridSpec& grid) {
  const LocalProjection proj(grid.bbox);
  const double w = proj.x(grid.bbox.lon_max) - proj.x(grid.bbox.lon_min);
  const double h = proj.y(grid.bbox.lat_max) - proj.y(grid.bbox.lat_min);
  return (w / grid.cols) * (h / grid.rows);
}

inline Heatmap kde(std::span<const LatLon> points, double bandwidth_m, const GridSpec& grid) {
  grid.validate();
  if (points.empty()) throw std::invalid_argument("kde: no points");
  if (!(bandwidth_m > 0) || !std::isfinite(bandwidth_m)) throw std::invalid_argument("kde: bandwidth must be positive");
  const LocalProjection proj(grid.bbox);
  const double inv2h2 = 1.0 / (2.0 * bandwidth_m * bandwidth_m);
  const double norm = 1.0 / (2.0 * M_PI * bandwidth_m * bandwidth_m * static_cast<double>(points.size()));

  std::vector<double> cx(static_cast<std::size_t>(grid.cols)), cy(static_cast<std::size_t>(grid.rows));
  for (int c = 0; c < grid.cols; ++c) cx[static_cast<std::size_t>(c)] = proj.x(grid.center_lon(c));
  for (int r = 0; r < grid.rows; ++r) cy[static_cast<std::size_t>(r)] = proj.y(grid.center_lat(r));

  // The kernel separates into row and column factors.
  std::vector<double> sum(grid.cell_count(), 0.0);
  std::vector<double> fx(cx.size()), fy(cy.size());
  for (const auto& p : points) {
    const double px = proj.x(p.lon), py = proj.y(p.lat);
    for (std::size_t c = 0; c < cx.size(); ++c) {
      const double d = cx[c] - px;
      fx[c] = std::exp(-d * d * inv2h2);
    }
    for (std::size_t r = 0; r < cy.size(); ++r) {
      const double d = cy[r] - py;
      fy[r] = std::exp(-d * d * inv2h2);
    }
    for (std::size_t r = 0; r < cy.size(); ++r) {
      if (fy[r] == 0.0) continue;
      double* row = sum.data() + r * cx.size();
      for (std::size_t c = 0; c < cx.size(); ++c) row[c] += fy[r] * fx[c];
    }
  }
  Heatmap hm{grid, std::vector<std::optional<double>>(grid.cell_count()), HeatmapKind::Density, {}};
  for (std::size_t i = 0; i < sum.size(); ++i) hm.values[i] = sum[i] * norm;
  return hm;
}

/// Sum of cell values times cell area; about 1 for a well-contained sample.
inline double integrate_density(const Heatmap& hm) {
  double s = 0;
  for (const auto& v : hm.values)
    if (v) s += *v;
  return s * cell_area_m2(hm.grid);
}

}  // namespace urbanflow::spatiotemporal
