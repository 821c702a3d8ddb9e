#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "urbanflow/ingest/clean.hpp"

namespace urbanflow::spatiotemporal {

using ingest::BoundingBox;

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Uniform lat/lon grid over a bounding box. Row 0 is the southern edge,
/// column 0 the western edge. Bounds are closed; a point on an interior
/// edge belongs to the lower-index cell, so cells are (lo, hi] except the
/// first, which is closed at both ends.
struct GridSpec {
  BoundingBox bbox{};
  int rows = 40;
  int cols = 40;

  void validate() const {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid: rows and cols must be positive");
    if (!(bbox.lat_min < bbox.lat_max && bbox.lon_min < bbox.lon_max))
      throw std::invalid_argument("grid: degenerate bounding box");
  }

  std::size_t cell_count() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  double cell_height_deg() const { return (bbox.lat_max - bbox.lat_min) / rows; }
  double cell_width_deg() const { return (bbox.lon_max - bbox.lon_min) / cols; }

  std::optional<Cell> cell_of(double lat, double lon) const {
    if (!bbox.contains(lat, lon)) return std::nullopt;
    int r = index(lat, bbox.lat_min, bbox.lat_max, rows);
    while (r > 0 && lat <= row_lat_min(r)) --r;
    while (r + 1 < rows && lat > row_lat_max(r)) ++r;
    int c = index(lon, bbox.lon_min, bbox.lon_max, cols);
    while (c > 0 && lon <= col_lon_min(c)) --c;
    while (c + 1 < cols && lon > col_lon_max(c)) ++c;
    return Cell{r, c};
  }

  double row_lat_min(int r) const { return bbox.lat_min + (bbox.lat_max - bbox.lat_min) * r / rows; }
  double row_lat_max(int r) const { return r + 1 == rows ? bbox.lat_max : row_lat_min(r + 1); }
  double col_lon_min(int c) const { return bbox.lon_min + (bbox.lon_max - bbox.lon_min) * c / cols; }
  double col_lon_max(int c) const { return c + 1 == cols ? bbox.lon_max : col_lon_min(c + 1); }
  double center_lat(int r) const { return 0.5 * (row_lat_min(r) + row_lat_max(r)); }
  double center_lon(int c) const { return 0.5 * (col_lon_min(c) + col_lon_max(c)); }

  std::size_t flat(Cell c) const {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(cols) + static_cast<std::size_t>(c.col);
  }

  bool operator==(const GridSpec&) const = default;

 private:
  // First guess; cell_of() settles it against the exact edge values.
  static int index(double v, double lo, double hi, int n) {
    const double t = (v - lo) / (hi - lo) * n;
    int i = static_cast<int>(std::ceil(t)) - 1;
    return std::clamp(i, 0, n - 1);
  }
};

/// Parses "ROWSxCOLS", e.g. "40x40".
inline std::pair<int, int> parse_grid_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw std::invalid_argument("grid size must look like 40x40");
  try {
    std::size_t used = 0;
    const int r = std::stoi(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("");
    const std::string rest = text.substr(x + 1);
    const int c = std::stoi(rest, &used);
    if (used != rest.size() || r < 1 || c < 1) throw std::invalid_argument("");
    return {r, c};
  } catch (const std::logic_error&) {
    throw std::invalid_argument("grid size must look like 40x40, got '" + text + "'");
  }
}

}  // namespace urbanflow::spatiotemporal
