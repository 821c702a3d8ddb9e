#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "urbanflow/spatiotemporal/aggregate.hpp"
#include "urbanflow/spatiotemporal/grid.hpp"

namespace urbanflow::spatiotemporal {

enum class HeatmapKind { Density, CongestionIndex };

inline const char* to_string(HeatmapKind k) { return k == HeatmapKind::Density ? "density" : "congestion_index"; }

/// rows x cols surface, row-major from the south-west cell. Absent cells
/// are empty optionals, never zero.
struct Heatmap {
  GridSpec grid;
  std::vector<std::optional<double>> values;
  HeatmapKind kind = HeatmapKind::CongestionIndex;
  BinFilter filter;

  std::optional<double> at(int row, int col) const { return values.at(grid.flat({row, col})); }
  std::size_t populated() const {
    std::size_t n = 0;
    for (const auto& v : values) n += v.has_value();
    return n;
  }
  bool operator==(const Heatmap&) const = default;
};

class HeatmapError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline Heatmap build_heatmap(std::span<const CongestionCell> cells, const GridSpec& grid, BinFilter filter = {}) {
  grid.validate();
  Heatmap hm{grid, std::vector<std::optional<double>>(grid.cell_count()), HeatmapKind::CongestionIndex, filter};
  for (const auto& c : cells) {
    if (c.cell.row < 0 || c.cell.row >= grid.rows || c.cell.col < 0 || c.cell.col >= grid.cols)
      throw HeatmapError("heatmap: cell (" + std::to_string(c.cell.row) + "," + std::to_string(c.cell.col) +
                         ") lies outside the " + std::to_string(grid.rows) + "x" + std::to_string(grid.cols) +
                         " grid");
    auto& slot = hm.values[grid.flat(c.cell)];
    if (slot)
      throw HeatmapError("heatmap: more than one value for cell (" + std::to_string(c.cell.row) + "," +
                         std::to_string(c.cell.col) + "); filter the cells to a single time bin");
    slot = c.congestion_index;
  }
  return hm;
}

// ---------------------------------------------------------------------------
// Export formats

enum class ExportFormat { GridText, GeoJson };

inline ExportFormat parse_export_format(const std::string& tag) {
  if (tag == "grid" || tag == "txt" || tag == "grid-text") return ExportFormat::GridText;
  if (tag == "geojson" || tag == "geo") return ExportFormat::GeoJson;
  throw HeatmapError("unknown heatmap format '" + tag + "' (expected grid or geojson)");
}

namespace heatmap_detail {
inline std::string num(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}
}  // namespace heatmap_detail

/// Header `rows cols lat_min lon_min lat_max lon_max`, then one line per row
/// (row 0 first) of space-separated values with NA for absent cells.
inline std::string export_grid_text(const Heatmap& hm) {
  using heatmap_detail::num;
  std::ostringstream out;
  const auto& b = hm.grid.bbox;
  out << hm.grid.rows << ' ' << hm.grid.cols << ' ' << num(b.lat_min) << ' ' << num(b.lon_min) << ' '
      << num(b.lat_max) << ' ' << num(b.lon_max) << '\n';
  for (int r = 0; r < hm.grid.rows; ++r) {
    for (int c = 0; c < hm.grid.cols; ++c) {
      if (c) out << ' ';
      const auto& v = hm.values[hm.grid.flat({r, c})];
      out << (v ? num(*v) : std::string("NA"));
    }
    out << '\n';
  }
  return out.str();
}

inline Heatmap parse_grid_text(const std::string& text, HeatmapKind kind = HeatmapKind::CongestionIndex) {
  std::istringstream in(text);
  Heatmap hm;
  hm.kind = kind;
  auto& g = hm.grid;
  std::string tok[6];
  for (auto& t : tok)
    if (!(in >> t)) throw HeatmapError("grid text: truncated header");
  auto to_num = [](const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw HeatmapError("grid text: bad number '" + s + "'");
    return v;
  };
  g.rows = static_cast<int>(to_num(tok[0]));
  g.cols = static_cast<int>(to_num(tok[1]));
  g.bbox = {to_num(tok[2]), to_num(tok[3]), to_num(tok[4]), to_num(tok[5])};
  g.validate();
  hm.values.resize(g.cell_count());
  for (auto& v : hm.values) {
    std::string t;
    if (!(in >> t)) throw HeatmapError("grid text: truncated values");
    if (t != "NA") v = to_num(t);
  }
  std::string extra;
  if (in >> extra) throw HeatmapError("grid text: trailing data");
  return hm;
}

/// FeatureCollection with one rectangle per populated cell carrying
/// `value`, `row` and `col` properties. Coordinates are [lon, lat].
inline nlohmann::json heatmap_geojson(const Heatmap& hm) {
  nlohmann::json features = nlohmann::json::array();
  const auto& g = hm.grid;
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c) {
      const auto& v = hm.values[g.flat({r, c})];
      if (!v) continue;
      const double s = g.row_lat_min(r), n = g.row_lat_max(r), w = g.col_lon_min(c), e = g.col_lon_max(c);
      features.push_back({{"type", "Feature"},
                          {"geometry",
                           {{"type", "Polygon"},
                            {"coordinates", {{{w, s}, {e, s}, {e, n}, {w, n}, {w, s}}}}}},
                          {"properties", {{"value", *v}, {"row", r}, {"col", c}}}});
    }
  nlohmann::json out = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  out["kind"] = to_string(hm.kind);
  out["grid"] = {{"rows", g.rows},
                 {"cols", g.cols},
                 {"lat_min", g.bbox.lat_min},
                 {"lon_min", g.bbox.lon_min},
                 {"lat_max", g.bbox.lat_max},
                 {"lon_max", g.bbox.lon_max}};
  if (hm.filter.day_of_week) out["day"] = *hm.filter.day_of_week;
  if (hm.filter.hour) out["hour"] = *hm.filter.hour;
  return out;
}

inline Heatmap parse_geojson(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Heatmap hm;
    const auto& g = j.at("grid");
    hm.grid.rows = g.at("rows").get<int>();
    hm.grid.cols = g.at("cols").get<int>();
    hm.grid.bbox = {g.at("lat_min").get<double>(), g.at("lon_min").get<double>(), g.at("lat_max").get<double>(),
                    g.at("lon_max").get<double>()};
    hm.grid.validate();
    hm.kind = j.at("kind").get<std::string>() == "density" ? HeatmapKind::Density : HeatmapKind::CongestionIndex;
    if (j.contains("day")) hm.filter.day_of_week = j.at("day").get<int>();
    if (j.contains("hour")) hm.filter.hour = j.at("hour").get<int>();
    hm.values.resize(hm.grid.cell_count());
    for (const auto& f : j.at("features")) {
      const auto& p = f.at("properties");
      hm.values.at(hm.grid.flat({p.at("row").get<int>(), p.at("col").get<int>()})) = p.at("value").get<double>();
    }
    return hm;
  } catch (const nlohmann::json::exception& e) {
    throw HeatmapError(std::string("geojson: ") + e.what());
  }
}

inline std::string export_heatmap(const Heatmap& hm, ExportFormat format) {
  if (format == ExportFormat::GridText) return export_grid_text(hm);
  return heatmap_geojson(hm).dump() + "\n";
}

inline std::string export_heatmap(const Heatmap& hm, const std::string& format_tag) {
  return export_heatmap(hm, parse_export_format(format_tag));
}

}  // namespace urbanflow::spatiotemporal
