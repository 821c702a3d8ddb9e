#pragma once

// Reference implementations for the test suites. Each one is written
// independently of the library code it checks: different formulas where
// the math allows, plain loops and containers otherwise. Nothing here
// includes library algorithms, only the data types needed to read inputs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "urbanflow/ingest/trip.hpp"
#include "urbanflow/routing/graph.hpp"
#include "urbanflow/routing/snapshot.hpp"

namespace oracle {

constexpr double kRadius = 6371000.0;

/// Central angle from unit vectors: atan2(|a x b|, a . b).
inline double great_circle_m(double lat1, double lon1, double lat2, double lon2) {
  const long double d = 3.14159265358979323846264338327950288L / 180.0L;
  auto vec = [&](double lat, double lon) {
    const long double p = lat * d, l = lon * d;
    return std::array<long double, 3>{std::cos(p) * std::cos(l), std::cos(p) * std::sin(l), std::sin(p)};
  };
  const auto a = vec(lat1, lon1), b = vec(lat2, lon2);
  const long double cx = a[1] * b[2] - a[2] * b[1];
  const long double cy = a[2] * b[0] - a[0] * b[2];
  const long double cz = a[0] * b[1] - a[1] * b[0];
  const long double cross = std::sqrt(cx * cx + cy * cy + cz * cz);
  const long double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return static_cast<double>(kRadius * std::atan2(cross, dot));
}

inline double arc_cost(const urbanflow::routing::Arc& a, const urbanflow::routing::TrafficSnapshot& s) {
  double f = 1.0;
  if (auto it = s.speed_factor.find(a.edge); it != s.speed_factor.end()) f = it->second;
  return a.length_m / (a.speed_mps * f);
}

/// Single-source distances by repeated relaxation over the arc list.
inline std::vector<double> bellman_ford(const urbanflow::routing::RoadGraph& g,
                                        const urbanflow::routing::TrafficSnapshot& s, std::size_t src) {
  std::vector<double> d(g.node_count(), std::numeric_limits<double>::infinity());
  d[src] = 0;
  for (std::size_t round = 0; round + 1 < g.node_count(); ++round) {
    bool changed = false;
    for (const auto& a : g.arcs()) {
      if (d[a.from] == std::numeric_limits<double>::infinity()) continue;
      const double nd = d[a.from] + arc_cost(a, s);
      if (nd < d[a.to]) {
        d[a.to] = nd;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return d;
}

/// Nearest node by exhaustive scan; ties go to the smaller node id.
inline urbanflow::routing::NodeId nearest_node(const urbanflow::routing::RoadGraph& g, double lat, double lon) {
  urbanflow::routing::NodeId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& n : g.nodes()) {
    const double dd = great_circle_m(lat, lon, n.pos.lat, n.pos.lon);
    if (dd < best_d - 1e-9 || (std::abs(dd - best_d) <= 1e-9 && n.id < best)) {
      best_d = std::min(best_d, dd);
      best = n.id;
    }
  }
  return best;
}

/// Edge factors after applying updates one at a time; invalid factors skip.
struct Update {
  std::int64_t edge;
  double factor;
};
inline std::map<std::int64_t, double> fold_updates(std::map<std::int64_t, double> base, const std::vector<Update>& us) {
  for (const auto& u : us)
    if (u.factor > 0 && u.factor <= 1 && std::isfinite(u.factor)) base[u.edge] = u.factor;
  return base;
}

// ---------------------------------------------------------------------------
// Least squares

/// Solves (A'A) b = A'y in long double by Gauss-Jordan with partial
/// pivoting; A gets an implicit leading column of ones.
inline std::vector<double> normal_equations(const std::vector<std::vector<double>>& X, const std::vector<double>& y) {
  const std::size_t n = X.front().size() + 1;
  std::vector<std::vector<long double>> M(n, std::vector<long double>(n + 1, 0.0L));
  for (std::size_t i = 0; i < X.size(); ++i) {
    std::vector<long double> row(n);
    row[0] = 1;
    for (std::size_t j = 1; j < n; ++j) row[j] = X[i][j - 1];
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) M[a][b] += row[a] * row[b];
      M[a][n] += row[a] * y[i];
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(M[r][c]) > std::abs(M[p][c])) p = r;
    std::swap(M[p], M[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const long double f = M[r][c] / M[c][c];
      for (std::size_t k = c; k <= n; ++k) M[r][k] -= f * M[c][k];
    }
  }
  std::vector<double> beta(n);
  for (std::size_t c = 0; c < n; ++c) beta[c] = static_cast<double>(M[c][n] / M[c][c]);
  return beta;
}

/// Kahan-compensated MAE and RMSE.
inline std::pair<double, double> mae_rmse(const std::vector<double>& y, const std::vector<double>& yhat) {
  long double abs_sum = 0, abs_c = 0, sq_sum = 0, sq_c = 0;
  auto add = [](long double& sum, long double& c, long double v) {
    const long double t = v - c;
    const long double s = sum + t;
    c = (s - sum) - t;
    sum = s;
  };
  for (std::size_t i = 0; i < y.size(); ++i) {
    const long double r = static_cast<long double>(y[i]) - yhat[i];
    add(abs_sum, abs_c, std::abs(r));
    add(sq_sum, sq_c, r * r);
  }
  const long double m = static_cast<long double>(y.size());
  return {static_cast<double>(abs_sum / m), static_cast<double>(std::sqrt(sq_sum / m))};
}

// ---------------------------------------------------------------------------
// K-Means

using Rows = std::vector<std::vector<double>>;

inline double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return s;
}

inline std::vector<std::size_t> assign(const Rows& pts, const Rows& cents) {
  std::vector<std::size_t> lab(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < cents.size(); ++c)
      if (sqdist(pts[i], cents[c]) < sqdist(pts[i], cents[best])) best = c;
    lab[i] = best;
  }
  return lab;
}

inline double objective(const Rows& pts, const std::vector<std::size_t>& lab, const Rows& cents) {
  double s = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) s += sqdist(pts[i], cents[lab[i]]);
  return s;
}

struct LloydResult {
  Rows centroids;
  double inertia = 0;
  int iterations = 0;
};

/// Textbook Lloyd from given centroids. Means first; an empty cluster takes
/// the unused point farthest from its own cluster's mean (lowest index on
/// ties). Stops when no centroid moves by `tol` or more.
inline LloydResult lloyd(const Rows& pts, Rows cents, double tol, int max_iter) {
  const std::size_t k = cents.size(), dim = pts.front().size();
  int it = 0;
  while (it < max_iter) {
    const auto lab = assign(pts, cents);
    Rows next(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> cnt(k, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ++cnt[lab[i]];
      for (std::size_t j = 0; j < dim; ++j) next[lab[i]][j] += pts[i][j];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (cnt[c])
        for (auto& v : next[c]) v /= static_cast<double>(cnt[c]);
    std::vector<bool> taken(pts.size(), false);
    for (std::size_t c = 0; c < k; ++c) {
      if (cnt[c]) continue;
      std::optional<std::size_t> pick;
      double far = -1;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (taken[i]) continue;
        const double d = sqdist(pts[i], next[lab[i]]);
        if (d > far) far = d, pick = i;
      }
      if (pick) {
        taken[*pick] = true;
        next[c] = pts[*pick];
      }
    }
    double shift = 0;
    for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, std::sqrt(sqdist(next[c], cents[c])));
    cents = next;
    ++it;
    if (shift < tol) break;
  }
  const auto lab = assign(pts, cents);
  return {cents, objective(pts, lab, cents), it};
}

// ---------------------------------------------------------------------------
// Cleaning and aggregation

struct CleanBounds {
  double lat_min, lat_max, lon_min, lon_max;
  double max_mph, min_sec, max_sec, max_mi;
};

/// Keeps a record iff every sanity bound holds.
inline bool keep(const urbanflow::ingest::TripRecord& r, const CleanBounds& b) {
  auto inside = [&](double lat, double lon) {
    return lat >= b.lat_min && lat <= b.lat_max && lon >= b.lon_min && lon <= b.lon_max;
  };
  const double secs = static_cast<double>(r.dropoff_time - r.pickup_time);
  if (!inside(r.pickup_lat, r.pickup_lon) || !inside(r.dropoff_lat, r.dropoff_lon)) return false;
  if (secs < b.min_sec || secs > b.max_sec) return false;
  if (!(r.trip_distance > 0) || r.trip_distance > b.max_mi) return false;
  return r.trip_distance * 3600.0 / secs <= b.max_mph;
}

/// Per (day, hour) mean of minutes per mile, keyed by day * 24 + hour.
inline std::map<int, std::pair<std::size_t, double>> temporal_means(
    const std::vector<urbanflow::ingest::EngineeredTrip>& trips) {
  std::map<int, std::pair<std::size_t, long double>> acc;
  for (const auto& t : trips) {
    if (!(t.trip.trip_distance > 0)) continue;
    auto& a = acc[t.day_of_week * 24 + t.hour_of_day];
    ++a.first;
    a.second += (static_cast<long double>(t.trip.dropoff_time - t.trip.pickup_time) / 60.0L) / t.trip.trip_distance;
  }
  std::map<int, std::pair<std::size_t, double>> out;
  for (const auto& [k, v] : acc) out[k] = {v.first, static_cast<double>(v.second / v.first)};
  return out;
}

// ---------------------------------------------------------------------------
// Kernel density

/// Gaussian kernel sum at every cell centre, one (cell, point) pair at a time.
inline std::vector<double> kde_double_loop(const std::vector<std::pair<double, double>>& pts, double h, double lat_min,
                                           double lon_min, double lat_max, double lon_max, int rows, int cols) {
  const double rad = 3.14159265358979323846 / 180.0;
  const double lat0 = (lat_min + lat_max) / 2;
  const double kx = kRadius * rad * std::cos(lat0 * rad), ky = kRadius * rad;
  std::vector<double> out(static_cast<std::size_t>(rows * cols), 0.0);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const double clat = lat_min + (lat_max - lat_min) * (r + 0.5) / rows;
      const double clon = lon_min + (lon_max - lon_min) * (c + 0.5) / cols;
      long double s = 0;
      for (const auto& [lat, lon] : pts) {
        const double dx = (clon - lon) * kx, dy = (clat - lat) * ky;
        s += std::exp(-(dx * dx + dy * dy) / (2 * h * h));
      }
      out[static_cast<std::size_t>(r * cols + c)] =
          static_cast<double>(s / (2 * 3.14159265358979323846 * h * h * static_cast<double>(pts.size())));
    }
  return out;
}

}  // namespace oracle
