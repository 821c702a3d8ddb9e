#pragma once

// Congestion regimes: K-Means over (congestion_index, hour, day) of
// spatiotemporal cells, z-scored. Regimes are relabelled in ascending order
// of mean congestion index, so regime 0 is the freest-flowing.

#include <algorithm>
#include <array>
#include <numeric>
#include <span>
#include <vector>

#include "urbanflow/ingest/features.hpp"
#include "urbanflow/ml/kmeans.hpp"
#include "urbanflow/spatiotemporal/aggregate.hpp"

namespace urbanflow::ml {

inline constexpr std::size_t kDefaultRegimes = 4;

struct RegimeSummary {
  std::size_t regime = 0;
  std::size_t cells = 0;
  double mean_congestion = 0;
  std::vector<int> dominant_hours;  // up to three, most frequent first
};

struct CongestionRegimes {
  KMeansModel model;  // centroids in normalised space, relabelled order
  ingest::NormStats norm;
  std::vector<std::size_t> labels;  // one per input cell
  std::vector<RegimeSummary> regimes;
};

inline const std::vector<std::string>& congestion_feature_names() {
  static const std::vector<std::string> names{"congestion_index", "hour", "day_of_week"};
  return names;
}

inline std::vector<std::vector<double>> congestion_rows(std::span<const spatiotemporal::CongestionCell> cells) {
  std::vector<std::vector<double>> rows;
  rows.reserve(cells.size());
  for (const auto& c : cells)
    rows.push_back({c.congestion_index, static_cast<double>(c.bin.hour), static_cast<double>(c.bin.day_of_week)});
  return rows;
}

/// Fits z-score stats on the cell features. A feature that is constant over
/// the cells keeps unit scale instead of failing, since a single day or
/// hour of data is a legitimate input here.
inline ingest::NormStats congestion_normalizer(const std::vector<std::vector<double>>& rows) {
  ingest::NormStats s{congestion_feature_names(), std::vector<double>(3, 0.0), std::vector<double>(3, 1.0)};
  if (rows.empty()) return s;
  for (std::size_t j = 0; j < 3; ++j) {
    double mean = 0;
    for (const auto& r : rows) mean += r[j];
    mean /= static_cast<double>(rows.size());
    double var = 0;
    for (const auto& r : rows) var += (r[j] - mean) * (r[j] - mean);
    var /= static_cast<double>(rows.size());
    s.mean[j] = mean;
    s.stddev[j] = var > 0 ? std::sqrt(var) : 1.0;
  }
  return s;
}

inline Points normalized_congestion_points(const std::vector<std::vector<double>>& rows, const ingest::NormStats& s) {
  Points pts(3);
  for (const auto& r : rows) {
    const auto z = ingest::normalize(r, s);
    pts.push_back(z);
  }
  return pts;
}

inline CongestionRegimes cluster_congestion(std::span<const spatiotemporal::CongestionCell> cells, std::size_t k,
                                            const KMeansOptions& opt = {}) {
  const auto rows = congestion_rows(cells);
  CongestionRegimes out;
  out.norm = congestion_normalizer(rows);
  const Points pts = normalized_congestion_points(rows, out.norm);
  KMeansModel fitted = kmeans_fit(pts, k, opt);
  const auto raw_labels = kmeans_assign(pts, fitted.centroids);

  std::vector<double> sum(k, 0.0);
  std::vector<std::size_t> count(k, 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    sum[raw_labels[i]] += cells[i].congestion_index;
    ++count[raw_labels[i]];
  }
  std::vector<double> mean(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) mean[c] = count[c] ? sum[c] / static_cast<double>(count[c]) : 0.0;
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean[a] < mean[b]; });
  std::vector<std::size_t> rank(k);
  for (std::size_t r = 0; r < k; ++r) rank[order[r]] = r;

  out.model = fitted;
  out.model.centroids = Points(fitted.centroids.dim());
  for (std::size_t r = 0; r < k; ++r) out.model.centroids.push_back(fitted.centroids[order[r]]);
  out.labels.resize(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) out.labels[i] = rank[raw_labels[i]];

  out.regimes.resize(k);
  std::vector<std::array<std::size_t, 24>> hours(k, std::array<std::size_t, 24>{});
  for (std::size_t i = 0; i < cells.size(); ++i) ++hours[out.labels[i]][static_cast<std::size_t>(cells[i].bin.hour)];
  for (std::size_t r = 0; r < k; ++r) {
    auto& s = out.regimes[r];
    s.regime = r;
    s.cells = count[order[r]];
    s.mean_congestion = mean[order[r]];
    std::vector<int> hrs(24);
    std::iota(hrs.begin(), hrs.end(), 0);
    std::stable_sort(hrs.begin(), hrs.end(), [&](int a, int b) {
      return hours[r][static_cast<std::size_t>(a)] > hours[r][static_cast<std::size_t>(b)];
    });
    for (int h : hrs) {
      if (s.dominant_hours.size() == 3 || hours[r][static_cast<std::size_t>(h)] == 0) break;
      s.dominant_hours.push_back(h);
    }
  }
  return out;
}

}  // namespace urbanflow::ml
