#pragma once

// Lloyd's K-Means with K-Means++ seeding.
//
// Distances are squared Euclidean; argmin ties go to the lowest centroid
// index. Reductions run in a fixed order so a seed reproduces a model bit
// for bit.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "urbanflow/ml/points.hpp"
#include "urbanflow/rng.hpp"

namespace urbanflow::ml {

class KMeansError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct KMeansOptions {
  double tol = 1e-4;  // max centroid shift
  int max_iter = 300;
  std::uint64_t seed = 0;
};

/// Objective value after each assignment step; `reseeded` marks iterations
/// whose update re-seeded an empty cluster.
struct LloydTrace {
  std::vector<double> objective;
  std::vector<bool> reseeded;
};

struct KMeansModel {
  std::size_t k = 0;
  Points centroids;
  double inertia = 0;
  int iterations = 0;
  std::uint64_t seed = 0;

  bool operator==(const KMeansModel&) const = default;
};

inline std::size_t count_distinct(const Points& points) {
  std::set<std::vector<double>> seen;
  for (std::size_t i = 0; i < points.size(); ++i) seen.emplace(points[i].begin(), points[i].end());
  return seen.size();
}

/// K-Means++ seeding: first centroid uniform, then each next one drawn with
/// probability proportional to squared distance to the nearest chosen.
inline Points kmeans_init_pp(const Points& points, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw KMeansError("kmeans: k must be positive");
  if (k > count_distinct(points))
    throw KMeansError("kmeans: k=" + std::to_string(k) + " exceeds the number of distinct points (" +
                      std::to_string(count_distinct(points)) + ")");
  Rng rng(seed);
  const std::size_t n = points.size();
  Points centroids(points.dim());
  centroids.push_back(points[static_cast<std::size_t>(rng.below(n))]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centroids[0]);

  while (centroids.size() < k) {
    double total = 0;
    for (double v : d2) total += v;
    const double target = rng.uniform01() * total;
    std::size_t pick = n;
    double acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0) continue;
      acc += d2[i];
      if (acc > target) {
        pick = i;
        break;
      }
    }
    if (pick == n) {  // rounding left target at the very top; take last positive
      for (std::size_t i = n; i-- > 0;)
        if (d2[i] > 0) {
          pick = i;
          break;
        }
    }
    centroids.push_back(points[pick]);
    const auto c = centroids[centroids.size() - 1];
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], c));
  }
  return centroids;
}

inline std::size_t nearest_centroid(std::span<const double> p, const Points& centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

inline std::vector<std::size_t> kmeans_assign(const Points& points, const Points& centroids) {
  if (centroids.empty()) throw KMeansError("kmeans_assign: no centroids");
  std::vector<std::size_t> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) labels[i] = nearest_centroid(points[i], centroids);
  return labels;
}

/// Sum of squared distances of each point to its labelled centroid.
inline double kmeans_objective(const Points& points, const std::vector<std::size_t>& labels,
                               const Points& centroids) {
  double j = 0;
  for (std::size_t i = 0; i < points.size(); ++i) j += squared_distance(points[i], centroids[labels[i]]);
  return j;
}

/// Cluster means. An empty cluster is re-seeded to the point farthest from
/// its own (updated) cluster centroid; ties go to the lowest point index and
/// a point is used at most once.
inline Points kmeans_update(const Points& points, const std::vector<std::size_t>& labels, std::size_t k,
                            bool* reseeded = nullptr) {
  const std::size_t dim = points.dim();
  Points next(k, dim);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::size_t c = labels.at(i);
    if (c >= k) throw KMeansError("kmeans_update: label out of range");
    ++counts[c];
    auto row = next[c];
    const auto p = points[i];
    for (std::size_t j = 0; j < dim; ++j) row[j] += p[j];
  }
  for (std::size_t c = 0; c < k; ++c)
    if (counts[c] > 0)
      for (double& v : next[c]) v /= static_cast<double>(counts[c]);

  bool any_empty = false;
  std::vector<bool> used(points.size(), false);
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    any_empty = true;
    std::size_t far = points.size();
    double far_d = -1;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (used[i]) continue;
      const double d = squared_distance(points[i], next[labels[i]]);
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    if (far == points.size()) continue;
    used[far] = true;
    auto row = next[c];
    std::copy(points[far].begin(), points[far].end(), row.begin());
  }
  if (reseeded) *reseeded = any_empty;
  return next;
}

/// Lloyd iterations from explicit initial centroids.
inline KMeansModel kmeans_lloyd(const Points& points, Points centroids, const KMeansOptions& opt,
                                LloydTrace* trace = nullptr) {
  const std::size_t k = centroids.size();
  KMeansModel model;
  model.k = k;
  model.seed = opt.seed;
  std::vector<std::size_t> labels;
  int it = 0;
  while (it < opt.max_iter) {
    labels = kmeans_assign(points, centroids);
    if (trace) trace->objective.push_back(kmeans_objective(points, labels, centroids));
    bool reseeded = false;
    Points next = kmeans_update(points, labels, k, &reseeded);
    if (trace) trace->reseeded.push_back(reseeded);
    double shift = 0;
    for (std::size_t c = 0; c < k; ++c) shift = std::max(shift, std::sqrt(squared_distance(next[c], centroids[c])));
    centroids = std::move(next);
    ++it;
    if (shift < opt.tol) break;
  }
  labels = kmeans_assign(points, centroids);
  model.inertia = kmeans_objective(points, labels, centroids);
  if (trace) trace->objective.push_back(model.inertia);
  model.centroids = std::move(centroids);
  model.iterations = it;
  return model;
}

inline KMeansModel kmeans_fit(const Points& points, std::size_t k, const KMeansOptions& opt = {},
                              LloydTrace* trace = nullptr) {
  return kmeans_lloyd(points, kmeans_init_pp(points, k, opt.seed), opt, trace);
}

/// Best of `restarts` seeded fits (seeds opt.seed, opt.seed+1, ...).
inline KMeansModel kmeans_fit_best(const Points& points, std::size_t k, const KMeansOptions& opt, int restarts) {
  KMeansModel best;
  for (int r = 0; r < restarts; ++r) {
    KMeansOptions o = opt;
    o.seed = opt.seed + static_cast<std::uint64_t>(r);
    auto m = kmeans_fit(points, k, o);
    if (r == 0 || m.inertia < best.inertia) best = std::move(m);
  }
  return best;
}

struct ElbowRow {
  std::size_t k;
  double inertia;
};

/// Inertia for k = 1..k_max (capped at the distinct point count). Each k is
/// the best of `restarts` seeded fits plus a warm start from the previous
/// best with the farthest point added, so the curve never increases.
inline std::vector<ElbowRow> elbow_curve(const Points& points, std::size_t k_max, const KMeansOptions& opt,
                                         int restarts = 10) {
  std::vector<ElbowRow> rows;
  k_max = std::min(k_max, count_distinct(points));
  KMeansModel prev;
  for (std::size_t k = 1; k <= k_max; ++k) {
    KMeansModel best = kmeans_fit_best(points, k, opt, restarts);
    if (k > 1) {
      Points warm = prev.centroids;
      const auto labels = kmeans_assign(points, warm);
      std::size_t far = 0;
      double far_d = -1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = squared_distance(points[i], warm[labels[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      warm.push_back(points[far]);
      auto m = kmeans_lloyd(points, std::move(warm), opt);
      if (m.inertia < best.inertia) best = std::move(m);
    }
    rows.push_back({k, best.inertia});
    prev = std::move(best);
  }
  return rows;
}

}  // namespace urbanflow::ml
