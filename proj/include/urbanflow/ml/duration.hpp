#pragma once

// Trip-duration regression: OLS on the six trip features (optionally with
// day and hour one-hot columns), target in minutes.
//
// The continuous features are z-scored for the solve and the scaling is
// folded back, so the stored model takes raw feature values. A feature that
// is constant over the training rows keeps unit scale; its column is then
// collinear with the intercept and the ridge fallback gives it weight 0.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "urbanflow/ingest/features.hpp"
#include "urbanflow/ingest/parse.hpp"
#include "urbanflow/ml/linreg.hpp"
#include "urbanflow/ml/metrics.hpp"
#include "urbanflow/ml/model_file.hpp"

namespace urbanflow::ml {

inline const std::vector<std::string>& duration_base_features() {
  static const std::vector<std::string> names{"trip_distance",     "pickup_longitude", "pickup_latitude",
                                              "dropoff_longitude", "dropoff_latitude", "passenger_count"};
  return names;
}

inline std::vector<std::string> duration_feature_names(bool temporal) {
  auto names = duration_base_features();
  if (temporal) {
    for (int d = 0; d < 7; ++d) names.push_back("day_" + std::to_string(d));
    for (int h = 0; h < 24; ++h) names.push_back("hour_" + std::to_string(h));
  }
  return names;
}

inline constexpr const char* kDurationTarget = "duration_min";

struct DurationTraining {
  ModelFile file;  // LinRegModel on raw features
  EvalMetrics test;
  double baseline_rmse = 0;  // predicting the training mean
  std::size_t train_rows = 0;
  std::size_t test_rows = 0;
};

/// Mean/stddev per column; a constant column keeps stddev 1.
inline ingest::NormStats duration_normalizer(const std::vector<std::vector<double>>& rows,
                                             const std::vector<std::string>& names, std::size_t continuous) {
  ingest::NormStats s{std::vector<std::string>(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(continuous)),
                      std::vector<double>(continuous, 0.0), std::vector<double>(continuous, 1.0)};
  if (rows.empty()) return s;
  const double m = static_cast<double>(rows.size());
  for (std::size_t j = 0; j < continuous; ++j) {
    double mean = 0;
    for (const auto& r : rows) mean += r[j];
    mean /= m;
    double var = 0;
    for (const auto& r : rows) var += (r[j] - mean) * (r[j] - mean);
    var /= m;
    s.mean[j] = mean;
    const double sd = std::sqrt(var);
    s.stddev[j] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
  }
  return s;
}

/// Fits on rows whose first `norm.features.size()` columns are z-scored with
/// `norm`, then rewrites the model for raw inputs.
inline LinRegModel fit_folded(const std::vector<std::vector<double>>& rows, std::span<const double> y,
                              const std::vector<std::string>& names, const ingest::NormStats& norm) {
  const std::size_t c = norm.features.size();
  Points X(names.size());
  std::vector<double> z;
  for (const auto& r : rows) {
    z = r;
    for (std::size_t j = 0; j < c; ++j) z[j] = (r[j] - norm.mean[j]) / norm.stddev[j];
    X.push_back(z);
  }
  LinRegModel m = linreg_fit(X, y, names);
  for (std::size_t j = 0; j < c; ++j) {
    m.coefficients[j] /= norm.stddev[j];
    m.intercept -= m.coefficients[j] * norm.mean[j];
  }
  return m;
}

/// Seeded train/test split, fit on train, metrics on test (minutes).
inline DurationTraining train_duration(std::span<const ingest::EngineeredTrip> trips, double ratio,
                                       std::uint64_t seed, bool temporal = false) {
  const auto parts = ingest::split(trips, ratio, seed);
  if (parts.test.empty()) throw std::invalid_argument("train duration: test split is empty");
  const auto names = duration_feature_names(temporal);
  const auto train_rows = ingest::feature_matrix(parts.train, names);
  std::vector<double> y;
  y.reserve(parts.train.size());
  for (const auto& t : parts.train) y.push_back(t.duration_min());

  const auto norm = duration_normalizer(train_rows, names, duration_base_features().size());
  DurationTraining out;
  out.train_rows = parts.train.size();
  out.test_rows = parts.test.size();
  LinRegModel model = fit_folded(train_rows, y, names, norm);

  std::vector<double> truth, pred, base;
  double mean_y = 0;
  for (double v : y) mean_y += v;
  mean_y /= static_cast<double>(y.size());
  for (const auto& t : parts.test) {
    truth.push_back(t.duration_min());
    pred.push_back(linreg_predict(model, ingest::feature_row(t, names)));
    base.push_back(mean_y);
  }
  out.test = evaluate(truth, pred);
  out.baseline_rmse = rmse(truth, base);

  out.file.model = std::move(model);
  out.file.meta.seed = seed;
  out.file.meta.feature_names = names;
  out.file.meta.norm = norm;
  out.file.meta.target = kDurationTarget;
  out.file.meta.extra["split_ratio"] = ingest::detail::shortest(ratio);
  out.file.meta.extra["temporal"] = temporal ? "true" : "false";
  return out;
}

}  // namespace urbanflow::ml
