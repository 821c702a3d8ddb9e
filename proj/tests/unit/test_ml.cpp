#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "urbanflow/ml/congestion.hpp"
#include "urbanflow/ml/duration.hpp"
#include "urbanflow/ml/kmeans.hpp"
#include "urbanflow/ml/linreg.hpp"
#include "urbanflow/ml/metrics.hpp"
#include "urbanflow/ml/model_file.hpp"
#include "urbanflow/rng.hpp"
#include "urbanflow/spatiotemporal/aggregate.hpp"

using namespace urbanflow;
using namespace urbanflow::ml;

namespace {

oracle::Rows random_rows(Rng& rng, std::size_t n, std::size_t dim, double scale = 10) {
  oracle::Rows r(n, std::vector<double>(dim));
  for (auto& row : r)
    for (auto& v : row) v = rng.uniform(-scale, scale);
  return r;
}

// Gaussian blobs so that Lloyd has real structure to find.
oracle::Rows blobs(Rng& rng, std::size_t n, std::size_t dim, std::size_t centres) {
  const auto c = random_rows(rng, centres, dim, 20);
  oracle::Rows r;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = c[rng.below(centres)];
    std::vector<double> p(dim);
    for (std::size_t j = 0; j < dim; ++j) p[j] = rng.normal(m[j], 2.0);
    r.push_back(p);
  }
  return r;
}

oracle::Rows to_rows(const Points& p) {
  oracle::Rows r;
  for (std::size_t i = 0; i < p.size(); ++i) r.emplace_back(p[i].begin(), p[i].end());
  return r;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

// ---------------------------------------------------------------------------
// Regression

TEST(LinReg, RecoversPlantedCoefficients) {
  Rng rng(3);
  const std::vector<double> beta{2.5, -1.25, 0.5, 3.0};
  const double b0 = -7.0;
  const auto X = random_rows(rng, 500, 4);
  std::vector<double> y;
  for (const auto& r : X) {
    double v = b0;
    for (std::size_t j = 0; j < 4; ++j) v += beta[j] * r[j];
    y.push_back(v);
  }
  const auto m = linreg_fit(Points::from_rows(X), y, {"a", "b", "c", "d"});
  EXPECT_NEAR(m.intercept, b0, 1e-9);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(m.coefficients[j], beta[j], 1e-9);
  EXPECT_EQ(m.ridge_epsilon, 0.0);
  EXPECT_EQ(m.feature_names[2], "c");
}

TEST(LinReg, MatchesNormalEquationsOnNoisyProblems) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const auto X = random_rows(rng, 200, 4, rng.uniform(0.5, 50));
    std::vector<double> y;
    for (const auto& r : X) y.push_back(1.0 + r[0] - 2 * r[1] + 0.3 * r[2] * r[3] + rng.normal(0, 5));
    const auto m = linreg_fit(Points::from_rows(X), y);
    const auto want = oracle::normal_equations(X, y);
    EXPECT_LE(rel(m.intercept, want[0]), 1e-8) << trial;
    for (std::size_t j = 0; j < 4; ++j) EXPECT_LE(rel(m.coefficients[j], want[j + 1]), 1e-8) << trial;
  }
}

TEST(LinReg, AllZeroFeaturesPredictIntercept) {
  Rng rng(5);
  const auto X = random_rows(rng, 50, 3);
  std::vector<double> y;
  for (const auto& r : X) y.push_back(4 + r[0]);
  const auto m = linreg_fit(Points::from_rows(X), y);
  EXPECT_EQ(linreg_predict(m, std::vector<double>{0, 0, 0}), m.intercept);
}

TEST(LinReg, RankDeficientFallsBackToRidge) {
  Rng rng(6);
  oracle::Rows X;
  std::vector<double> y;
  for (int i = 0; i < 40; ++i) {
    const double a = rng.uniform(0, 1);
    X.push_back({a, 2 * a});
    y.push_back(3 * a + 1);
  }
  const auto m = linreg_fit(Points::from_rows(X), y);
  EXPECT_GT(m.ridge_epsilon, 0);
  for (std::size_t i = 0; i < X.size(); ++i) EXPECT_NEAR(linreg_predict(m, X[i]), y[i], 1e-5);
}

TEST(LinReg, RejectsBadShapes) {
  EXPECT_THROW(linreg_fit(Points::from_rows({{1, 2}, {3, 4}}), std::vector<double>{1, 2}), LinRegError);
  EXPECT_THROW(linreg_fit(Points::from_rows({{1}, {2}, {3}}), std::vector<double>{1, 2}), LinRegError);
  EXPECT_THROW(linreg_fit(Points::from_rows({{1}, {NAN}, {3}}), std::vector<double>{1, 2, 3}), LinRegError);
  EXPECT_THROW(linreg_fit(Points::from_rows({{1}, {2}, {3}}), std::vector<double>{1, 2, 3}, {"a", "b"}), LinRegError);
}

TEST(Metrics, MatchCompensatedOracleAndRmseDominatesMae) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(500);
    std::vector<double> y(n), yhat(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.uniform(0, 60);
      yhat[i] = y[i] + rng.normal(0, rng.uniform(0.1, 10));
    }
    const auto e = evaluate(y, yhat);
    const auto [mae_o, rmse_o] = oracle::mae_rmse(y, yhat);
    EXPECT_LE(rel(e.mae, mae_o), 1e-12);
    EXPECT_LE(rel(e.rmse, rmse_o), 1e-12);
    EXPECT_GE(e.rmse, e.mae);
    EXPECT_EQ(e.m, n);
  }
  EXPECT_THROW(mae(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(rmse(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// K-Means

TEST(KMeans, ObjectiveNeverIncreasesAcrossIterations) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    const auto rows = blobs(rng, 20 + rng.below(180), 2 + rng.below(3), 1 + rng.below(6));
    const auto pts = Points::from_rows(rows);
    const std::size_t k = 1 + rng.below(8);
    LloydTrace trace;
    KMeansOptions opt;
    opt.seed = seed;
    const auto m = kmeans_fit(pts, k, opt, &trace);
    ASSERT_GE(trace.objective.size(), 2u);
    for (std::size_t i = 1; i < trace.objective.size(); ++i)
      EXPECT_LE(trace.objective[i], trace.objective[i - 1] * (1 + 1e-12)) << "seed " << seed << " step " << i;
    EXPECT_EQ(m.inertia, trace.objective.back());
  }
}

TEST(KMeans, MatchesTextbookLloydFromSameStart) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed + 1000);
    const auto rows = blobs(rng, 30 + rng.below(170), 2 + rng.below(2), 3);
    const auto pts = Points::from_rows(rows);
    const std::size_t k = 2 + rng.below(5);
    KMeansOptions opt;
    opt.seed = seed;
    const auto init = kmeans_init_pp(pts, k, seed);
    const auto m = kmeans_lloyd(pts, init, opt);
    const auto o = oracle::lloyd(rows, to_rows(init), opt.tol, opt.max_iter);
    EXPECT_EQ(m.iterations, o.iterations);
    EXPECT_LE(rel(m.inertia, o.inertia), 1e-9);
    const auto got = to_rows(m.centroids);
    for (std::size_t c = 0; c < k; ++c)
      for (std::size_t j = 0; j < got[c].size(); ++j) EXPECT_NEAR(got[c][j], o.centroids[c][j], 1e-9);
  }
}

TEST(KMeans, NoSinglePointMoveLowersTheObjective) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 5000);
    const auto rows = blobs(rng, 10 + rng.below(190), 2, 1 + rng.below(5));
    const auto pts = Points::from_rows(rows);
    const std::size_t k = 1 + rng.below(6);
    KMeansOptions opt;
    opt.seed = seed;
    // Stop only once no centroid moves at all, so centroids are exact means.
    opt.tol = std::numeric_limits<double>::denorm_min();
    opt.max_iter = 10000;
    const auto m = kmeans_fit(pts, k, opt);
    ASSERT_LT(m.iterations, opt.max_iter);
    const auto cents = to_rows(m.centroids);
    auto lab = oracle::assign(rows, cents);
    const double base = oracle::objective(rows, lab, cents);
    EXPECT_LE(rel(base, m.inertia), 1e-12);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto own = lab[i];
      for (std::size_t c = 0; c < k; ++c) {
        if (c == own) continue;
        lab[i] = c;
        EXPECT_GE(oracle::objective(rows, lab, cents), base);
      }
      lab[i] = own;
    }
  }
}

TEST(KMeans, EmptyClusterIsReseededFromFarthestPoint) {
  const auto pts = Points::from_rows({{0, 0}, {0, 1}, {10, 0}, {10, 1}});
  // Third centroid is nobody's nearest and must be re-seeded.
  std::vector<std::size_t> labels{0, 0, 1, 1};
  bool reseeded = false;
  const auto next = kmeans_update(pts, labels, 3, &reseeded);
  EXPECT_TRUE(reseeded);
  // All four points tie at 0.25 from their mean; lowest index wins.
  EXPECT_EQ(next[2][0], 0.0);
  EXPECT_EQ(next[2][1], 0.0);
}

TEST(KMeans, SingleClusterInertiaIsTotalVariance) {
  Rng rng(12);
  const auto rows = random_rows(rng, 300, 3);
  std::vector<long double> mean(3, 0.0L);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < 3; ++j) mean[j] += r[j];
  long double ss = 0;
  for (auto& v : mean) v /= rows.size();
  for (const auto& r : rows)
    for (std::size_t j = 0; j < 3; ++j) ss += (r[j] - mean[j]) * (r[j] - mean[j]);
  const auto curve = elbow_curve(Points::from_rows(rows), 1, {});
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_LE(rel(curve[0].inertia, static_cast<double>(ss)), 1e-12);
}

TEST(KMeans, ElbowCurveNeverIncreases) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed + 70);
    const auto pts = Points::from_rows(blobs(rng, 150, 3, 4));
    KMeansOptions opt;
    opt.seed = seed;
    const auto curve = elbow_curve(pts, 10, opt, 3);
    ASSERT_EQ(curve.size(), 10u);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      EXPECT_EQ(curve[i].k, i + 1);
      EXPECT_LE(curve[i].inertia, curve[i - 1].inertia);
    }
  }
}

TEST(KMeans, SeededAndGuardedAgainstTooFewDistinctPoints) {
  Rng rng(2);
  const auto pts = Points::from_rows(blobs(rng, 100, 2, 3));
  KMeansOptions opt;
  opt.seed = 9;
  EXPECT_EQ(kmeans_fit(pts, 4, opt), kmeans_fit(pts, 4, opt));
  const auto dup = Points::from_rows({{1, 1}, {1, 1}, {2, 2}});
  EXPECT_THROW(kmeans_fit(dup, 3), KMeansError);
  EXPECT_THROW(kmeans_fit(dup, 0), KMeansError);
  EXPECT_EQ(elbow_curve(dup, 10, {}).size(), 2u);
}

// ---------------------------------------------------------------------------
// Model files

namespace {

ModelFile sample_linreg() {
  ModelFile f;
  LinRegModel m;
  m.intercept = 0.1 + 0.2;
  m.coefficients = {1.0 / 3.0, -2.5e-300, 6.02214076e23};
  m.feature_names = {"trip_distance", "passenger_count", "hour_8"};
  f.model = m;
  f.meta.seed = 42;
  f.meta.feature_names = m.feature_names;
  f.meta.norm = ingest::NormStats{{"trip_distance"}, {2.718281828459045}, {1.4142135623730951}};
  f.meta.target = "duration_min";
  f.meta.extra["split_ratio"] = "0.8";
  return f;
}

ModelFile sample_kmeans() {
  Rng rng(1);
  ModelFile f;
  f.model = kmeans_fit(Points::from_rows(blobs(rng, 60, 3, 3)), 3);
  f.meta.seed = 7;
  f.meta.feature_names = {"congestion_index", "hour", "day_of_week"};
  return f;
}

}  // namespace

TEST(ModelFile, RoundTripsBitExactly) {
  for (const auto& f : {sample_linreg(), sample_kmeans()}) {
    const auto bytes = save_model(f);
    const auto back = load_model(bytes);
    EXPECT_EQ(back, f);
    EXPECT_EQ(save_model(back), bytes);
  }
}

TEST(ModelFile, DetectsCorruption) {
  const auto bytes = save_model(sample_linreg());
  auto flipped = bytes;
  flipped[bytes.size() - 5] ^= 0x01;
  EXPECT_THROW(load_model(flipped), ModelChecksumError);
  EXPECT_THROW(load_model(bytes.substr(0, bytes.size() - 10)), ModelTruncatedError);
  EXPECT_THROW(load_model(bytes.substr(0, 8)), ModelTruncatedError);
  EXPECT_THROW(load_model(bytes + "x"), ModelFormatError);
  EXPECT_THROW(load_model("NOT-A-MODEL\n"), ModelFormatError);
  auto v2 = bytes;
  v2.replace(v2.find("format_version=1"), 16, "format_version=2");
  try {
    load_model(v2);
    FAIL();
  } catch (const ModelVersionError& e) {
    EXPECT_EQ(e.found(), 2);
    EXPECT_EQ(e.expected(), 1);
  }
}

// ---------------------------------------------------------------------------
// Training entry points

TEST(DurationModel, SeededBeatsBaselineAndFoldsToRawFeatures) {
  const auto trips = fixture::trips(6000);
  const auto a = train_duration(trips, 0.8, 42);
  const auto b = train_duration(trips, 0.8, 42);
  EXPECT_EQ(save_model(a.file), save_model(b.file));
  EXPECT_EQ(a.test.rmse, b.test.rmse);
  EXPECT_GE(a.test.rmse, a.test.mae);
  EXPECT_TRUE(std::isfinite(a.test.rmse));
  EXPECT_LT(a.test.rmse, a.baseline_rmse);
  EXPECT_EQ(a.train_rows + a.test_rows, trips.size());

  // Least squares is affine-equivariant, so the folded model must equal a
  // direct fit on the raw training features.
  const auto parts = ingest::split(trips, 0.8, 42);
  const auto names = duration_feature_names(false);
  const auto X = ingest::feature_matrix(parts.train, names);
  std::vector<double> y;
  for (const auto& t : parts.train) y.push_back(t.duration_min());
  const auto want = oracle::normal_equations(X, y);
  const auto& m = std::get<LinRegModel>(a.file.model);
  EXPECT_LE(rel(m.intercept, want[0]), 1e-6);
  for (std::size_t j = 0; j < names.size(); ++j) EXPECT_LE(rel(m.coefficients[j], want[j + 1]), 1e-6) << names[j];
}

TEST(DurationModel, TemporalFeaturesHelpOnRushHourData) {
  const auto trips = fixture::trips(6000);
  const auto plain = train_duration(trips, 0.8, 1);
  const auto temporal = train_duration(trips, 0.8, 1, true);
  EXPECT_LT(temporal.test.rmse, plain.test.rmse);
  EXPECT_EQ(std::get<LinRegModel>(temporal.file.model).coefficients.size(), 6u + 7u + 24u);
  EXPECT_EQ(temporal.file.meta.extra.at("temporal"), "true");
}

TEST(CongestionModel, RegimesAreOrderedByMeanCongestion) {
  const auto trips = fixture::trips(20000);
  spatiotemporal::GridSpec grid;
  grid.rows = grid.cols = 10;
  const auto agg = spatiotemporal::aggregate_spatial(trips, grid, {}, 3);
  ASSERT_GT(agg.cells.size(), 50u);
  KMeansOptions opt;
  opt.seed = 3;
  const auto r = cluster_congestion(agg.cells, 4, opt);
  ASSERT_EQ(r.labels.size(), agg.cells.size());
  ASSERT_EQ(r.regimes.size(), 4u);
  std::size_t total = 0;
  std::vector<double> sum(4, 0.0);
  std::vector<std::size_t> count(4, 0);
  for (std::size_t i = 0; i < agg.cells.size(); ++i) {
    sum[r.labels[i]] += agg.cells[i].congestion_index;
    ++count[r.labels[i]];
  }
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_EQ(r.regimes[c].cells, count[c]);
    EXPECT_NEAR(r.regimes[c].mean_congestion, sum[c] / static_cast<double>(count[c]), 1e-9);
    if (c > 0) {
      EXPECT_LE(r.regimes[c - 1].mean_congestion, r.regimes[c].mean_congestion);
    }
    total += r.regimes[c].cells;
    EXPECT_LE(r.regimes[c].dominant_hours.size(), 3u);
  }
  EXPECT_EQ(total, agg.cells.size());
  EXPECT_EQ(r.model.centroids.size(), 4u);
}
