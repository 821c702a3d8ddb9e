#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "urbanflow/ml/points.hpp"

namespace urbanflow::ml {

class LinRegError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LinRegModel {
  double intercept = 0;
  std::vector<double> coefficients;
  std::vector<std::string> feature_names;
  double ridge_epsilon = 0;  // 0 unless the design was rank-deficient

  bool operator==(const LinRegModel&) const = default;
};

inline constexpr double kRidgeFallback = 1e-8;

/// Ordinary least squares with an implicit intercept column, solved by
/// column-pivoting Householder QR. A rank-deficient design is refit with a
/// ridge penalty of kRidgeFallback on the slope coefficients.
inline LinRegModel linreg_fit(const Points& X, std::span<const double> y, std::vector<std::string> feature_names = {}) {
  const std::size_t m = X.size(), n = X.dim();
  if (y.size() != m) throw LinRegError("linreg_fit: X has " + std::to_string(m) + " rows but y has " +
                                       std::to_string(y.size()));
  if (m <= n) throw LinRegError("linreg_fit: need more observations than features (m=" + std::to_string(m) +
                                ", n=" + std::to_string(n) + ")");
  if (feature_names.empty())
    for (std::size_t j = 0; j < n; ++j) feature_names.push_back("x" + std::to_string(j + 1));
  if (feature_names.size() != n) throw LinRegError("linreg_fit: feature name count mismatch");
  for (double v : X.data())
    if (!std::isfinite(v)) throw LinRegError("linreg_fit: non-finite value in design matrix");
  for (double v : y)
    if (!std::isfinite(v)) throw LinRegError("linreg_fit: non-finite target");

  Eigen::MatrixXd A(m, n + 1);
  Eigen::VectorXd b(m);
  for (std::size_t i = 0; i < m; ++i) {
    A(static_cast<Eigen::Index>(i), 0) = 1.0;
    const auto row = X[i];
    for (std::size_t j = 0; j < n; ++j) A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = row[j];
    b(static_cast<Eigen::Index>(i)) = y[i];
  }

  LinRegModel model;
  model.feature_names = std::move(feature_names);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::VectorXd beta;
  if (qr.rank() == static_cast<Eigen::Index>(n + 1)) {
    beta = qr.solve(b);
  } else {
    // Augment with sqrt(lambda) * I on the slope columns.
    const double s = std::sqrt(kRidgeFallback);
    Eigen::MatrixXd Ar = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m + n), static_cast<Eigen::Index>(n + 1));
    Ar.topRows(static_cast<Eigen::Index>(m)) = A;
    Eigen::VectorXd br = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m + n));
    br.head(static_cast<Eigen::Index>(m)) = b;
    for (std::size_t j = 0; j < n; ++j)
      Ar(static_cast<Eigen::Index>(m + j), static_cast<Eigen::Index>(j + 1)) = s;
    beta = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(Ar).solve(br);
    model.ridge_epsilon = kRidgeFallback;
  }
  model.intercept = beta(0);
  model.coefficients.resize(n);
  for (std::size_t j = 0; j < n; ++j) model.coefficients[j] = beta(static_cast<Eigen::Index>(j + 1));
  return model;
}

inline double linreg_predict(const LinRegModel& model, std::span<const double> x) {
  if (x.size() != model.coefficients.size())
    throw LinRegError("linreg_predict: expected " + std::to_string(model.coefficients.size()) + " features, got " +
                      std::to_string(x.size()));
  double y = model.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) y += model.coefficients[j] * x[j];
  return y;
}

inline std::vector<double> linreg_predict(const LinRegModel& model, const Points& X) {
  std::vector<double> out;
  out.reserve(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) out.push_back(linreg_predict(model, X[i]));
  return out;
}

/// Sum of squared residuals.
inline double sum_squared_residuals(const LinRegModel& model, const Points& X, std::span<const double> y) {
  double s = 0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double r = y[i] - linreg_predict(model, X[i]);
    s += r * r;
  }
  return s;
}

}  // namespace urbanflow::ml
