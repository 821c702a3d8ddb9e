#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace urbanflow::ml {

struct EvalMetrics {
  double mae = 0;
  double rmse = 0;
  std::size_t m = 0;
};

namespace detail {
inline void check_pair(std::span<const double> y, std::span<const double> yhat) {
  if (y.empty()) throw std::invalid_argument("metrics: empty input");
  if (y.size() != yhat.size()) throw std::invalid_argument("metrics: length mismatch");
}
}  // namespace detail

inline double mae(std::span<const double> y, std::span<const double> yhat) {
  detail::check_pair(y, yhat);
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
  return s / static_cast<double>(y.size());
}

inline double rmse(std::span<const double> y, std::span<const double> yhat) {
  detail::check_pair(y, yhat);
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

inline EvalMetrics evaluate(std::span<const double> y, std::span<const double> yhat) {
  return {mae(y, yhat), rmse(y, yhat), y.size()};
}

}  // namespace urbanflow::ml
