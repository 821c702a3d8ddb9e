#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace urbanflow::ml {

/// Dense row-major point set of fixed dimension.
class Points {
 public:
  Points() = default;
  Points(std::size_t dim) : dim_(dim) {}
  Points(std::size_t count, std::size_t dim) : dim_(dim), data_(count * dim, 0.0) {}

  static Points from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return Points{};
    Points p(rows.front().size());
    for (const auto& r : rows) p.push_back(r);
    return p;
  }

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> operator[](std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> operator[](std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> row) {
    if (dim_ == 0) dim_ = row.size();
    if (row.size() != dim_) throw std::invalid_argument("Points: dimension mismatch");
    data_.insert(data_.end(), row.begin(), row.end());
  }

  const std::vector<double>& data() const { return data_; }

  bool operator==(const Points&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

}  // namespace urbanflow::ml
