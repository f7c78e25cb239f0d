#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "sgad/linalg.hpp"

namespace sgad {

/// Periodic n x n grid function on the unit square, row-major:
/// value(i, j) samples phi(x = j h, y = i h) with h = 1/n.
class Field2D {
 public:
  static constexpr std::size_t kMinSize = 8;

  Field2D() = default;
  explicit Field2D(std::size_t n, double value = 0.0);
  Field2D(std::size_t n, Vector values);

  static Field2D from_function(std::size_t n, const std::function<double(double x, double y)>& f);

  std::size_t n() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / static_cast<double>(n_); }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Throws InvalidArgument on non-finite entries.
  void validate() const;
  bool all_finite() const;

  Field2D& operator+=(const Field2D& o);
  Field2D& operator-=(const Field2D& o);
  Field2D& operator*=(double s);

  /// phi(x + dj h, y + di h), periodic.
  Field2D shifted(std::ptrdiff_t di, std::ptrdiff_t dj) const;
  /// phi(y, x).
  Field2D transposed() const;

 private:
  std::size_t n_ = 0;
  Vector values_;
};

Field2D operator+(Field2D a, const Field2D& b);
Field2D operator-(Field2D a, const Field2D& b);
Field2D operator*(double s, Field2D a);

/// Grid coordinate of row i (y) or column j (x).
inline double grid_coordinate(std::size_t k, std::size_t n) {
  return static_cast<double>(k) / static_cast<double>(n);
}

}  // namespace sgad
