#pragma once

// Small dense vectors and matrices for the low-dimensional models.

#include <cstddef>
#include <span>
#include <vector>

namespace sgad {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scaled(double s, std::span<const double> a);

bool all_finite(std::span<const double> a);

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const noexcept { return data_; }

  Vector column(std::size_t j) const;
  void set_column(std::size_t j, std::span<const double> c);

  Vector apply(std::span<const double> v) const;
  Vector apply_transpose(std::span<const double> w) const;
  Matrix transpose() const;
  Matrix operator*(const Matrix& other) const;
  Matrix operator-(const Matrix& other) const;

  double trace() const;
  /// Maximum absolute row sum.
  double norm_inf() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// LU factorisation with partial pivoting of a square matrix.
class LuFactor {
 public:
  /// Pivots smaller than a positive `pivot_floor` are raised to it (inverse
  /// iteration on a singular shift); with no floor an exact zero pivot throws.
  explicit LuFactor(const Matrix& a, double pivot_floor = 0.0);

  Vector solve(std::span<const double> b) const;
  Vector solve_transpose(std::span<const double> b) const;
  double determinant() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
  int sign_ = 1;
};

Vector solve(const Matrix& a, std::span<const double> b);
double determinant(const Matrix& a);

}  // namespace sgad
