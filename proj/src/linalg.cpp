#include "sgad/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "sgad/errors.hpp"

namespace sgad {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw InvalidArgument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vector add(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("add: size mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("sub: size mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector scaled(double s, std::span<const double> a) {
  Vector r(a.begin(), a.end());
  for (double& x : r) x *= s;
  return r;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double value)
    : rows_(rows), cols_(cols), data_(rows * cols, value) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows * cols) throw InvalidArgument("Matrix: data size does not match shape");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Vector Matrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

void Matrix::set_column(std::size_t j, std::span<const double> c) {
  if (c.size() != rows_) throw InvalidArgument("set_column: size mismatch");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
}

Vector Matrix::apply(std::span<const double> v) const {
  if (v.size() != cols_) throw InvalidArgument("Matrix::apply: size mismatch");
  Vector r(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

Vector Matrix::apply_transpose(std::span<const double> w) const {
  if (w.size() != rows_) throw InvalidArgument("Matrix::apply_transpose: size mismatch");
  Vector r(cols_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r[j] += (*this)(i, j) * w[i];
  return r;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::operator*(const Matrix& other) const {
  if (cols_ != other.rows_) throw InvalidArgument("Matrix product: shape mismatch");
  Matrix r(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      for (std::size_t j = 0; j < other.cols_; ++j) r(i, j) += a * other(k, j);
    }
  return r;
}

Matrix Matrix::operator-(const Matrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw InvalidArgument("Matrix difference: shape mismatch");
  Matrix r(*this);
  for (std::size_t k = 0; k < data_.size(); ++k) r.data_[k] -= other.data_[k];
  return r;
}

double Matrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

double Matrix::norm_inf() const {
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
    m = std::max(m, s);
  }
  return m;
}

LuFactor::LuFactor(const Matrix& a, double pivot_floor) : lu_(a), perm_(a.rows()) {
  if (a.rows() != a.cols()) throw InvalidArgument("LuFactor: matrix is not square");
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
      std::swap(perm_[k], perm_[p]);
      sign_ = -sign_;
    }
    if (lu_(k, k) == 0.0 && pivot_floor <= 0.0) throw SingularMatrix("LuFactor: exactly singular matrix");
    if (std::abs(lu_(k, k)) < pivot_floor) lu_(k, k) = std::copysign(pivot_floor, lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = lu_(i, k) / lu_(k, k);
      lu_(i, k) = m;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= m * lu_(k, j);
    }
  }
}

Vector LuFactor::solve(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw InvalidArgument("LuFactor::solve: size mismatch");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
    y[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * y[j];
    y[ii] = s / lu_(ii, ii);
  }
  return y;
}

// A = P^T L U, so A^T x = b  <=>  U^T L^T (P x) = b.
Vector LuFactor::solve_transpose(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  if (b.size() != n) throw InvalidArgument("LuFactor::solve_transpose: size mismatch");
  Vector z(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = z[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * z[j];
    z[i] = s / lu_(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = z[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(j, ii) * z[j];
    z[ii] = s;
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = z[i];
  return x;
}

double LuFactor::determinant() const {
  double d = sign_;
  for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
  return d;
}

Vector solve(const Matrix& a, std::span<const double> b) { return LuFactor(a).solve(b); }

double determinant(const Matrix& a) {
  try {
    return LuFactor(a).determinant();
  } catch (const SingularMatrix&) {
    return 0.0;
  }
}

}  // namespace sgad
