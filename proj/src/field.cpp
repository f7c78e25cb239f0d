#include "sgad/field.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "sgad/errors.hpp"
#include "sgad/field_kernels.hpp"

namespace sgad {

namespace {

void check_size(std::size_t n) {
  if (n < Field2D::kMinSize)
    throw InvalidArgument("Field2D: n = " + std::to_string(n) + " is below the minimum of " +
                          std::to_string(Field2D::kMinSize));
}

void check_same(const Field2D& a, const Field2D& b) {
  if (a.n() != b.n()) throw InvalidArgument("Field2D: grid size mismatch");
}

std::size_t wrap(std::ptrdiff_t k, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((k % m) + m) % m);
}

}  // namespace

Field2D::Field2D(std::size_t n, double value) : n_(n), values_(n * n, value) { check_size(n); }

Field2D::Field2D(std::size_t n, Vector values) : n_(n), values_(std::move(values)) {
  check_size(n);
  if (values_.size() != n * n) throw InvalidArgument("Field2D: expected n*n values");
}

Field2D Field2D::from_function(std::size_t n, const std::function<double(double, double)>& f) {
  Field2D out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = f(grid_coordinate(j, n), grid_coordinate(i, n));
  return out;
}

bool Field2D::all_finite() const { return sgad::all_finite(values_); }

void Field2D::validate() const {
  check_size(n_);
  if (!all_finite()) throw InvalidArgument("Field2D: non-finite value");
}

Field2D& Field2D::operator+=(const Field2D& o) {
  check_same(*this, o);
  simd::active_kernels().axpy(1.0, o.data(), data(), size());
  return *this;
}

Field2D& Field2D::operator-=(const Field2D& o) {
  check_same(*this, o);
  simd::active_kernels().axpy(-1.0, o.data(), data(), size());
  return *this;
}

Field2D& Field2D::operator*=(double s) {
  for (double& e : values_) e *= s;
  return *this;
}

Field2D Field2D::shifted(std::ptrdiff_t di, std::ptrdiff_t dj) const {
  Field2D out(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t si = wrap(static_cast<std::ptrdiff_t>(i) + di, n_);
    for (std::size_t j = 0; j < n_; ++j) out(i, j) = (*this)(si, wrap(static_cast<std::ptrdiff_t>(j) + dj, n_));
  }
  return out;
}

Field2D Field2D::transposed() const {
  Field2D out(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out(i, j) = (*this)(j, i);
  return out;
}

Field2D operator+(Field2D a, const Field2D& b) { return a += b; }
Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }
Field2D operator*(double s, Field2D a) { return a *= s; }

}  // namespace sgad
