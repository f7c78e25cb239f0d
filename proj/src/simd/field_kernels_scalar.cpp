#include "sgad/field_kernels.hpp"

namespace sgad::simd {

namespace {

void apply_operator_scalar(std::size_t n, double h, const double* p, const double* v, const double* sin_row,
                           const double* sin_col, const OperatorCoeffs& k, double* out) {
  const auto s = detail::make_stencil(h);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t iu = (i + n - 1) % n;
    const std::size_t id = (i + 1) % n;
    const double row_coeff = k.gx * sin_row[i];
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jl = (j + n - 1) % n;
      const std::size_t jr = (j + 1) % n;
      out[i * n + j] = detail::operator_element(v[i * n + j], v[iu * n + j], v[id * n + j], v[i * n + jl],
                                                v[i * n + jr], p[i * n + j], row_coeff, k.gy * sin_col[j], k, s);
    }
  }
}

// Four interleaved partial sums, matching the lane layout of the vector path.
double dot_scalar(const double* x, const double* y, std::size_t len) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    for (std::size_t l = 0; l < 4; ++l) acc[l] = acc[l] + x[i + l] * y[i + l];
  double sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (; i < len; ++i) sum = sum + x[i] * y[i];
  return sum;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t len) {
  for (std::size_t i = 0; i < len; ++i) y[i] = y[i] + a * x[i];
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{"scalar", apply_operator_scalar, dot_scalar, axpy_scalar};
  return table;
}

}  // namespace sgad::simd
