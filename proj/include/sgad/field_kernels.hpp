#pragma once

// Grid kernels behind the Allen-Cahn operators. Each path evaluates the same
// floating-point expression tree per element, so results agree bitwise.

#include <cstddef>
#include <string_view>

namespace sgad::simd {

/// out = kappa L(v) + a v - c p^2 v + gx sin_row[i] Dx v + gy sin_col[j] Dy v
/// on an n x n periodic grid, L the 5-point Laplacian and Dx, Dy centered differences.
struct OperatorCoeffs {
  double kappa = 0.0;
  double a = 0.0;
  double c = 0.0;
  double gx = 0.0;
  double gy = 0.0;
};

using OperatorFn = void (*)(std::size_t n, double h, const double* p, const double* v, const double* sin_row,
                            const double* sin_col, const OperatorCoeffs& k, double* out);
using DotFn = double (*)(const double* x, const double* y, std::size_t len);
using AxpyFn = void (*)(double a, const double* x, double* y, std::size_t len);

struct KernelTable {
  std::string_view name;
  OperatorFn apply_operator;
  DotFn dot;
  AxpyFn axpy;
};

const KernelTable& scalar_kernels() noexcept;
/// nullptr when the AVX2 path was not built or the CPU lacks AVX2.
const KernelTable* avx2_kernels() noexcept;
/// AVX2 when available unless SGAD_SIMD=scalar is set in the environment.
const KernelTable& active_kernels() noexcept;

namespace detail {

struct Stencil {
  double inv_h2;
  double inv_2h;
};

inline Stencil make_stencil(double h) { return {1.0 / (h * h), 1.0 / (2.0 * h)}; }

// Shared element formula; the vector path mirrors this operation order.
inline double operator_element(double vc, double up, double down, double left, double right, double pc,
                               double row_coeff, double col_coeff, const OperatorCoeffs& k, const Stencil& s) {
  const double lap = ((((up + down) + left) + right) - 4.0 * vc) * s.inv_h2;
  double t = k.kappa * lap;
  t = t + k.a * vc;
  t = t - (k.c * (pc * pc)) * vc;
  t = t + row_coeff * ((right - left) * s.inv_2h);
  t = t + col_coeff * ((down - up) * s.inv_2h);
  return t;
}

}  // namespace detail

}  // namespace sgad::simd
