#include <immintrin.h>

#include "sgad/field_kernels.hpp"

namespace sgad::simd {

namespace {

void apply_operator_avx2(std::size_t n, double h, const double* p, const double* v, const double* sin_row,
                         const double* sin_col, const OperatorCoeffs& k, double* out) {
  const auto s = detail::make_stencil(h);
  const __m256d inv_h2 = _mm256_set1_pd(s.inv_h2);
  const __m256d inv_2h = _mm256_set1_pd(s.inv_2h);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d kappa = _mm256_set1_pd(k.kappa);
  const __m256d a = _mm256_set1_pd(k.a);
  const __m256d c = _mm256_set1_pd(k.c);
  const __m256d gy = _mm256_set1_pd(k.gy);

  for (std::size_t i = 0; i < n; ++i) {
    const double* row = v + i * n;
    const double* up = v + ((i + n - 1) % n) * n;
    const double* down = v + ((i + 1) % n) * n;
    const double* prow = p + i * n;
    double* orow = out + i * n;
    const double row_coeff = k.gx * sin_row[i];
    const __m256d rc = _mm256_set1_pd(row_coeff);

    auto edge = [&](std::size_t j) {
      const std::size_t jl = (j + n - 1) % n;
      const std::size_t jr = (j + 1) % n;
      orow[j] = detail::operator_element(row[j], up[j], down[j], row[jl], row[jr], prow[j], row_coeff,
                                         k.gy * sin_col[j], k, s);
    };

    edge(0);
    std::size_t j = 1;
    for (; j + 4 <= n - 1; j += 4) {
      const __m256d vc = _mm256_loadu_pd(row + j);
      const __m256d vu = _mm256_loadu_pd(up + j);
      const __m256d vd = _mm256_loadu_pd(down + j);
      const __m256d vl = _mm256_loadu_pd(row + j - 1);
      const __m256d vr = _mm256_loadu_pd(row + j + 1);
      const __m256d pc = _mm256_loadu_pd(prow + j);
      const __m256d cc = _mm256_mul_pd(gy, _mm256_loadu_pd(sin_col + j));

      __m256d lap = _mm256_add_pd(_mm256_add_pd(_mm256_add_pd(vu, vd), vl), vr);
      lap = _mm256_mul_pd(_mm256_sub_pd(lap, _mm256_mul_pd(four, vc)), inv_h2);
      __m256d t = _mm256_mul_pd(kappa, lap);
      t = _mm256_add_pd(t, _mm256_mul_pd(a, vc));
      t = _mm256_sub_pd(t, _mm256_mul_pd(_mm256_mul_pd(c, _mm256_mul_pd(pc, pc)), vc));
      t = _mm256_add_pd(t, _mm256_mul_pd(rc, _mm256_mul_pd(_mm256_sub_pd(vr, vl), inv_2h)));
      t = _mm256_add_pd(t, _mm256_mul_pd(cc, _mm256_mul_pd(_mm256_sub_pd(vd, vu), inv_2h)));
      _mm256_storeu_pd(orow + j, t);
    }
    for (; j < n; ++j) edge(j);
  }
}

double dot_avx2(const double* x, const double* y, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < len; ++i) sum = sum + x[i] * y[i];
  return sum;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t len) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4)
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i))));
  for (; i < len; ++i) y[i] = y[i] + a * x[i];
}

}  // namespace

const KernelTable& avx2_kernel_table() noexcept {
  static const KernelTable table{"avx2", apply_operator_avx2, dot_avx2, axpy_avx2};
  return table;
}

}  // namespace sgad::simd
