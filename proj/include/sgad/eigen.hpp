#pragma once

// Eigen-analysis of small nonsymmetric matrices through the characteristic
// polynomial (no QR iteration).

#include <complex>
#include <vector>

#include "sgad/linalg.hpp"

namespace sgad {

/// Coefficients of det(lambda I - A), lowest degree first; leading coefficient 1.
std::vector<double> characteristic_polynomial(const Matrix& a);

/// Roots of a real polynomial (lowest degree first). Real roots are located by
/// sign-change bracketing and bisection, removed by deflation, and the remainder
/// is split into quadratic factors (Bairstow). Real roots come first, ascending.
std::vector<std::complex<double>> polynomial_roots(std::vector<double> coeffs);

double polynomial_value(const std::vector<double>& coeffs, double x);

/// Eigenvalues: closed form for n <= 2, characteristic polynomial otherwise.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

struct SingularProbe {
  Vector direction;  ///< unit vector minimizing |B z| (approximately)
  double residual = 0.0;  ///< |B z|
};

/// Smallest-singular-direction probe of B by inverse iteration on B^T B.
SingularProbe smallest_singular_probe(const Matrix& b, int iterations = 8);

/// Unit null vector of (A - lambda I) for a real eigenvalue; largest entry positive.
Vector eigenvector(const Matrix& a, double lambda);

}  // namespace sgad
