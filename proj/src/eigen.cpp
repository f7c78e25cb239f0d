#include "sgad/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sgad/errors.hpp"

namespace sgad {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Householder similarity reduction to upper Hessenberg form.
Matrix hessenberg(Matrix a) {
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    Vector v(n - k - 1);
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i - k - 1] = a(i, k);
      alpha += a(i, k) * a(i, k);
    }
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (v[0] > 0) alpha = -alpha;
    v[0] -= alpha;
    const double vn = norm2(v);
    if (vn == 0.0) continue;
    for (double& vi : v) vi /= vn;

    // A <- (I - 2 v v^T) A
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += v[i - k - 1] * a(i, j);
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= 2.0 * s * v[i - k - 1];
    }
    // A <- A (I - 2 v v^T)
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j - k - 1];
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= 2.0 * s * v[j - k - 1];
    }
  }
  return a;
}

// p <- p * (x - c), lowest degree first.
std::vector<double> times_linear(const std::vector<double>& p, double c) {
  std::vector<double> r(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    r[i + 1] += p[i];
    r[i] -= c * p[i];
  }
  return r;
}

// Divide by (x - r); drops the remainder.
std::vector<double> deflate_linear(const std::vector<double>& p, double root) {
  const std::size_t n = p.size() - 1;
  std::vector<double> q(n, 0.0);
  double carry = p[n];
  for (std::size_t i = n; i-- > 0;) {
    q[i] = carry;
    carry = p[i] + root * carry;
  }
  return q;
}

double bisect_root(const std::vector<double>& p, double a, double b) {
  double fa = polynomial_value(p, a);
  for (int it = 0; it < 400; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = polynomial_value(p, m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

struct QuadraticFactor {
  double u = 0.0, v = 0.0;  // x^2 - u x - v
  std::vector<double> quotient;  // lowest degree first
};

// Bairstow iteration for a quadratic factor of a polynomial of degree >= 3.
QuadraticFactor bairstow(const std::vector<double>& p) {
  const std::size_t n = p.size() - 1;
  std::vector<double> a(p.rbegin(), p.rend());  // highest degree first
  const double starts[][2] = {{0.0, -1.0}, {1.0, -1.0}, {-1.0, -2.0}, {0.5, 0.5}, {2.0, -5.0}, {-3.0, 1.0}};
  QuadraticFactor best;
  std::vector<double> b(n + 1), c(n + 1);
  for (const auto& start : starts) {
    double u = start[0], v = start[1];
    bool ok = false;
    for (int it = 0; it < 500; ++it) {
      b[0] = a[0];
      b[1] = a[1] + u * b[0];
      for (std::size_t k = 2; k <= n; ++k) b[k] = a[k] + u * b[k - 1] + v * b[k - 2];
      c[0] = b[0];
      c[1] = b[1] + u * c[0];
      for (std::size_t k = 2; k < n; ++k) c[k] = b[k] + u * c[k - 1] + v * c[k - 2];
      const double det = c[n - 2] * c[n - 2] - c[n - 1] * c[n - 3];
      if (det == 0.0) break;
      const double du = (-b[n - 1] * c[n - 2] + b[n] * c[n - 3]) / det;
      const double dv = (-b[n] * c[n - 2] + b[n - 1] * c[n - 1]) / det;
      u += du;
      v += dv;
      if (!std::isfinite(u) || !std::isfinite(v)) break;
      if (std::abs(du) + std::abs(dv) <= 4 * kEps * (1.0 + std::abs(u) + std::abs(v))) {
        ok = true;
        break;
      }
    }
    best.u = u;
    best.v = v;
    if (ok) break;
  }
  // Recompute the quotient with the final factor.
  b[0] = a[0];
  b[1] = a[1] + best.u * b[0];
  for (std::size_t k = 2; k <= n; ++k) b[k] = a[k] + best.u * b[k - 1] + best.v * b[k - 2];
  best.quotient.assign(b.rend() - static_cast<std::ptrdiff_t>(n - 1), b.rend());
  return best;
}

void push_quadratic_roots(double u, double v, std::vector<double>& reals,
                          std::vector<std::complex<double>>& complexes) {
  // x^2 - u x - v = 0
  const double half = 0.5 * u;
  const double disc = half * half + v;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    const double r1 = half + (half >= 0 ? s : -s);
    reals.push_back(r1);
    reals.push_back(r1 != 0.0 ? -v / r1 : 0.0);
  } else {
    const double s = std::sqrt(-disc);
    complexes.emplace_back(half, s);
    complexes.emplace_back(half, -s);
  }
}

double newton_polish(const std::vector<double>& p, double x) {
  for (int it = 0; it < 8; ++it) {
    double f = 0.0, df = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) {
      df = df * x + f;
      f = f * x + p[i];
    }
    if (df == 0.0 || f == 0.0) break;
    const double nx = x - f / df;
    if (std::abs(polynomial_value(p, nx)) >= std::abs(f)) break;
    x = nx;
  }
  return x;
}

}  // namespace

double polynomial_value(const std::vector<double>& coeffs, double x) {
  double r = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) r = r * x + coeffs[i];
  return r;
}

std::vector<double> characteristic_polynomial(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("characteristic_polynomial: matrix is not square");
  const std::size_t n = a.rows();
  const Matrix h = hessenberg(a);
  // p[k] = det(lambda I - H[0..k, 0..k]), via the Hessenberg recurrence.
  std::vector<std::vector<double>> p(n + 1);
  p[0] = {1.0};
  for (std::size_t k = 1; k <= n; ++k) {
    p[k] = times_linear(p[k - 1], h(k - 1, k - 1));
    double sub = 1.0;
    for (std::size_t m = 1; m < k; ++m) {
      sub *= h(k - m, k - m - 1);
      const double coef = h(k - m - 1, k - 1) * sub;
      for (std::size_t i = 0; i < p[k - m - 1].size(); ++i) p[k][i] -= coef * p[k - m - 1][i];
    }
  }
  return p[n];
}

std::vector<std::complex<double>> polynomial_roots(std::vector<double> coeffs) {
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() <= 1) return {};
  const double lead = coeffs.back();
  for (double& c : coeffs) c /= lead;
  const std::vector<double> original = coeffs;
  const std::size_t degree = coeffs.size() - 1;

  std::vector<double> reals;
  std::vector<std::complex<double>> complexes;

  // Real roots: sign changes on an asinh-spaced grid over the Cauchy bound.
  double bound = 0.0;
  for (std::size_t i = 0; i < degree; ++i) bound = std::max(bound, std::abs(coeffs[i]));
  bound += 1.0;
  const double scale = 1e-9 * bound;
  const double tmax = std::asinh(bound / scale);
  const std::size_t samples = 20000 * degree;
  double prev_x = -bound;
  double prev_f = polynomial_value(original, prev_x);
  for (std::size_t s = 1; s <= samples && reals.size() < degree; ++s) {
    const double t = -tmax + 2.0 * tmax * static_cast<double>(s) / static_cast<double>(samples);
    const double x = scale * std::sinh(t);
    const double f = polynomial_value(original, x);
    if (f == 0.0) {
      reals.push_back(x);
    } else if (prev_f != 0.0 && (f < 0) != (prev_f < 0)) {
      reals.push_back(bisect_root(original, prev_x, x));
    }
    prev_x = x;
    prev_f = f;
  }

  std::vector<double> rest = coeffs;
  for (double r : reals) rest = deflate_linear(rest, r);

  std::vector<double> extra;
  while (rest.size() - 1 >= 3) {
    const QuadraticFactor q = bairstow(rest);
    push_quadratic_roots(q.u, q.v, extra, complexes);
    rest = q.quotient;
  }
  if (rest.size() - 1 == 2) {
    push_quadratic_roots(-rest[1] / rest[2], -rest[0] / rest[2], extra, complexes);
  } else if (rest.size() - 1 == 1) {
    extra.push_back(-rest[0] / rest[1]);
  }
  reals.insert(reals.end(), extra.begin(), extra.end());

  std::vector<std::complex<double>> roots;
  for (double r : reals) roots.emplace_back(newton_polish(original, r), 0.0);
  std::sort(roots.begin(), roots.end(), [](auto a, auto b) { return a.real() < b.real(); });
  std::sort(complexes.begin(), complexes.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() > b.imag();
  });
  roots.insert(roots.end(), complexes.begin(), complexes.end());
  return roots;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw InvalidArgument("eigenvalues: matrix must be square");
  if (a.rows() == 1) return {{a(0, 0), 0.0}};
  if (a.rows() == 2) {
    const double half_tr = 0.5 * (a(0, 0) + a(1, 1));
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = half_tr * half_tr - det;
    if (disc < 0.0) {
      const double s = std::sqrt(-disc);
      return {{half_tr, s}, {half_tr, -s}};
    }
    const double s = std::sqrt(disc);
    const double l1 = half_tr + (half_tr >= 0 ? s : -s);
    const double l2 = l1 != 0.0 ? det / l1 : 0.0;
    return {{std::min(l1, l2), 0.0}, {std::max(l1, l2), 0.0}};
  }
  return polynomial_roots(characteristic_polynomial(a));
}

SingularProbe smallest_singular_probe(const Matrix& b, int iterations) {
  const std::size_t n = b.rows();
  const double floor = kEps * std::max(b.norm_inf(), std::numeric_limits<double>::min()) * static_cast<double>(n);
  const LuFactor lu(b, floor);
  Vector z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = 1.0 + 0.137 * static_cast<double>(i) * (i % 2 ? -1.0 : 1.0);
  double nz = norm2(z);
  for (double& zi : z) zi /= nz;
  for (int it = 0; it < iterations; ++it) {
    Vector y = lu.solve_transpose(z);
    const double ny = norm2(y);
    if (!std::isfinite(ny) || ny == 0.0) break;
    for (double& yi : y) yi /= ny;
    Vector next = lu.solve(y);
    nz = norm2(next);
    if (!std::isfinite(nz) || nz == 0.0) break;
    for (double& zi : next) zi /= nz;
    z = std::move(next);
  }
  return {z, norm2(b.apply(z))};
}

Vector eigenvector(const Matrix& a, double lambda) {
  Matrix shifted(a);
  for (std::size_t i = 0; i < a.rows(); ++i) shifted(i, i) -= lambda;
  Vector v = smallest_singular_probe(shifted).direction;
  std::size_t imax = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  if (v[imax] < 0)
    for (double& vi : v) vi = -vi;
  return v;
}

}  // namespace sgad
