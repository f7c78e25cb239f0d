#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "sgad/linalg.hpp"

namespace sgad {

/// Largest dimension for which a dense finite-difference Jacobian is formed.
inline constexpr std::size_t kDenseThreshold = 64;

/**
 * A dynamical system x' = b(x) on R^dim.
 *
 * The Jacobian J = Db is only ever touched through its action. `analytic_jvp`
 * and `analytic_vjp` are optional; when absent, J*v falls back to a central
 * difference and J^T*w to the transpose of a dense finite-difference
 * Jacobian (small dim only).
 */
struct VectorFieldModel {
  using Field = std::function<Vector(std::span<const double>)>;
  using Action = std::function<Vector(std::span<const double>, std::span<const double>)>;

  std::string name;
  std::size_t dim = 0;
  Field eval;
  Action analytic_jvp;
  Action analytic_vjp;
  /// Potential V for gradient models (b = -grad V); informational only.
  std::function<double(std::span<const double>)> potential;

  bool has_analytic_jvp() const noexcept { return static_cast<bool>(analytic_jvp); }
  bool has_analytic_vjp() const noexcept { return static_cast<bool>(analytic_vjp); }
};

/// True when vjp() can be evaluated (analytic adjoint or dense fallback).
bool supports_vjp(const VectorFieldModel& model) noexcept;

Vector eval_b(const VectorFieldModel& model, std::span<const double> x);

/// cbrt(machine epsilon) * (1 + |x|_inf)
double default_fd_step(std::span<const double> x);

/// Db(x) v. Central difference along v/|v| unless the model has an analytic action.
Vector jvp(const VectorFieldModel& model, std::span<const double> x, std::span<const double> v,
           std::optional<double> h = std::nullopt);

/// Central-difference J*v regardless of any analytic action.
Vector jvp_fd(const VectorFieldModel& model, std::span<const double> x, std::span<const double> v,
              std::optional<double> h = std::nullopt);

/// Db(x)^T w.
Vector vjp(const VectorFieldModel& model, std::span<const double> x, std::span<const double> w);

/// Column j = jvp(x, e_j). Throws UnsupportedOperation above kDenseThreshold.
Matrix dense_jacobian(const VectorFieldModel& model, std::span<const double> x,
                      std::optional<double> h = std::nullopt);

// Built-in models.

/// b_i(x) = -sum_j D_ij x_j + (sigma^2/2) Gamma_i(x), Gamma_i = 1/(1+(x_i-5)^2),
/// sigma^2 = 10, D = [[0.8,-0.3],[-0.2,0.5]]. Analytic jvp and vjp.
VectorFieldModel model_example1();

/// Same form with D = [[0.8,-0.2],[-0.2,0.5]]: the closed-form averaged drift of
/// the slow-fast example.
VectorFieldModel model_example2_effective();

/// b = -grad V. The Hessian is symmetric, so the transpose action reuses J*v.
VectorFieldModel model_from_gradient(std::string name, std::size_t dim,
                                     std::function<double(std::span<const double>)> potential,
                                     VectorFieldModel::Field gradient);

/// b(x) = A (x - c). Analytic jvp/vjp.
VectorFieldModel model_linear(Matrix a, Vector center = {});

/// Look up a zoo model: "example1", "example2-effective".
VectorFieldModel model_by_name(const std::string& name);

namespace zoo {

struct ReferencePoints {
  Vector m1, m2, m3, s1, s2;
};

/// Fixed points quoted to four decimals for the two-dimensional examples.
ReferencePoints example1_points();
ReferencePoints example2_points();

inline constexpr double kSigmaSquared = 10.0;

}  // namespace zoo

}  // namespace sgad
