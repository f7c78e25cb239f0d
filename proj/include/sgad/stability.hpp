#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgad/linalg.hpp"
#include "sgad/vectorfield.hpp"

namespace sgad {

enum class Classification { Stable, Index1Saddle, IndexK, Degenerate };

std::string_view to_string(Classification c) noexcept;

inline constexpr double kClassificationTol = 1e-8;

struct FixedPointReport {
  Vector x;
  double residual = 0.0;  ///< |b(x)|_inf
  std::vector<std::complex<double>> eigenvalues;
  /// Number of eigenvalues with real part above the classification tolerance.
  std::size_t index = 0;
  Classification classification = Classification::Degenerate;
};

/// Throws NotAFixedPoint when |b(x)|_inf > tol.
FixedPointReport classify_fixed_point(const VectorFieldModel& model, std::span<const double> x, double tol = 1e-8,
                                      double classification_tol = kClassificationTol);

/// Newton iteration with the dense Jacobian until |b|_inf <= tol.
Vector refine_fixed_point(const VectorFieldModel& model, std::span<const double> x0, double tol = 1e-12,
                          std::size_t max_iters = 50);

enum class DirectionForm { Right, Left };

/// Central-difference Jacobian of the simplified GAD right-hand side (relaxation 1)
/// over the stacked (x, dir) coordinates, with no sphere constraint. `Right` uses
/// the v-form (J v), `Left` the w-form (J^T w).
Matrix gad_extended_jacobian(const VectorFieldModel& model, std::span<const double> x_s,
                             std::span<const double> dir, DirectionForm form = DirectionForm::Right,
                             std::optional<double> h = std::nullopt);

/// One predicted eigenvalue of the extended Jacobian and its probe residual.
struct SpectrumProbe {
  std::string origin;  ///< "-2*l_i", "-l_i", "l_j", "l_j-l_i"
  double predicted = 0.0;
  double residual = 0.0;  ///< min over unit z of |(J~ - mu I) z| (inverse-iteration estimate)
  bool pass = false;
};

struct EigenpairCheck {
  std::size_t i = 0;
  double lambda = 0.0;
  Vector direction;
  double jtilde_norm_inf = 0.0;
  double check_tol = 0.0;
  std::vector<SpectrumProbe> probes;
  bool all_pass = false;
  /// Every predicted eigenvalue is negative (linear stability of (x_s, v_i)).
  bool predicted_stable = false;
  /// lambda_i is the only positive eigenvalue of Db(x_s).
  bool unique_positive = false;
};

struct Theorem1Report {
  std::string model;
  Vector x_s;
  double residual = 0.0;
  DirectionForm form = DirectionForm::Right;
  std::vector<double> eigenvalues;  ///< of Db(x_s), ascending
  std::vector<EigenpairCheck> pairs;
  /// Every probe passed.
  bool spectrum_verified = false;
  /// predicted_stable <=> unique_positive for every eigenpair.
  bool stability_consistent = false;
  bool pass() const { return spectrum_verified && stability_consistent; }

  std::string to_json() const;
  std::string to_text() const;
};

inline constexpr double kSpectrumCheckRelTol = 1e-6;

/**
 * Checks the predicted spectrum {-2 l_i, -l_i} U {l_j} U {l_j - l_i} (j != i) of
 * the simplified-GAD Jacobian at every (x_s, v_i) against a finite-difference
 * extended Jacobian. Each predicted mu passes when |(J~ - mu I) z| <=
 * 1e-6 |J~|_inf for the probed unit z.
 *
 * Requires distinct real eigenvalues of Db(x_s); throws OutsideHypotheses otherwise.
 */
Theorem1Report verify_theorem1_spectrum(const VectorFieldModel& model, std::span<const double> x_s,
                                        DirectionForm form = DirectionForm::Right);

}  // namespace sgad
