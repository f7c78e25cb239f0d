#pragma once

// Gentlest-ascent style dynamics on (position, direction) pairs.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgad/linalg.hpp"
#include "sgad/vectorfield.hpp"

namespace sgad {

enum class Dynamics {
  SimplifiedV,  ///< x and a right direction v, uses J v only
  SimplifiedW,  ///< x and a left direction w, uses J^T w
  Original,     ///< x, v and w with oblique projection
  Hamilton,     ///< momentum-normalized Hamilton flow on the zero-energy surface
};

std::string_view to_string(Dynamics d) noexcept;
Dynamics parse_dynamics(std::string_view name);

enum class DirectionKind { Right, Left, Momentum };

struct Direction {
  Vector components;
  DirectionKind kind = DirectionKind::Right;

  /// Normalized copy of `v`; throws InvalidArgument on a zero vector.
  static Direction unit(std::span<const double> v, DirectionKind kind = DirectionKind::Right);

  double norm() const { return norm2(components); }
  void normalize();
};

DirectionKind direction_kind(Dynamics d) noexcept;

struct GadState {
  Vector x;
  Direction dir;
  /// Left direction of the original GAD, scaled so that <dir2, dir> = 1.
  std::optional<Vector> dir2;
};

struct GadOptions {
  double dt = 1e-3;
  std::size_t max_steps = 1'000'000;
  /// Convergence threshold on |b(x)|_inf.
  double residual_tol = 1e-8;
  /// Multiplies the direction equation (inverse of the direction time scale).
  double relaxation = 1.0;
  /// Signed displacement along dir0 applied when the start is already a fixed
  /// point. Defaults to 1e-2 * (1 + |x0|_inf).
  std::optional<double> kick;
  /// End the run (converged = false, blowup_step set) instead of throwing
  /// NumericalBlowup.
  bool stop_on_blowup = false;
  /// Record a trajectory row every this many steps; 0 disables recording.
  std::size_t record_every = 0;

  void validate() const;
};

struct Rates {
  Vector dx;
  Vector ddir;
  Vector ddir2;  ///< empty unless the dynamics carries a second direction
};

struct TrajectoryRow {
  std::size_t step = 0;
  double t = 0.0;
  Vector x;
  Vector dir;
  double residual_inf = 0.0;
  double rayleigh = 0.0;
};

struct SaddleResult {
  Vector x_star;
  Direction dir_star;
  double residual = 0.0;  ///< final |b(x)|_inf
  std::size_t steps = 0;
  bool converged = false;
  /// <dir, J dir> at x_star.
  double eigen_estimate = 0.0;
  /// Step at which a non-finite state ended the run (stop_on_blowup only).
  std::optional<std::size_t> blowup_step;
  std::vector<TrajectoryRow> trajectory;
};

// Right-hand sides. Directions must be unit vectors (to 1e-8).

Rates rhs_simplified_v(const VectorFieldModel& model, std::span<const double> x, std::span<const double> v,
                       double relaxation = 1.0);
Rates rhs_simplified_w(const VectorFieldModel& model, std::span<const double> x, std::span<const double> w,
                       double relaxation = 1.0);
/// `v` is unit, `w` is normalized so that <w, v> = 1 (only <w, v> != 0 is required).
Rates rhs_original(const VectorFieldModel& model, std::span<const double> x, std::span<const double> v,
                   std::span<const double> w, double relaxation = 1.0);
/// Simplified-GAD rates without the unit-norm precondition (for linearizations
/// off the sphere). `transpose` selects the w-form direction equation.
Rates rhs_simplified_unconstrained(const VectorFieldModel& model, std::span<const double> x,
                                   std::span<const double> dir, bool transpose, double relaxation = 1.0);

/// No relaxation factor: the Hamilton flow has no free time scale.
Rates rhs_hamilton_normalized(const VectorFieldModel& model, std::span<const double> x, std::span<const double> u);

/// H(x, p) = <b(x), p> + <p, p> / 2.
double hamiltonian(const VectorFieldModel& model, std::span<const double> x, std::span<const double> p);

/// H(x, p) on the zero-energy branch p = sqrt(l) u, sqrt(l) = max(0, -2 <b(x), u>),
/// evaluated as sqrt(l) <b, u> + l / 2 for unit u.
double reconstruct_hamiltonian(const VectorFieldModel& model, std::span<const double> x,
                               std::span<const double> u);

Rates evaluate_rhs(Dynamics dynamics, const VectorFieldModel& model, const GadState& state, double relaxation = 1.0);

/// One classical RK4 step of the coupled system followed by renormalization of
/// the direction(s). Throws NumericalBlowup (tagged with `step_index`) on
/// non-finite output.
GadState step_rk4(Dynamics dynamics, const VectorFieldModel& model, const GadState& state, double dt,
                  double relaxation = 1.0, std::size_t step_index = 0);

/// <dir, J dir> (equal to <dir, J^T dir> for every dynamics).
double rayleigh_quotient(const VectorFieldModel& model, std::span<const double> x, std::span<const double> dir);

GadState initial_state(Dynamics dynamics, std::span<const double> x0, std::span<const double> dir0);

SaddleResult find_saddle(const VectorFieldModel& model, std::span<const double> x0, std::span<const double> dir0,
                         const GadOptions& opts = {}, Dynamics dynamics = Dynamics::SimplifiedV);

/// Header "step,t,x_1..x_d,dir_1..dir_d,residual_inf,rayleigh".
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows, std::size_t dim);

}  // namespace sgad
