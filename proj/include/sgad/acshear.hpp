#pragma once

// Allen-Cahn dynamics under shear on the periodic unit square
//
//   phi_t = kappa Lap phi + phi - phi^3 + gamma sin(2 pi y) phi_x  [+ gamma sin(2 pi x) phi_y]
//
// and the simplified GAD in the L2 geometry.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "sgad/field.hpp"
#include "sgad/stability.hpp"

namespace sgad {

enum class ShearVariant { None, XShear, XYShear };

std::string_view to_string(ShearVariant v) noexcept;
ShearVariant parse_shear_variant(std::string_view name);

struct ShearConfig {
  ShearVariant variant = ShearVariant::XShear;
  double shear_rate = 0.0;
  double kappa = 0.01;

  void validate() const;
};

Field2D laplacian_periodic(const Field2D& phi);
Field2D ac_rhs(const Field2D& phi, const ShearConfig& cfg);
/// Db(phi) v = kappa Lap v + v - 3 phi^2 v + shear advection of v.
Field2D ac_jvp(const Field2D& phi, const Field2D& v, const ShearConfig& cfg);
/// Db(phi)^T w: the advection terms change sign.
Field2D ac_vjp(const Field2D& phi, const Field2D& w, const ShearConfig& cfg);
/// dE/dphi = -kappa Lap phi - phi + phi^3.
Field2D variational_derivative(const Field2D& phi, const ShearConfig& cfg);

/// h^2 sum of kappa/2 |grad phi|^2 + (1 - phi^2)^2 / 4, centered-difference gradient.
double energy(const Field2D& phi, const ShearConfig& cfg);

double l2_inner(const Field2D& a, const Field2D& b);
double l2_norm(const Field2D& a);
/// Scales `a` to unit L2 norm; throws InvalidArgument on a zero field.
void l2_normalize(Field2D& a);

/// Interface half-width sqrt(2 kappa) of the tanh profile.
double interface_width(double kappa);

/// +1 inside a disc of the given radius centred at (0.5, 0.5), -1 outside.
Field2D droplet_seed(std::size_t n, double kappa, double radius = 0.25);

enum class StripeOrientation {
  Horizontal,  ///< phi depends on y only (lamellar)
  Vertical,    ///< phi depends on x only
};

/// +1 on a band of the given width centred at 0.5, -1 elsewhere.
Field2D stripe_seed(std::size_t n, double kappa, StripeOrientation orientation, double width = 0.5);

/// Unit L2 field proportional to 1 - phi^2 (concentrated on interfaces).
Field2D default_direction(const Field2D& phi);

/// Largest standard deviation of phi along x over all rows.
double x_variation(const Field2D& phi);

/// min over x-shifts c, the reflections (x, y) -> (y, x), (x, y) -> (-y, -x) and
/// the sign flip phi -> -phi of |psi - s R psi|_L2, psi = phi(x + c, y).
double symmetry_residual(const Field2D& phi);

/// 1e-3 (128/n)^2: inside the diffusive limit h^2/(4 kappa) for kappa = 0.01.
double default_pde_dt(std::size_t n);

struct PdeGadOptions {
  std::optional<double> dt;  ///< defaults to default_pde_dt(n)
  std::size_t max_steps = 2'000'000;
  /// Convergence threshold on |ac_rhs(phi)|_L2.
  double residual_tol = 1e-6;
  double relaxation = 1.0;
  DirectionForm form = DirectionForm::Right;
  /// Trace row every this many steps; 0 disables recording.
  std::size_t record_every = 0;
  /// Blowup when |phi|_inf exceeds this.
  double blowup_bound = 1e3;

  void validate() const;
};

struct PdeTraceRow {
  std::size_t step = 0;
  double t = 0.0;
  double residual = 0.0;
  double energy = 0.0;
  double rayleigh = 0.0;
};

struct PdeSaddleResult {
  Field2D phi;
  Field2D dir;
  double residual = 0.0;  ///< |ac_rhs(phi)|_L2
  double rayleigh = 0.0;  ///< <dir, Db dir>_L2
  double energy = 0.0;
  std::size_t steps = 0;
  bool converged = false;
  std::vector<PdeTraceRow> trace;
};

/// Explicit Euler on phi' = b - 2 <b, v> v, v' = relaxation (Jv - <v, Jv> v) with
/// v renormalized in L2 each step (J^T for the w-form). Throws NumericalBlowup.
PdeSaddleResult pde_find_saddle(const Field2D& phi0, const Field2D& v0, const ShearConfig& cfg,
                                const PdeGadOptions& opts = {});

struct SweepStage {
  double gamma = 0.0;
  PdeSaddleResult result;
  double x_variation = 0.0;
  double symmetry_residual = 0.0;
};

struct SweepResult {
  std::vector<SweepStage> stages;
  /// False when a stage failed to converge; that stage is the last entry.
  bool complete = false;
};

/// Saddle searches over ascending shear rates, each seeded from the previous
/// converged saddle and direction. `v_seed` defaults to default_direction(phi_seed).
SweepResult continuation_in_gamma(const std::vector<double>& gammas, const ShearConfig& base,
                                  const Field2D& phi_seed, const PdeGadOptions& opts = {},
                                  std::optional<Field2D> v_seed = std::nullopt);

}  // namespace sgad
