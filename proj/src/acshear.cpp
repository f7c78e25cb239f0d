#include "sgad/acshear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sgad/errors.hpp"
#include "sgad/field_kernels.hpp"

namespace sgad {

namespace {

struct ShearTables {
  Vector sin_row;  // sin(2 pi y_i)
  Vector sin_col;  // sin(2 pi x_j)
};

ShearTables shear_tables(std::size_t n) {
  ShearTables t{Vector(n), Vector(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::sin(2.0 * std::numbers::pi * grid_coordinate(k, n));
    t.sin_row[k] = s;
    t.sin_col[k] = s;
  }
  return t;
}

simd::OperatorCoeffs shear_coeffs(const ShearConfig& cfg, double sign) {
  simd::OperatorCoeffs k;
  const double g = sign * cfg.shear_rate;
  if (cfg.variant != ShearVariant::None) k.gx = g;
  if (cfg.variant == ShearVariant::XYShear) k.gy = g;
  return k;
}

void check_pair(const Field2D& a, const Field2D& b, const char* what) {
  if (a.n() != b.n()) throw InvalidArgument(std::string(what) + ": grid size mismatch");
}

// Preallocated operator evaluation for one grid size.
class OperatorEval {
 public:
  explicit OperatorEval(std::size_t n) : n_(n), tables_(shear_tables(n)), kernels_(simd::active_kernels()) {}

  void operator()(const Field2D& p, const Field2D& v, const simd::OperatorCoeffs& k, Field2D& out) const {
    kernels_.apply_operator(n_, 1.0 / static_cast<double>(n_), p.data(), v.data(), tables_.sin_row.data(),
                            tables_.sin_col.data(), k, out.data());
  }

  double inner(const Field2D& a, const Field2D& b) const {
    const double h = 1.0 / static_cast<double>(n_);
    return h * h * kernels_.dot(a.data(), b.data(), a.size());
  }

  void axpy(double a, const Field2D& x, Field2D& y) const { kernels_.axpy(a, x.data(), y.data(), x.size()); }

 private:
  std::size_t n_;
  ShearTables tables_;
  const simd::KernelTable& kernels_;
};

simd::OperatorCoeffs rhs_coeffs(const ShearConfig& cfg) {
  auto k = shear_coeffs(cfg, 1.0);
  k.kappa = cfg.kappa;
  k.a = 1.0;
  k.c = 1.0;
  return k;
}

simd::OperatorCoeffs linear_coeffs(const ShearConfig& cfg, bool adjoint) {
  auto k = shear_coeffs(cfg, adjoint ? -1.0 : 1.0);
  k.kappa = cfg.kappa;
  k.a = 1.0;
  k.c = 3.0;
  return k;
}

double tanh_profile(double signed_distance, double kappa) {
  return std::tanh(signed_distance / interface_width(kappa));
}

}  // namespace

std::string_view to_string(ShearVariant v) noexcept {
  switch (v) {
    case ShearVariant::None: return "none";
    case ShearVariant::XShear: return "x-shear";
    case ShearVariant::XYShear: return "xy-shear";
  }
  return "?";
}

ShearVariant parse_shear_variant(std::string_view name) {
  if (name == "none") return ShearVariant::None;
  if (name == "x-shear") return ShearVariant::XShear;
  if (name == "xy-shear") return ShearVariant::XYShear;
  throw InvalidArgument("unknown shear variant '" + std::string(name) + "'");
}

void ShearConfig::validate() const {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be positive");
  if (!(shear_rate >= 0.0) || !std::isfinite(shear_rate)) throw InvalidArgument("shear_rate must be non-negative");
}

Field2D laplacian_periodic(const Field2D& phi) {
  phi.validate();
  Field2D out(phi.n());
  simd::OperatorCoeffs k;
  k.kappa = 1.0;
  OperatorEval(phi.n())(phi, phi, k, out);
  return out;
}

Field2D ac_rhs(const Field2D& phi, const ShearConfig& cfg) {
  cfg.validate();
  phi.validate();
  Field2D out(phi.n());
  OperatorEval(phi.n())(phi, phi, rhs_coeffs(cfg), out);
  return out;
}

Field2D ac_jvp(const Field2D& phi, const Field2D& v, const ShearConfig& cfg) {
  cfg.validate();
  check_pair(phi, v, "ac_jvp");
  Field2D out(phi.n());
  OperatorEval(phi.n())(phi, v, linear_coeffs(cfg, false), out);
  return out;
}

Field2D ac_vjp(const Field2D& phi, const Field2D& w, const ShearConfig& cfg) {
  cfg.validate();
  check_pair(phi, w, "ac_vjp");
  Field2D out(phi.n());
  OperatorEval(phi.n())(phi, w, linear_coeffs(cfg, true), out);
  return out;
}

Field2D variational_derivative(const Field2D& phi, const ShearConfig& cfg) {
  ShearConfig still = cfg;
  still.shear_rate = 0.0;
  Field2D out = ac_rhs(phi, still);
  out *= -1.0;
  return out;
}

double energy(const Field2D& phi, const ShearConfig& cfg) {
  cfg.validate();
  phi.validate();
  const std::size_t n = phi.n();
  const double h = phi.h();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t iu = (i + n - 1) % n, id = (i + 1) % n;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jl = (j + n - 1) % n, jr = (j + 1) % n;
      const double px = (phi(i, jr) - phi(i, jl)) / (2.0 * h);
      const double py = (phi(id, j) - phi(iu, j)) / (2.0 * h);
      const double w = 1.0 - phi(i, j) * phi(i, j);
      sum += 0.5 * cfg.kappa * (px * px + py * py) + 0.25 * w * w;
    }
  }
  return h * h * sum;
}

double l2_inner(const Field2D& a, const Field2D& b) {
  check_pair(a, b, "l2_inner");
  return a.h() * a.h() * simd::active_kernels().dot(a.data(), b.data(), a.size());
}

double l2_norm(const Field2D& a) { return std::sqrt(l2_inner(a, a)); }

void l2_normalize(Field2D& a) {
  const double nrm = l2_norm(a);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw InvalidArgument("l2_normalize: zero or non-finite field");
  a *= 1.0 / nrm;
}

double interface_width(double kappa) { return std::sqrt(2.0 * kappa); }

Field2D droplet_seed(std::size_t n, double kappa, double radius) {
  return Field2D::from_function(n, [&](double x, double y) {
    return tanh_profile(radius - std::hypot(x - 0.5, y - 0.5), kappa);
  });
}

Field2D stripe_seed(std::size_t n, double kappa, StripeOrientation orientation, double width) {
  if (!(width > 0.0 && width < 1.0)) throw InvalidArgument("stripe_seed: width must lie in (0, 1)");
  return Field2D::from_function(n, [&](double x, double y) {
    const double s = orientation == StripeOrientation::Horizontal ? y : x;
    return tanh_profile(0.5 * width - std::abs(s - 0.5), kappa);
  });
}

Field2D default_direction(const Field2D& phi) {
  Field2D v(phi.n());
  for (std::size_t k = 0; k < phi.size(); ++k) v.data()[k] = 1.0 - phi.data()[k] * phi.data()[k];
  l2_normalize(v);
  return v;
}

double x_variation(const Field2D& phi) {
  const std::size_t n = phi.n();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // Deviations from the row's first entry.
    const double ref = phi(i, 0);
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += phi(i, j) - ref;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (phi(i, j) - ref - mean) * (phi(i, j) - ref - mean);
    worst = std::max(worst, std::sqrt(var / static_cast<double>(n)));
  }
  return worst;
}

double symmetry_residual(const Field2D& phi) {
  const std::size_t n = phi.n();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n; ++c) {
    auto psi = [&](std::size_t i, std::size_t j) { return phi(i, (j + c) % n); };
    // {transpose, anti-transpose} x {same sign, flipped sign}
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double a = psi(i, j);
        const double t = psi(j, i);
        const double r = psi((n - j) % n, (n - i) % n);
        acc[0] += (a - t) * (a - t);
        acc[1] += (a + t) * (a + t);
        acc[2] += (a - r) * (a - r);
        acc[3] += (a + r) * (a + r);
      }
    best = std::min({best, acc[0], acc[1], acc[2], acc[3]});
  }
  return phi.h() * std::sqrt(best);
}

double default_pde_dt(std::size_t n) {
  const double r = 128.0 / static_cast<double>(n);
  return 1e-3 * r * r;
}

void PdeGadOptions::validate() const {
  if (dt && (!(*dt > 0.0) || !std::isfinite(*dt))) throw InvalidArgument("dt must be positive");
  if (max_steps == 0) throw InvalidArgument("max_steps must be positive");
  if (!(residual_tol > 0.0)) throw InvalidArgument("residual_tol must be positive");
  if (!(relaxation > 0.0)) throw InvalidArgument("relaxation must be positive");
  if (!(blowup_bound > 0.0)) throw InvalidArgument("blowup_bound must be positive");
}

PdeSaddleResult pde_find_saddle(const Field2D& phi0, const Field2D& v0, const ShearConfig& cfg,
                                const PdeGadOptions& opts) {
  cfg.validate();
  opts.validate();
  phi0.validate();
  check_pair(phi0, v0, "pde_find_saddle");
  v0.validate();

  const std::size_t n = phi0.n();
  const double dt = opts.dt.value_or(default_pde_dt(n));
  const OperatorEval op(n);
  const auto kb = rhs_coeffs(cfg);
  const auto kj = linear_coeffs(cfg, opts.form == DirectionForm::Left);

  PdeSaddleResult res;
  res.phi = phi0;
  res.dir = v0;
  const double v_norm = std::sqrt(op.inner(v0, v0));
  if (!(v_norm > 0.0)) throw InvalidArgument("pde_find_saddle: v0 is zero in L2");
  res.dir *= 1.0 / v_norm;

  Field2D b(n), jv(n);
  Field2D& phi = res.phi;
  Field2D& v = res.dir;

  std::size_t step = 0;
  for (;; ++step) {
    op(phi, phi, kb, b);
    res.residual = std::sqrt(op.inner(b, b));
    res.converged = res.residual <= opts.residual_tol;
    op(phi, v, kj, jv);
    res.rayleigh = op.inner(v, jv);

    const bool last = res.converged || step == opts.max_steps;
    if (opts.record_every > 0 && (step % opts.record_every == 0 || last))
      res.trace.push_back({step, static_cast<double>(step) * dt, res.residual, energy(phi, cfg), res.rayleigh});
    if (last) break;

    const double bv = op.inner(b, v);
    op.axpy(-2.0 * bv, v, b);
    op.axpy(dt, b, phi);
    op.axpy(-res.rayleigh, v, jv);
    op.axpy(dt * opts.relaxation, jv, v);

    const double nv = std::sqrt(op.inner(v, v));
    if (!std::isfinite(nv) || !phi.all_finite())
      throw NumericalBlowup("pde_find_saddle: state is not finite (dt = " + std::to_string(dt) + ")", step + 1);
    v *= 1.0 / nv;
    const auto [lo, hi] = std::minmax_element(phi.values().begin(), phi.values().end());
    if (std::max(-*lo, *hi) > opts.blowup_bound)
      throw NumericalBlowup("pde_find_saddle: |phi|_inf exceeds the blowup bound (dt = " + std::to_string(dt) + ")",
                            step + 1);
  }
  res.steps = step;
  res.energy = energy(phi, cfg);
  return res;
}

SweepResult continuation_in_gamma(const std::vector<double>& gammas, const ShearConfig& base,
                                  const Field2D& phi_seed, const PdeGadOptions& opts, std::optional<Field2D> v_seed) {
  if (gammas.empty()) throw InvalidArgument("continuation_in_gamma: empty gamma list");
  for (std::size_t k = 1; k < gammas.size(); ++k)
    if (!(gammas[k] > gammas[k - 1])) throw InvalidArgument("continuation_in_gamma: gammas must be ascending");

  SweepResult sweep;
  Field2D phi = phi_seed;
  Field2D v = v_seed ? *v_seed : default_direction(phi_seed);
  for (double g : gammas) {
    ShearConfig cfg = base;
    cfg.shear_rate = g;
    SweepStage stage;
    stage.gamma = g;
    stage.result = pde_find_saddle(phi, v, cfg, opts);
    stage.x_variation = x_variation(stage.result.phi);
    stage.symmetry_residual = symmetry_residual(stage.result.phi);
    const bool ok = stage.result.converged;
    phi = stage.result.phi;
    v = stage.result.dir;
    sweep.stages.push_back(std::move(stage));
    if (!ok) return sweep;
  }
  sweep.complete = true;
  return sweep;
}

}  // namespace sgad
