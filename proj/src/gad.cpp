#include "sgad/gad.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "sgad/errors.hpp"

namespace sgad {

namespace {

constexpr double kUnitTolerance = 1e-8;

void require_unit(std::span<const double> d, const char* what) {
  if (std::abs(norm2(d) - 1.0) > kUnitTolerance)
    throw InvalidArgument(std::string(what) + ": direction must have unit norm");
}

// x' = b - 2 <b, d> d / |d|^2, the reflection of b across the plane normal to d.
Vector reflected_drift(std::span<const double> b, std::span<const double> d) {
  const double c = 2.0 * dot(b, d) / dot(d, d);
  Vector dx(b.begin(), b.end());
  axpy(-c, d, dx);
  return dx;
}

// scale * (a - <d, a> d). Tangent to the unit sphere when |d| = 1; off the sphere
// (RK stages) no 1/|d|^2 is applied, so the linearization about a unit eigenvector
// keeps its -2*lambda radial eigenvalue.
Vector tangent_part(Vector a, std::span<const double> d, double scale) {
  const double c = dot(d, a);
  axpy(-c, d, a);
  for (double& ai : a) ai *= scale;
  return a;
}

// The unchecked forms are used at RK stages, where directions are off the sphere by O(dt^2).
Rates simplified_v(const VectorFieldModel& m, std::span<const double> x, std::span<const double> v, double tau) {
  const Vector b = eval_b(m, x);
  return {reflected_drift(b, v), tangent_part(jvp(m, x, v), v, tau), {}};
}

Rates simplified_w(const VectorFieldModel& m, std::span<const double> x, std::span<const double> w, double tau) {
  const Vector b = eval_b(m, x);
  return {reflected_drift(b, w), tangent_part(vjp(m, x, w), w, tau), {}};
}

Rates hamilton(const VectorFieldModel& m, std::span<const double> x, std::span<const double> u) {
  const Vector b = eval_b(m, x);
  return {reflected_drift(b, u), tangent_part(vjp(m, x, u), u, -1.0), {}};
}

Rates original(const VectorFieldModel& m, std::span<const double> x, std::span<const double> v,
               std::span<const double> w, double tau) {
  const double wv = dot(w, v);
  if (std::abs(wv) < 1e-12) throw DegenerateProjector("original GAD: <w, v> vanishes");
  const Vector b = eval_b(m, x);
  Vector dx(b);
  axpy(-2.0 * dot(b, w) / wv, v, dx);

  const Vector jv = jvp(m, x, v);
  const Vector jtw = vjp(m, x, w);
  const double alpha = dot(v, jv);
  const double beta = 2.0 * dot(w, jv) - alpha;
  Vector dv(jv);
  axpy(-alpha, v, dv);
  Vector dw(jtw);
  axpy(-beta, w, dw);
  for (double& t : dv) t *= tau;
  for (double& t : dw) t *= tau;
  return {std::move(dx), std::move(dv), std::move(dw)};
}

std::size_t block_count(Dynamics d) { return d == Dynamics::Original ? 3 : 2; }

Vector pack(const GadState& s, Dynamics d) {
  Vector y(s.x);
  y.insert(y.end(), s.dir.components.begin(), s.dir.components.end());
  if (d == Dynamics::Original) {
    if (!s.dir2) throw InvalidArgument("original GAD state needs a second direction");
    y.insert(y.end(), s.dir2->begin(), s.dir2->end());
  }
  return y;
}

Rates rates_of_packed(Dynamics d, const VectorFieldModel& m, std::span<const double> y, double tau) {
  const std::size_t n = m.dim;
  auto x = y.subspan(0, n);
  auto dir = y.subspan(n, n);
  switch (d) {
    case Dynamics::SimplifiedV: return simplified_v(m, x, dir, tau);
    case Dynamics::SimplifiedW: return simplified_w(m, x, dir, tau);
    case Dynamics::Hamilton: return hamilton(m, x, dir);
    case Dynamics::Original: return original(m, x, dir, y.subspan(2 * n, n), tau);
  }
  throw InvalidArgument("unknown dynamics");
}

Vector packed_rhs(Dynamics d, const VectorFieldModel& m, std::span<const double> y, double tau) {
  Rates r = rates_of_packed(d, m, y, tau);
  Vector out(std::move(r.dx));
  out.insert(out.end(), r.ddir.begin(), r.ddir.end());
  out.insert(out.end(), r.ddir2.begin(), r.ddir2.end());
  return out;
}

}  // namespace

std::string_view to_string(Dynamics d) noexcept {
  switch (d) {
    case Dynamics::SimplifiedV: return "simplified-v";
    case Dynamics::SimplifiedW: return "simplified-w";
    case Dynamics::Original: return "original";
    case Dynamics::Hamilton: return "hamilton";
  }
  return "?";
}

Dynamics parse_dynamics(std::string_view name) {
  if (name == "simplified-v") return Dynamics::SimplifiedV;
  if (name == "simplified-w") return Dynamics::SimplifiedW;
  if (name == "original") return Dynamics::Original;
  if (name == "hamilton") return Dynamics::Hamilton;
  throw InvalidArgument("unknown dynamics '" + std::string(name) + "'");
}

Direction Direction::unit(std::span<const double> v, DirectionKind kind) {
  Direction d{Vector(v.begin(), v.end()), kind};
  d.normalize();
  return d;
}

void Direction::normalize() {
  const double n = norm2(components);
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("direction must be a finite nonzero vector");
  for (double& c : components) c /= n;
}

DirectionKind direction_kind(Dynamics d) noexcept {
  switch (d) {
    case Dynamics::SimplifiedW: return DirectionKind::Left;
    case Dynamics::Hamilton: return DirectionKind::Momentum;
    default: return DirectionKind::Right;
  }
}

void GadOptions::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(residual_tol > 0.0)) throw InvalidArgument("residual_tol must be positive");
  if (!(relaxation > 0.0)) throw InvalidArgument("relaxation must be positive");
  if (kick && !std::isfinite(*kick)) throw InvalidArgument("kick must be finite");
}

Rates rhs_simplified_v(const VectorFieldModel& model, std::span<const double> x, std::span<const double> v,
                       double relaxation) {
  require_unit(v, "rhs_simplified_v");
  return simplified_v(model, x, v, relaxation);
}

Rates rhs_simplified_w(const VectorFieldModel& model, std::span<const double> x, std::span<const double> w,
                       double relaxation) {
  require_unit(w, "rhs_simplified_w");
  if (!supports_vjp(model))
    throw UnsupportedOperation("simplified w-form needs J^T w, which model '" + model.name + "' cannot provide");
  return simplified_w(model, x, w, relaxation);
}

Rates rhs_original(const VectorFieldModel& model, std::span<const double> x, std::span<const double> v,
                   std::span<const double> w, double relaxation) {
  return original(model, x, v, w, relaxation);
}

Rates rhs_simplified_unconstrained(const VectorFieldModel& model, std::span<const double> x,
                                   std::span<const double> dir, bool transpose, double relaxation) {
  return transpose ? simplified_w(model, x, dir, relaxation) : simplified_v(model, x, dir, relaxation);
}

Rates rhs_hamilton_normalized(const VectorFieldModel& model, std::span<const double> x,
                              std::span<const double> u) {
  require_unit(u, "rhs_hamilton_normalized");
  if (!supports_vjp(model))
    throw UnsupportedOperation("Hamilton flow needs J^T u, which model '" + model.name + "' cannot provide");
  return hamilton(model, x, u);
}

double hamiltonian(const VectorFieldModel& model, std::span<const double> x, std::span<const double> p) {
  const Vector b = eval_b(model, x);
  return dot(b, p) + 0.5 * dot(p, p);
}

double reconstruct_hamiltonian(const VectorFieldModel& model, std::span<const double> x,
                               std::span<const double> u) {
  const Vector b = eval_b(model, x);
  // Zero-energy branch: l = |p|^2 solves l = -2 sqrt(l) <b, u>; l = 0 when <b, u> > 0.
  const double c = dot(b, u);
  const double sqrt_l = std::max(0.0, -2.0 * c);
  // H(x, sqrt(l) u) with |u| = 1.
  return sqrt_l * c + 0.5 * (sqrt_l * sqrt_l);
}

Rates evaluate_rhs(Dynamics dynamics, const VectorFieldModel& model, const GadState& state, double relaxation) {
  switch (dynamics) {
    case Dynamics::SimplifiedV: return rhs_simplified_v(model, state.x, state.dir.components, relaxation);
    case Dynamics::SimplifiedW: return rhs_simplified_w(model, state.x, state.dir.components, relaxation);
    case Dynamics::Hamilton: return rhs_hamilton_normalized(model, state.x, state.dir.components);
    case Dynamics::Original:
      if (!state.dir2) throw InvalidArgument("original GAD state needs a second direction");
      return rhs_original(model, state.x, state.dir.components, *state.dir2, relaxation);
  }
  throw InvalidArgument("unknown dynamics");
}

GadState step_rk4(Dynamics dynamics, const VectorFieldModel& model, const GadState& state, double dt,
                  double relaxation, std::size_t step_index) {
  if (!(dt > 0.0)) throw InvalidArgument("step_rk4: dt must be positive");
  const std::size_t n = model.dim;
  if (state.x.size() != n || state.dir.components.size() != n)
    throw InvalidArgument("step_rk4: state dimension does not match model");

  const Vector y = pack(state, dynamics);
  auto f = [&](std::span<const double> s) { return packed_rhs(dynamics, model, s, relaxation); };

  const Vector k1 = f(y);
  Vector tmp(y);
  axpy(0.5 * dt, k1, tmp);
  const Vector k2 = f(tmp);
  tmp = y;
  axpy(0.5 * dt, k2, tmp);
  const Vector k3 = f(tmp);
  tmp = y;
  axpy(dt, k3, tmp);
  const Vector k4 = f(tmp);

  Vector out(y);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  if (!all_finite(out)) throw NumericalBlowup("non-finite state in " + std::string(to_string(dynamics)), step_index);

  GadState next;
  next.x.assign(out.begin(), out.begin() + n);
  next.dir.kind = state.dir.kind;
  next.dir.components.assign(out.begin() + n, out.begin() + 2 * n);
  next.dir.normalize();
  if (block_count(dynamics) == 3) {
    Vector w(out.begin() + 2 * n, out.end());
    const double wv = dot(w, next.dir.components);
    if (std::abs(wv) < 1e-12) throw DegenerateProjector("original GAD: <w, v> vanished during integration");
    for (double& wi : w) wi /= wv;
    next.dir2 = std::move(w);
  }
  return next;
}

double rayleigh_quotient(const VectorFieldModel& model, std::span<const double> x, std::span<const double> dir) {
  return dot(dir, jvp(model, x, dir)) / dot(dir, dir);
}

GadState initial_state(Dynamics dynamics, std::span<const double> x0, std::span<const double> dir0) {
  GadState s;
  s.x.assign(x0.begin(), x0.end());
  s.dir = Direction::unit(dir0, direction_kind(dynamics));
  if (dynamics == Dynamics::Original) s.dir2 = s.dir.components;
  return s;
}

SaddleResult find_saddle(const VectorFieldModel& model, std::span<const double> x0, std::span<const double> dir0,
                         const GadOptions& opts, Dynamics dynamics) {
  opts.validate();
  if (x0.size() != model.dim || dir0.size() != model.dim)
    throw InvalidArgument("find_saddle: start point or direction has wrong dimension");
  if (norm2(dir0) == 0.0) throw InvalidArgument("find_saddle: initial direction is zero");
  if (dynamics != Dynamics::SimplifiedV && !supports_vjp(model))
    throw UnsupportedOperation(std::string(to_string(dynamics)) + " needs J^T products the model cannot provide");

  GadState state = initial_state(dynamics, x0, dir0);
  if (norm_inf(eval_b(model, state.x)) < opts.residual_tol) {
    const double kick = opts.kick.value_or(1e-2 * (1.0 + norm_inf(x0)));
    axpy(kick, state.dir.components, state.x);
  }

  SaddleResult result;
  auto record = [&](std::size_t step, double residual) {
    result.trajectory.push_back(
        {step, step * opts.dt, state.x, state.dir.components, residual,
         rayleigh_quotient(model, state.x, state.dir.components)});
  };

  double residual = norm_inf(eval_b(model, state.x));
  if (opts.record_every > 0) record(0, residual);

  std::size_t step = 0;
  while (residual > opts.residual_tol && step < opts.max_steps) {
    try {
      state = step_rk4(dynamics, model, state, opts.dt, opts.relaxation, step);
    } catch (const NumericalBlowup&) {
      if (!opts.stop_on_blowup) throw;
      result.blowup_step = step;
      break;
    }
    ++step;
    residual = norm_inf(eval_b(model, state.x));
    if (opts.record_every > 0 && step % opts.record_every == 0) record(step, residual);
  }
  if (opts.record_every > 0 && step % opts.record_every != 0) record(step, residual);

  result.x_star = state.x;
  result.dir_star = state.dir;
  result.residual = residual;
  result.steps = step;
  result.converged = residual <= opts.residual_tol;
  result.eigen_estimate = rayleigh_quotient(model, state.x, state.dir.components);
  return result;
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRow>& rows, std::size_t dim) {
  os << "step,t";
  for (std::size_t i = 1; i <= dim; ++i) os << ",x_" << i;
  for (std::size_t i = 1; i <= dim; ++i) os << ",dir_" << i;
  os << ",residual_inf,rayleigh\n";
  os << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.step << ',' << r.t;
    for (double v : r.x) os << ',' << v;
    for (double v : r.dir) os << ',' << v;
    os << ',' << r.residual_inf << ',' << r.rayleigh << '\n';
  }
}

}  // namespace sgad
