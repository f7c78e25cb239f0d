#include "sgad/vectorfield.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "sgad/errors.hpp"

namespace sgad {

namespace {

void check_dim(const VectorFieldModel& model, std::span<const double> x, const char* what) {
  if (x.size() != model.dim)
    throw InvalidArgument(std::string(what) + ": expected length " + std::to_string(model.dim) + " for model '" +
                          model.name + "', got " + std::to_string(x.size()));
}

// Drift of the form -D x + (sigma^2/2) Gamma(x) shared by both examples.
VectorFieldModel averaged_drift_model(std::string name, Matrix d) {
  constexpr double half_sigma2 = zoo::kSigmaSquared / 2.0;
  auto gamma = [](double xi) { return 1.0 / (1.0 + (xi - 5.0) * (xi - 5.0)); };
  auto dgamma = [](double xi) {
    const double q = 1.0 + (xi - 5.0) * (xi - 5.0);
    return -2.0 * (xi - 5.0) / (q * q);
  };

  VectorFieldModel m;
  m.name = std::move(name);
  m.dim = 2;
  m.eval = [d, gamma](std::span<const double> x) {
    Vector b = d.apply(x);
    for (std::size_t i = 0; i < 2; ++i) b[i] = -b[i] + half_sigma2 * gamma(x[i]);
    return b;
  };
  m.analytic_jvp = [d, dgamma](std::span<const double> x, std::span<const double> v) {
    Vector r = d.apply(v);
    for (std::size_t i = 0; i < 2; ++i) r[i] = -r[i] + half_sigma2 * dgamma(x[i]) * v[i];
    return r;
  };
  m.analytic_vjp = [d, dgamma](std::span<const double> x, std::span<const double> w) {
    Vector r = d.apply_transpose(w);
    for (std::size_t i = 0; i < 2; ++i) r[i] = -r[i] + half_sigma2 * dgamma(x[i]) * w[i];
    return r;
  };
  return m;
}

}  // namespace

bool supports_vjp(const VectorFieldModel& model) noexcept {
  return model.has_analytic_vjp() || model.dim <= kDenseThreshold;
}

Vector eval_b(const VectorFieldModel& model, std::span<const double> x) {
  check_dim(model, x, "eval_b");
  Vector b = model.eval(x);
  if (b.size() != model.dim) throw InvalidArgument("eval_b: model '" + model.name + "' returned wrong length");
  return b;
}

double default_fd_step(std::span<const double> x) {
  return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + norm_inf(x));
}

Vector jvp_fd(const VectorFieldModel& model, std::span<const double> x, std::span<const double> v,
              std::optional<double> h) {
  check_dim(model, x, "jvp");
  check_dim(model, v, "jvp direction");
  const double nv = norm2(v);
  if (nv == 0.0) throw InvalidArgument("jvp: zero direction");
  const double step = h.value_or(default_fd_step(x));
  if (!(step > 0.0)) throw InvalidArgument("jvp: finite-difference step must be positive");

  Vector xp(x.begin(), x.end());
  Vector xm(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] += step * v[i] / nv;
    xm[i] -= step * v[i] / nv;
  }
  const Vector bp = eval_b(model, xp);
  const Vector bm = eval_b(model, xm);
  Vector r(model.dim);
  for (std::size_t i = 0; i < model.dim; ++i) r[i] = (bp[i] - bm[i]) / (2.0 * step) * nv;
  return r;
}

Vector jvp(const VectorFieldModel& model, std::span<const double> x, std::span<const double> v,
           std::optional<double> h) {
  if (!model.has_analytic_jvp()) return jvp_fd(model, x, v, h);
  check_dim(model, x, "jvp");
  check_dim(model, v, "jvp direction");
  if (norm2(v) == 0.0) throw InvalidArgument("jvp: zero direction");
  return model.analytic_jvp(x, v);
}

Vector vjp(const VectorFieldModel& model, std::span<const double> x, std::span<const double> w) {
  check_dim(model, x, "vjp");
  check_dim(model, w, "vjp direction");
  if (model.has_analytic_vjp()) return model.analytic_vjp(x, w);
  if (model.dim > kDenseThreshold)
    throw UnsupportedOperation("vjp: model '" + model.name + "' has no analytic adjoint and dim " +
                               std::to_string(model.dim) + " exceeds the dense threshold");
  return dense_jacobian(model, x).apply_transpose(w);
}

Matrix dense_jacobian(const VectorFieldModel& model, std::span<const double> x, std::optional<double> h) {
  check_dim(model, x, "dense_jacobian");
  if (model.dim > kDenseThreshold)
    throw UnsupportedOperation("dense_jacobian: dim " + std::to_string(model.dim) + " exceeds the dense threshold");
  Matrix j(model.dim, model.dim);
  Vector e(model.dim, 0.0);
  for (std::size_t c = 0; c < model.dim; ++c) {
    e[c] = 1.0;
    j.set_column(c, jvp(model, x, e, h));
    e[c] = 0.0;
  }
  return j;
}

VectorFieldModel model_example1() {
  return averaged_drift_model("example1", Matrix(2, 2, {0.8, -0.3, -0.2, 0.5}));
}

VectorFieldModel model_example2_effective() {
  return averaged_drift_model("example2-effective", Matrix(2, 2, {0.8, -0.2, -0.2, 0.5}));
}

VectorFieldModel model_from_gradient(std::string name, std::size_t dim,
                                     std::function<double(std::span<const double>)> potential,
                                     VectorFieldModel::Field gradient) {
  if (dim == 0) throw InvalidArgument("model_from_gradient: dim must be positive");
  VectorFieldModel m;
  m.name = std::move(name);
  m.dim = dim;
  m.potential = std::move(potential);
  m.eval = [grad = std::move(gradient)](std::span<const double> x) {
    Vector g = grad(x);
    for (double& gi : g) gi = -gi;
    return g;
  };
  // Symmetric Jacobian: the adjoint action is the directional derivative itself.
  m.analytic_vjp = [m](std::span<const double> x, std::span<const double> w) {
    if (norm2(w) == 0.0) return Vector(w.size(), 0.0);
    return jvp_fd(m, x, w);
  };
  return m;
}

VectorFieldModel model_linear(Matrix a, Vector center) {
  if (a.rows() != a.cols() || a.rows() == 0) throw InvalidArgument("model_linear: matrix must be square");
  const std::size_t n = a.rows();
  if (center.empty()) center.assign(n, 0.0);
  if (center.size() != n) throw InvalidArgument("model_linear: center has wrong length");

  VectorFieldModel m;
  m.name = "linear";
  m.dim = n;
  m.eval = [a, center](std::span<const double> x) { return a.apply(sub(x, center)); };
  m.analytic_jvp = [a](std::span<const double>, std::span<const double> v) { return a.apply(v); };
  m.analytic_vjp = [a](std::span<const double>, std::span<const double> w) { return a.apply_transpose(w); };
  return m;
}

VectorFieldModel model_by_name(const std::string& name) {
  if (name == "example1") return model_example1();
  if (name == "example2-effective" || name == "example2") return model_example2_effective();
  throw InvalidArgument("unknown model '" + name + "' (expected example1 or example2-effective)");
}

namespace zoo {

ReferencePoints example1_points() {
  return {{0.5931, 0.7655}, {5.8770, 6.2507}, {}, {1.7954, 3.3088}, {}};
}

ReferencePoints example2_points() {
  return {{0.4643, 0.6985}, {2.2038, 5.9804}, {5.7109, 6.2369}, {1.2842, 3.4484}, {3.5689, 6.0735}};
}

}  // namespace zoo

}  // namespace sgad
