#include "sgad/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <ostream>

#include "sgad/errors.hpp"
#include "sgad/vectorfield.hpp"

namespace sgad {

namespace {

constexpr double kUnderResolvedRatio = 0.2;

double gamma_of(double xi) { return 1.0 / (1.0 + (xi - 5.0) * (xi - 5.0)); }

// Per-replica running sums; combined in replica order.
struct Accumulator {
  Vector f, g, fg, dxf_v, dxf_t_w;
  std::vector<Vector> batch_f;

  Accumulator(std::size_t d, std::size_t batches, bool with_g, bool with_v, bool with_w)
      : f(d, 0.0), g(with_g ? d : 0, 0.0), fg(with_g ? d * d : 0, 0.0), dxf_v(with_v ? d : 0, 0.0),
        dxf_t_w(with_w ? d : 0, 0.0), batch_f(batches, Vector(d, 0.0)) {}
};

void em_step_inplace(const SlowFastModel& model, std::span<const double> x, std::span<double> y, double dt_micro,
                     Rng& rng, Normal& normal, Vector& drift, Vector& diffusion) {
  model.b_fast(x, y, drift);
  model.sigma(x, y, diffusion);
  const double a = dt_micro / model.epsilon;
  const double s = std::sqrt(a);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * drift[i] + diffusion[i] * s * normal(rng);
}

}  // namespace

void SlowFastModel::validate() const {
  if (!(epsilon > 0.0)) throw InvalidArgument("SlowFastModel: epsilon must be positive");
  if (dim_slow == 0 || dim_fast == 0) throw InvalidArgument("SlowFastModel: dimensions must be positive");
  if (!f || !b_fast || !sigma || !dxf_action)
    throw InvalidArgument("SlowFastModel '" + name + "': f, b_fast, sigma and dxf_action are required");
}

SlowFastModel model_example2_slowfast(double epsilon) {
  static const Matrix d(2, 2, Vector{0.8, -0.2, -0.2, 0.5});
  const double sigma = std::sqrt(zoo::kSigmaSquared);

  SlowFastModel m;
  m.name = "example2";
  m.dim_slow = 2;
  m.dim_fast = 2;
  m.epsilon = epsilon;
  m.f = [](std::span<const double> x, std::span<const double> y, std::span<double> out) {
    out[0] = -(d(0, 0) * x[0] + d(0, 1) * x[1]) + y[0] * y[0];
    out[1] = -(d(1, 0) * x[0] + d(1, 1) * x[1]) + y[1] * y[1];
  };
  m.b_fast = [](std::span<const double> x, std::span<const double> y, std::span<double> out) {
    out[0] = -y[0] / gamma_of(x[0]);
    out[1] = -y[1] / gamma_of(x[1]);
  };
  m.sigma = [sigma](std::span<const double>, std::span<const double>, std::span<double> out) {
    out[0] = sigma;
    out[1] = sigma;
  };
  m.dxf_action = [](std::span<const double>, std::span<const double>, std::span<const double> v,
                    std::span<double> out) {
    out[0] = -(d(0, 0) * v[0] + d(0, 1) * v[1]);
    out[1] = -(d(1, 0) * v[0] + d(1, 1) * v[1]);
  };
  m.dxf_transpose_action = [](std::span<const double>, std::span<const double>, std::span<const double> w,
                              std::span<double> out) {
    out[0] = -(d(0, 0) * w[0] + d(1, 0) * w[1]);
    out[1] = -(d(0, 1) * w[0] + d(1, 1) * w[1]);
  };
  // U = sum_i y_i^2 / (sigma^2 Gamma_i) + log(pi sigma^2 Gamma_i) / 2
  m.score_g = [](std::span<const double> x, std::span<const double> y, std::span<double> out) {
    for (std::size_t i = 0; i < 2; ++i) {
      const double u = x[i] - 5.0;
      out[i] = -2.0 * u * y[i] * y[i] / zoo::kSigmaSquared + u * gamma_of(x[i]);
    }
  };
  m.fast_relaxation = [](std::span<const double> x) { return std::min(gamma_of(x[0]), gamma_of(x[1])); };
  return m;
}

void HmmParams::validate() const {
  if (!(dt_micro > 0.0) || !std::isfinite(dt_micro)) throw InvalidArgument("dt_micro must be positive");
  if (n_average == 0) throw InvalidArgument("n_average must be positive");
  if (n_replicas == 0) throw InvalidArgument("n_replicas must be positive");
  if (n_batches == 0 || n_batches > n_average) throw InvalidArgument("n_batches must be in [1, n_average]");
}

HmmParams HmmParams::defaults_for(const SlowFastModel& model) {
  HmmParams p;
  p.dt_micro = kDefaultMicroStepRatio * model.epsilon;
  return p;
}

MicroEnsemble::MicroEnsemble(const SlowFastModel& model, const HmmParams& params)
    : y_(params.n_replicas, Vector(model.dim_fast, 0.0)), normals_(params.n_replicas) {
  engines_.reserve(params.n_replicas);
  for (std::size_t r = 0; r < params.n_replicas; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(params.seed), static_cast<std::uint32_t>(params.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    engines_.emplace_back(seq);
  }
}

Vector micro_step_em(const SlowFastModel& model, std::span<const double> x, std::span<const double> y,
                     double dt_micro, Rng& rng) {
  if (!(dt_micro > 0.0)) throw InvalidArgument("micro_step_em: dt_micro must be positive");
  if (x.size() != model.dim_slow || y.size() != model.dim_fast)
    throw InvalidArgument("micro_step_em: dimension mismatch");
  Vector out(y.begin(), y.end()), drift(y.size()), diffusion(y.size());
  Normal normal;
  em_step_inplace(model, x, out, dt_micro, rng, normal, drift, diffusion);
  if (!all_finite(out)) throw NumericalBlowup("micro_step_em: fast state is not finite", 1);
  return out;
}

Vector HmmStatistics::effective_jacobian_action(std::span<const double> v) const {
  if (dxf_v.empty()) throw InvalidArgument("effective_jacobian_action: statistics sampled without v");
  Vector out = dxf_v;
  const Vector cv = cov_fg.apply(v);
  axpy(1.0, cv, out);
  return out;
}

Vector HmmStatistics::effective_jacobian_transpose_action(std::span<const double> w) const {
  if (dxf_t_w.empty()) throw InvalidArgument("effective_jacobian_transpose_action: statistics sampled without w");
  Vector out = dxf_t_w;
  const Vector cw = cov_fg.apply_transpose(w);
  axpy(1.0, cw, out);
  return out;
}

HmmStatistics hmm_sample(const SlowFastModel& model, std::span<const double> x, const HmmParams& params,
                         MicroEnsemble& ensemble, std::span<const double> v, std::span<const double> w) {
  params.validate();
  if (x.size() != model.dim_slow) throw InvalidArgument("hmm_sample: dimension mismatch");
  if (ensemble.replicas() != params.n_replicas) throw InvalidArgument("hmm_sample: ensemble size mismatch");
  const bool with_v = !v.empty();
  const bool with_w = !w.empty();
  if ((with_v && v.size() != model.dim_slow) || (with_w && w.size() != model.dim_slow))
    throw InvalidArgument("hmm_sample: direction dimension mismatch");
  if (with_w && !model.dxf_transpose_action)
    throw UnsupportedOperation("hmm_sample: model '" + model.name + "' has no transpose action");
  const bool with_g = static_cast<bool>(model.score_g);

  const std::size_t d = model.dim_slow;
  const std::size_t m = model.dim_fast;
  const std::size_t batch_len = params.n_average / params.n_batches;

  std::vector<Accumulator> acc;
  acc.reserve(params.n_replicas);
  for (std::size_t r = 0; r < params.n_replicas; ++r) {
    Accumulator a(d, params.n_batches, with_g, with_v, with_w);
    std::span<double> y = ensemble.state(r);
    Rng& rng = ensemble.engine(r);
    auto& normal = ensemble.normal(r);
    Vector drift(m), diffusion(m), fv(d), gv(d), tmp(d);

    for (std::size_t k = 0; k < params.n_burnin; ++k)
      em_step_inplace(model, x, y, params.dt_micro, rng, normal, drift, diffusion);
    for (std::size_t b = 0; b < params.n_batches; ++b) {
      const std::size_t len = b + 1 < params.n_batches ? batch_len : params.n_average - batch_len * b;
      Vector& fb = a.batch_f[b];
      for (std::size_t k = 0; k < len; ++k) {
        em_step_inplace(model, x, y, params.dt_micro, rng, normal, drift, diffusion);
        model.f(x, y, fv);
        for (std::size_t i = 0; i < d; ++i) fb[i] += fv[i];
        if (with_g) {
          model.score_g(x, y, gv);
          for (std::size_t i = 0; i < d; ++i) {
            a.g[i] += gv[i];
            for (std::size_t j = 0; j < d; ++j) a.fg[i * d + j] += fv[i] * gv[j];
          }
        }
        if (with_v) {
          model.dxf_action(x, y, v, tmp);
          for (std::size_t i = 0; i < d; ++i) a.dxf_v[i] += tmp[i];
        }
        if (with_w) {
          model.dxf_transpose_action(x, y, w, tmp);
          for (std::size_t i = 0; i < d; ++i) a.dxf_t_w[i] += tmp[i];
        }
      }
      axpy(1.0, fb, a.f);
    }
    if (!all_finite(y) || !all_finite(a.f))
      throw NumericalBlowup("hmm_sample: micro chain " + std::to_string(r) + " is not finite", params.n_burnin + params.n_average);
    acc.push_back(std::move(a));
  }

  const double total = static_cast<double>(params.n_replicas * params.n_average);
  HmmStatistics s;
  s.samples = params.n_replicas * params.n_average;
  s.F.assign(d, 0.0);
  s.G.assign(with_g ? d : 0, 0.0);
  Vector fg(d * d, 0.0);
  if (with_v) s.dxf_v.assign(d, 0.0);
  if (with_w) s.dxf_t_w.assign(d, 0.0);
  for (const auto& a : acc) {
    axpy(1.0, a.f, s.F);
    if (with_g) {
      axpy(1.0, a.g, s.G);
      axpy(1.0, a.fg, fg);
    }
    if (with_v) axpy(1.0, a.dxf_v, s.dxf_v);
    if (with_w) axpy(1.0, a.dxf_t_w, s.dxf_t_w);
  }
  for (double& e : s.F) e /= total;
  for (double& e : s.G) e /= total;
  for (double& e : s.dxf_v) e /= total;
  for (double& e : s.dxf_t_w) e /= total;

  s.cov_fg = Matrix(d, d);
  if (with_g)
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) s.cov_fg(i, j) = fg[i * d + j] / total - s.F[i] * s.G[j];

  // Batch means; the last batch of each replica absorbs the remainder.
  s.F_stderr.assign(d, 0.0);
  const std::size_t nb = params.n_replicas * params.n_batches;
  if (nb > 1) {
    for (std::size_t i = 0; i < d; ++i) {
      double ss = 0.0;
      for (const auto& a : acc)
        for (std::size_t b = 0; b < params.n_batches; ++b) {
          const std::size_t len = b + 1 < params.n_batches ? batch_len : params.n_average - batch_len * b;
          const double dev = a.batch_f[b][i] / static_cast<double>(len) - s.F[i];
          ss += dev * dev;
        }
      s.F_stderr[i] = std::sqrt(ss / static_cast<double>(nb - 1) / static_cast<double>(nb));
    }
  }

  if (model.fast_relaxation)
    s.under_resolved = params.dt_micro > kUnderResolvedRatio * model.epsilon * model.fast_relaxation(x);
  return s;
}

HmmEstimate hmm_estimate_F(const SlowFastModel& model, std::span<const double> x, const HmmParams& params,
                           MicroEnsemble& ensemble) {
  HmmStatistics s = hmm_sample(model, x, params, ensemble);
  return {std::move(s.F), std::move(s.F_stderr)};
}

Vector hmm_estimate_effjac_action(const SlowFastModel& model, std::span<const double> x,
                                  std::span<const double> v, const HmmParams& params, MicroEnsemble& ensemble) {
  if (!model.score_g)
    throw UnsupportedOperation("hmm_estimate_effjac_action: model '" + model.name + "' has no score g");
  return hmm_sample(model, x, params, ensemble, v).effective_jacobian_action(v);
}

void MsGadOptions::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (max_steps == 0) throw InvalidArgument("max_steps must be positive");
  if (!(residual_tol > 0.0)) throw InvalidArgument("residual_tol must be positive");
  if (window == 0) throw InvalidArgument("window must be positive");
  if (!(relaxation > 0.0)) throw InvalidArgument("relaxation must be positive");
  if (kick && !std::isfinite(*kick)) throw InvalidArgument("kick must be finite");
}

Rates msgad_rates(const HmmStatistics& stats, std::span<const double> dir, MsGadVariant variant,
                  double relaxation) {
  Rates r;
  r.dx = stats.F;
  const double proj = dot(stats.F, dir) / dot(dir, dir);
  axpy(-2.0 * proj, dir, r.dx);

  const Vector a = variant == MsGadVariant::VForm ? stats.effective_jacobian_action(dir)
                                                  : stats.effective_jacobian_transpose_action(dir);
  const double alpha = dot(dir, a);
  r.ddir = a;
  axpy(-alpha, dir, r.ddir);
  for (double& e : r.ddir) e *= relaxation;
  return r;
}

MsGadResult msgad_find_saddle(const SlowFastModel& model, std::span<const double> x0, std::span<const double> v0,
                              const MsGadOptions& opts, const HmmParams& params, MsGadVariant variant) {
  model.validate();
  opts.validate();
  params.validate();
  const std::size_t d = model.dim_slow;
  if (x0.size() != d || v0.size() != d) throw InvalidArgument("msgad_find_saddle: dimension mismatch");
  if (!model.score_g) throw UnsupportedOperation("msgad_find_saddle: model '" + model.name + "' has no score g");
  if (variant == MsGadVariant::WForm && !model.dxf_transpose_action)
    throw UnsupportedOperation("msgad_find_saddle: w-form needs the transpose action");

  const DirectionKind kind = variant == MsGadVariant::VForm ? DirectionKind::Right : DirectionKind::Left;
  Direction dir = Direction::unit(v0, kind);
  Vector x(x0.begin(), x0.end());
  axpy(opts.kick.value_or(5e-2 * (1.0 + norm_inf(x0))), dir.components, x);

  MicroEnsemble ensemble(model, params);
  MsGadResult result;
  result.seed = params.seed;

  std::deque<Vector> window_f, window_x;
  std::deque<double> window_rq;
  double window_residual = 0.0;

  auto window_mean = [&](const std::deque<Vector>& q) {
    Vector mean(d, 0.0);
    for (const auto& e : q) axpy(1.0, e, mean);
    for (double& e : mean) e /= static_cast<double>(q.size());
    return mean;
  };

  std::size_t step = 0;
  bool converged = false;
  for (;; ++step) {
    const std::span<const double> dspan(dir.components);
    const HmmStatistics stats = variant == MsGadVariant::VForm ? hmm_sample(model, x, params, ensemble, dspan)
                                                               : hmm_sample(model, x, params, ensemble, {}, dspan);
    result.under_resolved = result.under_resolved || stats.under_resolved;
    const Rates rates = msgad_rates(stats, dspan, variant, opts.relaxation);
    const Vector a = variant == MsGadVariant::VForm ? stats.effective_jacobian_action(dspan)
                                                    : stats.effective_jacobian_transpose_action(dspan);
    const double rayleigh = dot(dir.components, a);

    window_f.push_back(stats.F);
    window_x.push_back(x);
    window_rq.push_back(rayleigh);
    if (window_f.size() > opts.window) {
      window_f.pop_front();
      window_x.pop_front();
      window_rq.pop_front();
    }
    window_residual = norm_inf(window_mean(window_f));
    double rq_mean = 0.0;
    for (double e : window_rq) rq_mean += e;
    rq_mean /= static_cast<double>(window_rq.size());
    // A positive mean Rayleigh quotient rules out the stable start, where F^ is small too.
    converged = window_f.size() == opts.window && window_residual <= opts.residual_tol && rq_mean > 0.0;

    const bool last = converged || step == opts.max_steps;
    if (opts.record_every > 0 && (step % opts.record_every == 0 || last)) {
      MsGadRow row;
      row.row = {step, static_cast<double>(step) * opts.dt, x, dir.components, window_residual, rayleigh};
      row.F_stderr = stats.F_stderr;
      result.trajectory.push_back(std::move(row));
    }
    if (last) break;

    axpy(opts.dt, rates.dx, x);
    axpy(opts.dt, rates.ddir, dir.components);
    if (!all_finite(x) || !all_finite(dir.components))
      throw NumericalBlowup("msgad_find_saddle: macro state is not finite", step + 1);
    dir.normalize();
  }

  SaddleResult& s = result.saddle;
  s.x_star = window_mean(window_x);
  s.dir_star = dir;
  s.residual = window_residual;
  s.steps = step;
  s.converged = converged;
  double rq_sum = 0.0;
  for (double e : window_rq) rq_sum += e;
  s.eigen_estimate = rq_sum / static_cast<double>(window_rq.size());
  return result;
}

void write_msgad_trajectory_csv(std::ostream& os, const std::vector<MsGadRow>& rows, std::size_t dim) {
  os << "step,t";
  for (std::size_t k = 1; k <= dim; ++k) os << ",x_" << k;
  for (std::size_t k = 1; k <= dim; ++k) os << ",dir_" << k;
  os << ",residual_inf,rayleigh";
  for (std::size_t k = 1; k <= dim; ++k) os << ",F_stderr_" << k;
  os << "\n" << std::setprecision(17);
  for (const auto& r : rows) {
    os << r.row.step << ',' << r.row.t;
    for (double e : r.row.x) os << ',' << e;
    for (double e : r.row.dir) os << ',' << e;
    os << ',' << r.row.residual_inf << ',' << r.row.rayleigh;
    for (double e : r.F_stderr) os << ',' << e;
    os << "\n";
  }
}

}  // namespace sgad
