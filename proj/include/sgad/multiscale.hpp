#pragma once

// Simplified GAD for slow-fast stochastic systems
//
//   X' = f(X, Y),   Y' = b(X, Y) / eps + sigma(X, Y) / sqrt(eps) * eta(t)
//
// The averaged drift F(x) = <f(x, .)>_{mu_x} and the effective Jacobian action
// (D_x f + C) v, C = (f - F) (x) (g - G), are estimated on the fly by a
// heterogeneous-multiscale (HMM) micro-solver: Euler-Maruyama chains of the fast
// process at frozen x.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "sgad/gad.hpp"
#include "sgad/linalg.hpp"

namespace sgad {

struct SlowFastModel {
  using Map = std::function<void(std::span<const double> x, std::span<const double> y, std::span<double> out)>;
  using Action = std::function<void(std::span<const double> x, std::span<const double> y,
                                    std::span<const double> v, std::span<double> out)>;

  std::string name;
  std::size_t dim_slow = 0;
  std::size_t dim_fast = 0;
  double epsilon = 1e-3;

  Map f;       ///< slow drift, length dim_slow
  Map b_fast;  ///< fast drift (the 1/eps coefficient), length dim_fast
  Map sigma;   ///< diagonal fast diffusion, length dim_fast
  Action dxf_action;            ///< D_x f(x, y) v
  Action dxf_transpose_action;  ///< D_x f(x, y)^T w (w-form only)
  Map score_g;                  ///< g = -grad_x U, U = -log rho(x, y); length dim_slow
  /// Fast relaxation time at frozen x in units of eps (used to flag unresolved micro steps).
  std::function<double(std::span<const double> x)> fast_relaxation;

  void validate() const;
};

/// x_i' = -sum_j D_ij x_j + y_i^2,  y_i' = -y_i / (eps Gamma_i(x)) + sigma / sqrt(eps) eta,
/// D = [[0.8,-0.2],[-0.2,0.5]], sigma^2 = 10, Gamma_i = 1/(1+(x_i-5)^2).
SlowFastModel model_example2_slowfast(double epsilon = 1e-3);

/// dt_micro / epsilon used by HmmParams::defaults_for.
inline constexpr double kDefaultMicroStepRatio = 0.003;

struct HmmParams {
  double dt_micro = 0.0;
  std::size_t n_burnin = 200;
  std::size_t n_average = 22500;
  std::size_t n_replicas = 4;
  std::uint64_t seed = 20170101;
  /// Batches per replica for the batch-means standard error.
  std::size_t n_batches = 8;

  void validate() const;
  static HmmParams defaults_for(const SlowFastModel& model);
};

using Rng = std::mt19937_64;
/// Ziggurat sampler.
using Normal = boost::random::normal_distribution<double>;

/// Per-replica fast states and RNG streams. States persist across estimates
/// (warm start); replica r draws from its own stream seeded by (seed, r).
class MicroEnsemble {
 public:
  MicroEnsemble(const SlowFastModel& model, const HmmParams& params);

  std::size_t replicas() const noexcept { return y_.size(); }
  std::span<double> state(std::size_t r) { return y_.at(r); }
  std::span<const double> state(std::size_t r) const { return y_.at(r); }
  Rng& engine(std::size_t r) { return engines_.at(r); }
  Normal& normal(std::size_t r) { return normals_.at(r); }

 private:
  std::vector<Vector> y_;
  std::vector<Rng> engines_;
  std::vector<Normal> normals_;
};

/// One Euler-Maruyama step of the fast process at frozen x.
Vector micro_step_em(const SlowFastModel& model, std::span<const double> x, std::span<const double> y,
                     double dt_micro, Rng& rng);

/// Ensemble averages over n_replicas x n_average post-burn-in micro samples.
struct HmmStatistics {
  Vector F;         ///< <f>
  Vector F_stderr;  ///< batch-means standard error of F
  Vector G;         ///< <g>
  Matrix cov_fg;    ///< <(f - F)(g - G)^T>
  Vector dxf_v;     ///< <D_x f v>   (empty when no v was given)
  Vector dxf_t_w;   ///< <D_x f^T w> (empty when no w was given)
  std::size_t samples = 0;
  /// dt_micro exceeded 0.2 eps times the fast relaxation time somewhere.
  bool under_resolved = false;

  /// (<D_x f> + C) v, using the sampled <D_x f v>.
  Vector effective_jacobian_action(std::span<const double> v) const;
  /// (<D_x f> + C)^T w, using the sampled <D_x f^T w>.
  Vector effective_jacobian_transpose_action(std::span<const double> w) const;
};

HmmStatistics hmm_sample(const SlowFastModel& model, std::span<const double> x, const HmmParams& params,
                         MicroEnsemble& ensemble, std::span<const double> v = {}, std::span<const double> w = {});

struct HmmEstimate {
  Vector F;
  Vector standard_error;
};

HmmEstimate hmm_estimate_F(const SlowFastModel& model, std::span<const double> x, const HmmParams& params,
                           MicroEnsemble& ensemble);

/// Throws UnsupportedOperation when the model has no score g.
Vector hmm_estimate_effjac_action(const SlowFastModel& model, std::span<const double> x,
                                  std::span<const double> v, const HmmParams& params, MicroEnsemble& ensemble);

enum class MsGadVariant { VForm, WForm };

struct MsGadOptions {
  double dt = 5e-3;
  std::size_t max_steps = 40000;
  /// Threshold on |window mean of F^|_inf; convergence also needs a positive
  /// window-mean Rayleigh quotient.
  double residual_tol = 1e-2;
  /// Trailing window length in macro steps.
  std::size_t window = 2000;
  double relaxation = 1.0;
  /// Signed displacement of x0 along v0 before the first step. Defaults to 5e-2 (1 + |x0|_inf).
  std::optional<double> kick;
  std::size_t record_every = 0;

  void validate() const;
};

struct MsGadRow {
  TrajectoryRow row;
  Vector F_stderr;
};

struct MsGadResult {
  /// x_star is the trailing-window mean of x; residual the norm of the window mean of F^.
  SaddleResult saddle;
  std::vector<MsGadRow> trajectory;
  std::uint64_t seed = 0;
  bool under_resolved = false;
};

/// Macro rates from one set of statistics: dx = F^ - 2 <F^, d> d and
/// ddir = relaxation (A d - <d, A d> d), A the effective (transposed) Jacobian action.
/// `dir` must be the direction the statistics were sampled with.
Rates msgad_rates(const HmmStatistics& stats, std::span<const double> dir, MsGadVariant variant,
                  double relaxation = 1.0);

MsGadResult msgad_find_saddle(const SlowFastModel& model, std::span<const double> x0, std::span<const double> v0,
                              const MsGadOptions& opts, const HmmParams& params,
                              MsGadVariant variant = MsGadVariant::VForm);

/// Columns of the GAD trajectory plus "F_stderr_1..F_stderr_d".
void write_msgad_trajectory_csv(std::ostream& os, const std::vector<MsGadRow>& rows, std::size_t dim);

}  // namespace sgad
