// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "sgad/acshear.hpp"
#include "sgad/gad.hpp"
#include "sgad/multiscale.hpp"
#include "sgad/stability.hpp"
#include "test_support.hpp"

using namespace sgad;

namespace {

// Tolerances and budgets.
constexpr double kSaddleCoordTol = 1e-3;
constexpr double kBResidualTol = 1e-8;
constexpr double kGadSeconds = 5.0;
constexpr double kCrossDynamicsTol = 1e-6;
constexpr double kHamiltonianTol = 1e-10;
constexpr double kMsGadCoordTol = 5e-2;
constexpr double kEffectiveCoordTol = 1e-3;
constexpr double kMsGadSeconds = 120.0;
constexpr double kLamellarResidualTol = 1e-6;
constexpr double kCollapsedVariation = 1e-4;
constexpr double kPatternedVariation = 1e-2;
constexpr double kSweepSeconds = 600.0;
constexpr double kPropertySeconds = 300.0;
constexpr std::size_t kSweepGridSize = 64;
constexpr std::size_t kMetastableGridSize = 128;

// Quoted coordinates.
const Vector kExample1Saddle{1.7954, 3.3088};
const Vector kExample2S1{1.2842, 3.4484};
const Vector kExample2S2{3.5689, 6.0735};
const std::vector<double> kSweepGammas{0.005, 0.02, 0.035, 0.05, 0.065, 0.08};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int g_failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  %s  (%s)\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

// Runs a criterion, turning an escaped exception into a failure line.
void criterion(const std::string& name, const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(detail.empty() ? "" : "; ") + "exception: " + e.what();
  }
  report(name, pass, detail);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(std::span<const double> x, std::span<const double> target, double tol) {
  return norm_inf(sub(x, target)) <= tol;
}

Vector ex1(const Vector& quoted) { return refine_fixed_point(model_example1(), quoted); }
Vector ex2(const Vector& quoted) { return refine_fixed_point(model_example2_effective(), quoted); }

struct MsGadStart {
  const char* label;
  Vector x0;
  Vector v0;
  double kick_sign;
  Vector target;
};

std::vector<MsGadStart> msgad_starts() {
  const auto p = zoo::example2_points();
  return {{"m1 (0,1)", ex2(p.m1), {0.0, 1.0}, 1.0, kExample2S1},
          {"m2 (1,0)", ex2(p.m2), {1.0, 0.0}, 1.0, kExample2S2},
          {"m2 (0,1)", ex2(p.m2), {0.0, 1.0}, -1.0, kExample2S1},
          {"m3 (1,0)", ex2(p.m3), {1.0, 0.0}, -1.0, kExample2S2}};
}

constexpr double kMsGadRelaxation = 0.2;

double msgad_kick(const MsGadStart& s) { return s.kick_sign * 5e-2 * (1.0 + norm_inf(s.x0)); }

void example1_saddle() {
  const auto m = model_example1();
  const auto pts = zoo::example1_points();
  const Vector m2 = ex1(pts.m2);
  struct Run {
    const char* label;
    Vector x0, v0;
    GadOptions opts;
  };
  GadOptions down;
  down.kick = -1e-2 * (1.0 + norm_inf(m2));
  for (const Run& run : {Run{"m1 (1,0)", ex1(pts.m1), {1.0, 0.0}, {}}, Run{"m2 (0,1)", m2, {0.0, 1.0}, down}}) {
    criterion(std::string("example1 saddle from ") + run.label, [&](std::string& d) {
      Stopwatch clock;
      const SaddleResult r = find_saddle(m, run.x0, run.v0, run.opts);
      const double t = clock.seconds();
      d = fmt("x* = (%.6f, %.6f), |b| = %.2e, steps = %zu, %.2f s", r.x_star[0], r.x_star[1], r.residual, r.steps, t);
      return r.converged && within(r.x_star, kExample1Saddle, kSaddleCoordTol) && r.residual <= kBResidualTol &&
             t < kGadSeconds;
    });
  }
}

void cross_dynamics() {
  criterion("original GAD and w-form agree with the v-form saddle", [](std::string& d) {
    const auto m = model_example1();
    const Vector m1 = ex1(zoo::example1_points().m1);
    const SaddleResult rv = find_saddle(m, m1, Vector{1.0, 0.0}, {}, Dynamics::SimplifiedV);
    const SaddleResult rw = find_saddle(m, m1, Vector{1.0, 0.0}, {}, Dynamics::SimplifiedW);
    const SaddleResult ro = find_saddle(m, m1, Vector{1.0, 0.0}, {}, Dynamics::Original);
    const double dw = norm_inf(sub(rw.x_star, rv.x_star)), d_o = norm_inf(sub(ro.x_star, rv.x_star));
    d = fmt("|w - v| = %.2e, |original - v| = %.2e", dw, d_o);
    return rv.converged && rw.converged && ro.converged && dw <= kCrossDynamicsTol && d_o <= kCrossDynamicsTol;
  });
}

void spectrum() {
  criterion("predicted GAD spectrum at the example1 saddle", [](std::string& d) {
    const auto m = model_example1();
    const Theorem1Report r = verify_theorem1_spectrum(m, ex1(zoo::example1_points().s1));
    d = fmt("%zu eigenpairs checked", r.pairs.size());
    return r.pass();
  });
  criterion("predicted GAD spectrum at both averaged-model saddles", [](std::string& d) {
    const auto m = model_example2_effective();
    const auto p = zoo::example2_points();
    const bool a = verify_theorem1_spectrum(m, ex2(p.s1)).pass();
    const bool b = verify_theorem1_spectrum(m, ex2(p.s2)).pass();
    d = fmt("s1 %s, s2 %s", a ? "pass" : "fail", b ? "pass" : "fail");
    return a && b;
  });
  criterion("predicted GAD spectrum on 20 random linear fields", [](std::string& d) {
    testing::rng(777);
    int passed = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t dim = trial % 2 == 0 ? 2 : 3;
      passed += verify_theorem1_spectrum(model_linear(testing::random_diagonalizable(dim)), Vector(dim, 0.0)).pass();
    }
    d = fmt("%d / 20 pass", passed);
    return passed == 20;
  });
}

void hamilton_contrast() {
  criterion("Hamilton flow misses the saddle on the simplified-GAD budget", [](std::string& d) {
    const auto m = model_example1();
    const Vector m1 = ex1(zoo::example1_points().m1);
    const SaddleResult rv = find_saddle(m, m1, Vector{1.0, 0.0});
    GadOptions o;
    o.max_steps = 2 * rv.steps;
    o.stop_on_blowup = true;
    o.record_every = 1;
    const SaddleResult rh = find_saddle(m, m1, Vector{1.0, 0.0}, o, Dynamics::Hamilton);
    double h_max = 0.0;
    for (const auto& row : rh.trajectory) {
      if (!all_finite(row.x) || !all_finite(row.dir)) break;
      h_max = std::max(h_max, std::abs(reconstruct_hamiltonian(m, row.x, row.dir)));
    }
    d = fmt("v-form %zu steps; Hamilton %s after %zu steps, |x| = %.2e, max |H| = %.1e", rv.steps,
            rh.converged ? "converged" : "not converged", rh.steps, norm_inf(rh.x_star), h_max);
    return rv.converged && !rh.converged && h_max <= kHamiltonianTol;
  });
}

void msgad() {
  const SlowFastModel sf = model_example2_slowfast();
  const auto eff = model_example2_effective();
  for (const MsGadStart& s : msgad_starts()) {
    criterion(std::string("MsGAD from ") + s.label, [&](std::string& d) {
      const HmmParams hp = HmmParams::defaults_for(sf);
      MsGadOptions mo;
      mo.relaxation = kMsGadRelaxation;
      mo.kick = msgad_kick(s);
      Stopwatch clock;
      const MsGadResult r = msgad_find_saddle(sf, s.x0, s.v0, mo, hp);
      const double t = clock.seconds();
      d = fmt("x* = (%.4f, %.4f), target (%.4f, %.4f), steps = %zu, seed = %llu, %.1f s", r.saddle.x_star[0],
              r.saddle.x_star[1], s.target[0], s.target[1], r.saddle.steps,
              static_cast<unsigned long long>(r.seed), t);
      return r.saddle.converged && within(r.saddle.x_star, s.target, kMsGadCoordTol) && t < kMsGadSeconds;
    });
    criterion(std::string("effective dynamics from ") + s.label, [&](std::string& d) {
      GadOptions go;
      go.relaxation = kMsGadRelaxation;
      go.kick = msgad_kick(s);
      const SaddleResult r = find_saddle(eff, s.x0, s.v0, go);
      d = fmt("x* = (%.6f, %.6f), steps = %zu", r.x_star[0], r.x_star[1], r.steps);
      return r.converged && within(r.x_star, s.target, kEffectiveCoordTol);
    });
  }
}

ShearConfig shear(ShearVariant variant, double gamma) {
  ShearConfig c;
  c.variant = variant;
  c.shear_rate = gamma;
  return c;
}

void metastable() {
  criterion("uniform states are steady under every shear", [](std::string& d) {
    double worst = 0.0;
    for (ShearVariant var : {ShearVariant::XShear, ShearVariant::XYShear})
      for (double gamma : {0.0, 0.005, 0.08, 0.1})
        for (double s : {1.0, -1.0})
          worst = std::max(worst, l2_norm(ac_rhs(Field2D(kMetastableGridSize, s), shear(var, gamma))));
    d = fmt("max |rhs(+-1)| = %.1e at n = %zu", worst, kMetastableGridSize);
    return worst == 0.0;
  });
}

void lamellar() {
  criterion("x-independent stripe saddle persists across the sweep", [](std::string& d) {
    const ShearConfig base = shear(ShearVariant::XShear, 0.0);
    const Field2D seed = stripe_seed(kMetastableGridSize, base.kappa, StripeOrientation::Horizontal);
    const SweepResult sw = continuation_in_gamma(kSweepGammas, base, seed);
    double worst_res = 0.0, worst_var = 0.0;
    for (const auto& st : sw.stages) {
      worst_res = std::max(worst_res, st.result.residual);
      worst_var = std::max(worst_var, st.x_variation);
    }
    d = fmt("%zu stages, max residual %.1e, max x-variation %.1e, n = %zu", sw.stages.size(), worst_res, worst_var,
            kMetastableGridSize);
    return sw.complete && sw.stages.size() == kSweepGammas.size() && worst_res <= kLamellarResidualTol;
  });
}

void sweep() {
  criterion("shear sweep shows the lamellar transition", [](std::string& d) {
    const ShearConfig base = shear(ShearVariant::XShear, 0.0);
    const Field2D seed = stripe_seed(kSweepGridSize, base.kappa, StripeOrientation::Vertical);
    Stopwatch clock;
    const SweepResult sw = continuation_in_gamma(kSweepGammas, base, seed);
    const double t = clock.seconds();
    bool ok = sw.complete && sw.stages.size() == kSweepGammas.size();
    std::string per;
    for (const auto& st : sw.stages) {
      const bool collapsed = st.gamma >= 0.065 - 1e-12;
      ok = ok && st.result.converged && st.result.rayleigh > 0.0 &&
           (collapsed ? st.x_variation < kCollapsedVariation : st.x_variation > kPatternedVariation);
      per += fmt("%g:%.1e ", st.gamma, st.x_variation);
    }
    d = fmt("x-variation by gamma %sat n = %zu, %.1f s", per.c_str(), kSweepGridSize, t);
    return ok && t < kSweepSeconds;
  });
}

void property_suite() {
  criterion("property suite", [](std::string& d) {
    doctest::Context ctx;
    ctx.setOption("test-suite", "properties");
    ctx.setOption("minimal", true);
    Stopwatch clock;
    const int rc = ctx.run();
    const double t = clock.seconds();
    d = fmt("doctest exit %d, %.1f s", rc, t);
    return rc == 0 && t < kPropertySeconds;
  });
}

}  // namespace

int main() {
  example1_saddle();
  cross_dynamics();
  spectrum();
  hamilton_contrast();
  msgad();
  metastable();
  lamellar();
  sweep();
  property_suite();
  std::printf("%s: %d failing criteria\n", g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures);
  return g_failures == 0 ? 0 : 1;
}
