#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sgad/acshear.hpp"
#include "sgad/errors.hpp"
#include "test_support.hpp"

using namespace sgad;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ShearConfig shear(ShearVariant variant, double gamma) {
  ShearConfig c;
  c.variant = variant;
  c.shear_rate = gamma;
  return c;
}

double max_abs(const Field2D& f) { return norm_inf(f.values()); }

}  // namespace

TEST_SUITE("acshear") {

TEST_CASE("Laplacian of a constant vanishes") {
  CHECK(max_abs(laplacian_periodic(Field2D(16, 0.7))) == 0.0);
}

TEST_CASE("Laplacian of a grid Fourier mode is its discrete symbol") {
  const std::size_t n = 32;
  const Field2D phi = Field2D::from_function(n, [](double x, double) { return std::sin(kTwoPi * x); });
  const double h = phi.h();
  const double symbol = -(2.0 / (h * h)) * (1.0 - std::cos(kTwoPi * h));
  const Field2D lap = laplacian_periodic(phi);
  for (std::size_t k = 0; k < phi.size(); ++k) CHECK(std::abs(lap.data()[k] - symbol * phi.data()[k]) < 1e-9);
}

TEST_CASE("Laplacian sums to zero") {
  const Field2D lap = laplacian_periodic(testing::random_field(24));
  double s = 0.0;
  for (double e : lap.values()) s += e;
  CHECK(std::abs(s) < 1e-9);
}

TEST_CASE("uniform states are steady for every shear") {
  for (ShearVariant v : {ShearVariant::None, ShearVariant::XShear, ShearVariant::XYShear})
    for (double g : {0.0, 0.05, 0.1})
      for (double c : {1.0, -1.0}) CHECK(max_abs(ac_rhs(Field2D(16, c), shear(v, g))) == 0.0);
}

TEST_CASE("x-shear does not act on an x-independent stripe") {
  const Field2D stripe = stripe_seed(32, 0.01, StripeOrientation::Horizontal);
  const Field2D a = ac_rhs(stripe, shear(ShearVariant::XShear, 0.08));
  const Field2D b = ac_rhs(stripe, shear(ShearVariant::XShear, 0.0));
  CHECK(a.values()[0] == b.values()[0]);
  CHECK(testing::max_abs_diff(a.values(), b.values()) == 0.0);
}

TEST_CASE("without shear the dynamics is a gradient flow") {
  const Field2D phi = testing::random_field(16);
  const ShearConfig cfg = shear(ShearVariant::XShear, 0.0);
  const Field2D g = variational_derivative(phi, cfg);
  const double lhs = l2_inner(ac_rhs(phi, cfg), g);
  CHECK(lhs <= 0.0);
  CHECK(std::abs(lhs + l2_inner(g, g)) < 1e-10 * l2_inner(g, g));
}

TEST_CASE("linearization at zero without shear") {
  const Field2D v = testing::random_field(16);
  const ShearConfig cfg = shear(ShearVariant::XShear, 0.0);
  Field2D expect = laplacian_periodic(v);
  expect *= cfg.kappa;
  expect += v;
  CHECK(testing::max_abs_diff(ac_jvp(Field2D(16, 0.0), v, cfg).values(), expect.values()) < 1e-12);
}

TEST_CASE("linearization matches central differences to second order") {
  const Field2D phi = testing::random_field(16);
  const Field2D v = testing::random_field(16);
  for (ShearVariant var : {ShearVariant::XShear, ShearVariant::XYShear}) {
    const ShearConfig cfg = shear(var, 0.1);
    const Field2D exact = ac_jvp(phi, v, cfg);
    auto fd_error = [&](double h) {
      Field2D d = ac_rhs(phi + h * v, cfg) - ac_rhs(phi - h * v, cfg);
      d *= 1.0 / (2.0 * h);
      return l2_norm(d - exact);
    };
    CHECK(testing::observed_order(fd_error(1e-2), fd_error(5e-3)) >= 1.8);
  }
}

TEST_CASE("linearization is linear in the direction") {
  const Field2D phi = testing::random_field(16);
  const Field2D v1 = testing::random_field(16), v2 = testing::random_field(16);
  const ShearConfig cfg = shear(ShearVariant::XYShear, 0.1);
  const Field2D lhs = ac_jvp(phi, 2.0 * v1 + (-3.0) * v2, cfg);
  const Field2D rhs = 2.0 * ac_jvp(phi, v1, cfg) + (-3.0) * ac_jvp(phi, v2, cfg);
  CHECK(testing::max_abs_diff(lhs.values(), rhs.values()) < 1e-9);
}

TEST_CASE("adjoint action") {
  const Field2D phi = testing::random_field(16);
  const Field2D v = testing::random_field(16), w = testing::random_field(16);
  const ShearConfig cfg = shear(ShearVariant::XShear, 0.07);
  const double a = l2_inner(w, ac_jvp(phi, v, cfg));
  const double b = l2_inner(ac_vjp(phi, w, cfg), v);
  CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));

  const ShearConfig still = shear(ShearVariant::XShear, 0.0);
  CHECK(testing::max_abs_diff(ac_vjp(phi, w, still).values(), ac_jvp(phi, w, still).values()) == 0.0);
  CHECK(max_abs(ac_vjp(phi, Field2D(16, 0.0), cfg)) == 0.0);
}

TEST_CASE("energy of uniform states") {
  const ShearConfig cfg;
  CHECK(energy(Field2D(32, 1.0), cfg) == 0.0);
  CHECK(energy(Field2D(32, -1.0), cfg) == 0.0);
  CHECK(energy(Field2D(32, 0.0), cfg) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("energy of a two-interface stripe is twice the interface tension") {
  const ShearConfig cfg;
  const double tension = (2.0 * std::sqrt(2.0) / 3.0) * std::sqrt(cfg.kappa);
  const double e = energy(stripe_seed(128, cfg.kappa, StripeOrientation::Horizontal), cfg);
  CHECK(std::abs(e / (2.0 * tension) - 1.0) < 0.05);
}

TEST_CASE("L2 inner product") {
  CHECK(l2_inner(Field2D(16, 1.0), Field2D(16, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  const Field2D s = Field2D::from_function(32, [](double x, double) { return std::sin(kTwoPi * x); });
  const Field2D c = Field2D::from_function(32, [](double x, double) { return std::cos(kTwoPi * x); });
  CHECK(std::abs(l2_inner(s, c)) < 1e-14);
  auto smooth = [](double x, double y) { return std::sin(kTwoPi * x) * std::cos(kTwoPi * y) + 0.3; };
  const Field2D f1 = Field2D::from_function(32, smooth), f2 = Field2D::from_function(64, smooth);
  const double a = l2_inner(f1, f1), b = l2_inner(f2, f2);
  CHECK(std::abs(a - b) < 1e-4 * b);
  CHECK_THROWS_AS(l2_inner(f1, f2), InvalidArgument);
}

TEST_CASE("normalizing a zero field fails") {
  Field2D z(16, 0.0);
  CHECK_THROWS_AS(l2_normalize(z), InvalidArgument);
}

TEST_CASE("shear configuration is validated") {
  ShearConfig c;
  c.kappa = 0.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  c = {};
  c.shear_rate = -0.1;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  CHECK(parse_shear_variant("xy-shear") == ShearVariant::XYShear);
  CHECK_THROWS_AS(parse_shear_variant("z"), InvalidArgument);
}

TEST_CASE("seed shapes") {
  const Field2D d = droplet_seed(64, 0.01);
  CHECK(d(32, 32) == doctest::Approx(std::tanh(0.25 / interface_width(0.01))).epsilon(1e-14));
  CHECK(d(0, 0) < -0.99);
  const Field2D s = stripe_seed(64, 0.01, StripeOrientation::Horizontal);
  CHECK(x_variation(s) == 0.0);
  CHECK(x_variation(stripe_seed(64, 0.01, StripeOrientation::Vertical)) > 0.5);
  CHECK(std::abs(l2_norm(default_direction(d)) - 1.0) < 1e-14);
}

TEST_CASE("symmetry residual detects the diagonal reflections") {
  const Field2D sym = Field2D::from_function(32, [](double x, double y) { return std::cos(kTwoPi * x) + std::cos(kTwoPi * y); });
  CHECK(symmetry_residual(sym) < 1e-12);
  const Field2D anti = Field2D::from_function(32, [](double x, double y) { return std::cos(kTwoPi * x) - std::cos(kTwoPi * y); });
  CHECK(symmetry_residual(anti) < 1e-12);
  const Field2D stripe = stripe_seed(32, 0.01, StripeOrientation::Horizontal);
  CHECK(symmetry_residual(stripe) > 0.1);
}

TEST_CASE("saddle search without shear from a droplet") {
  const ShearConfig cfg = shear(ShearVariant::XShear, 0.0);
  const Field2D phi0 = droplet_seed(64, cfg.kappa);
  const PdeSaddleResult r = pde_find_saddle(phi0, default_direction(phi0), cfg);
  REQUIRE(r.converged);
  CHECK(r.residual <= 1e-6);
  CHECK(r.rayleigh > 0.0);
}

TEST_CASE("x-shear at 0.08 from a perturbed stripe converges to a lamellar saddle") {
  const ShearConfig cfg = shear(ShearVariant::XShear, 0.08);
  Field2D phi0 = stripe_seed(64, cfg.kappa, StripeOrientation::Horizontal);
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j)
      phi0(i, j) += 0.05 * std::sin(kTwoPi * grid_coordinate(j, 64)) * (1.0 - phi0(i, j) * phi0(i, j));
  REQUIRE(x_variation(phi0) > 1e-3);
  const PdeSaddleResult r = pde_find_saddle(phi0, default_direction(phi0), cfg);
  REQUIRE(r.converged);
  CHECK(x_variation(r.phi) <= 1e-4);
  CHECK(r.rayleigh > 0.0);
}

TEST_CASE("xy-shear at 0.1 forms the diagonal X pattern") {
  const ShearConfig cfg = shear(ShearVariant::XYShear, 0.1);
  const Field2D phi0 = droplet_seed(64, cfg.kappa);
  const PdeSaddleResult r = pde_find_saddle(phi0, default_direction(phi0), cfg);
  REQUIRE(r.converged);
  CHECK(symmetry_residual(r.phi) <= 1e-3);
  CHECK(x_variation(r.phi) > 0.1);
}

TEST_CASE("w-form search reaches the same lamellar saddle") {
  const ShearConfig cfg = shear(ShearVariant::XShear, 0.0);
  const Field2D phi0 = stripe_seed(32, cfg.kappa, StripeOrientation::Horizontal);
  PdeGadOptions o;
  const PdeSaddleResult rv = pde_find_saddle(phi0, default_direction(phi0), cfg, o);
  o.form = DirectionForm::Left;
  const PdeSaddleResult rw = pde_find_saddle(phi0, default_direction(phi0), cfg, o);
  REQUIRE(rv.converged);
  REQUIRE(rw.converged);
  CHECK(l2_norm(rv.phi - rw.phi) < 1e-5);
}

TEST_CASE("oversized time step is reported as a blowup") {
  const ShearConfig cfg;
  const Field2D phi0 = droplet_seed(32, cfg.kappa);
  PdeGadOptions o;
  o.dt = 0.5;
  o.max_steps = 10000;
  CHECK_THROWS_AS(pde_find_saddle(phi0, default_direction(phi0), cfg, o), NumericalBlowup);
}

TEST_CASE("a single-stage continuation equals one saddle search") {
  const ShearConfig base = shear(ShearVariant::XShear, 0.0);
  ShearConfig at = base;
  at.shear_rate = 0.05;
  const Field2D phi0 = stripe_seed(32, base.kappa, StripeOrientation::Vertical);
  const SweepResult sw = continuation_in_gamma({0.05}, base, phi0);
  const PdeSaddleResult single = pde_find_saddle(phi0, default_direction(phi0), at);
  REQUIRE(sw.stages.size() == 1);
  CHECK(sw.complete);
  CHECK(sw.stages[0].result.steps == single.steps);
  CHECK(testing::max_abs_diff(sw.stages[0].result.phi.values(), single.phi.values()) == 0.0);
}

TEST_CASE("lamellar seed is a saddle at every shear rate of the sweep") {
  const ShearConfig base = shear(ShearVariant::XShear, 0.0);
  const Field2D phi0 = stripe_seed(64, base.kappa, StripeOrientation::Horizontal);
  const SweepResult sw = continuation_in_gamma({0.005, 0.02, 0.035, 0.05, 0.065, 0.08}, base, phi0);
  REQUIRE(sw.complete);
  for (const auto& st : sw.stages) {
    CHECK(st.result.residual <= 1e-6);
    CHECK(st.x_variation == 0.0);
  }
}

TEST_CASE("continuation needs ascending shear rates") {
  const Field2D phi0 = stripe_seed(16, 0.01, StripeOrientation::Horizontal);
  CHECK_THROWS_AS(continuation_in_gamma({0.05, 0.02}, ShearConfig{}, phi0), InvalidArgument);
  CHECK_THROWS_AS(continuation_in_gamma({}, ShearConfig{}, phi0), InvalidArgument);
}

}  // TEST_SUITE
