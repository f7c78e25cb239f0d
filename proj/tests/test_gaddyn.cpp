#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sgad/eigen.hpp"
#include "sgad/errors.hpp"
#include "sgad/gad.hpp"
#include "sgad/stability.hpp"
#include "test_support.hpp"

using namespace sgad;

namespace {

struct Eigenpair {
  double lambda;
  Vector right;
  Vector left;
};

Eigenpair unstable_pair(const VectorFieldModel& m, std::span<const double> x) {
  const Matrix j = dense_jacobian(m, x);
  double lp = -1e300;
  for (const auto& l : eigenvalues(j)) lp = std::max(lp, l.real());
  return {lp, eigenvector(j, lp), eigenvector(j.transpose(), lp)};
}

Vector example1_point(const std::string& name) {
  const auto pts = zoo::example1_points();
  return refine_fixed_point(model_example1(), name == "m1" ? pts.m1 : name == "m2" ? pts.m2 : pts.s1);
}

}  // namespace

TEST_SUITE("gaddyn") {

TEST_CASE("simplified rates vanish at a saddle with its unstable eigenvector") {
  const auto m = model_example1();
  const Vector s = example1_point("s");
  const Eigenpair e = unstable_pair(m, s);
  const Rates rv = rhs_simplified_v(m, s, e.right);
  CHECK(norm_inf(rv.dx) < 1e-10);
  CHECK(norm_inf(rv.ddir) < 1e-9);
  const Rates rw = rhs_simplified_w(m, s, e.left);
  CHECK(norm_inf(rw.dx) < 1e-10);
  CHECK(norm_inf(rw.ddir) < 1e-9);
}

TEST_CASE("coordinate direction reflects the matching drift component") {
  const auto m = model_example1();
  const Vector x{1.0, 1.0};
  const Vector b = eval_b(m, x);
  const Rates r = rhs_simplified_v(m, x, Vector{1.0, 0.0});
  CHECK(std::abs(r.dx[0] + b[0]) < 1e-15);
  CHECK(std::abs(r.dx[1] - b[1]) < 1e-15);
}

TEST_CASE("non-unit direction is rejected") {
  CHECK_THROWS_AS(rhs_simplified_v(model_example1(), Vector{1.0, 1.0}, Vector{1.0, 1.0}), InvalidArgument);
}

TEST_CASE("original GAD with w = v reduces to the simplified position rate") {
  const auto m = model_example1();
  const Vector x{1.3, 2.1};
  const Vector v = testing::random_unit(2);
  const Rates ro = rhs_original(m, x, v, v);
  const Rates rs = rhs_simplified_v(m, x, v);
  CHECK(testing::max_abs_diff(ro.dx, rs.dx) < 1e-14);
}

TEST_CASE("original GAD is stationary at a saddle with right and left eigenvectors") {
  const auto m = model_example1();
  const Vector s = example1_point("s");
  const Eigenpair e = unstable_pair(m, s);
  const Vector w = scaled(1.0 / dot(e.left, e.right), e.left);
  const Rates r = rhs_original(m, s, e.right, w);
  CHECK(norm_inf(r.dx) < 1e-10);
  CHECK(norm_inf(r.ddir) < 1e-9);
  CHECK(norm_inf(r.ddir2) < 1e-9);
}

TEST_CASE("original GAD rejects a degenerate projector") {
  CHECK_THROWS_AS(rhs_original(model_example1(), Vector{1.0, 1.0}, Vector{1.0, 0.0}, Vector{0.0, 1.0}),
                  DegenerateProjector);
}

TEST_CASE("Hamilton momentum rate is the negated w-form direction rate") {
  const auto m = model_example1();
  const Vector x{2.0, 4.0};
  const Vector u = testing::random_unit(2);
  const Rates rh = rhs_hamilton_normalized(m, x, u);
  const Rates rw = rhs_simplified_w(m, x, u, 1.0);
  for (std::size_t k = 0; k < 2; ++k) CHECK(rh.ddir[k] + rw.ddir[k] == 0.0);
}

TEST_CASE("reconstructed Hamiltonian vanishes on both branches and at fixed points") {
  const auto m = model_example1();
  const Vector x{1.0, 1.0};
  const Vector b = eval_b(m, x);
  const Vector u_down = scaled(-1.0 / norm2(b), b);  // <b, u> < 0
  const Vector u_up = scaled(1.0 / norm2(b), b);     // <b, u> > 0, p = 0
  CHECK(std::abs(reconstruct_hamiltonian(m, x, u_down)) < 1e-12);
  CHECK(reconstruct_hamiltonian(m, x, u_up) == 0.0);
  CHECK(std::abs(reconstruct_hamiltonian(m, example1_point("s"), testing::random_unit(2))) < 1e-12);
  // The full bilinear form agrees with the reduced one on the sphere.
  const double sqrt_l = -2.0 * dot(b, u_down);
  CHECK(std::abs(hamiltonian(m, x, scaled(sqrt_l, u_down))) < 1e-12);
}

TEST_CASE("RK4 step leaves a state with zero rates unchanged") {
  const auto m = model_linear(Matrix(2, 2, 0.0));
  const GadState s0 = initial_state(Dynamics::SimplifiedV, Vector{0.3, -0.2}, Vector{0.6, 0.8});
  const GadState s1 = step_rk4(Dynamics::SimplifiedV, m, s0, 0.1);
  CHECK(s1.x == s0.x);
  CHECK(testing::max_abs_diff(s1.dir.components, s0.dir.components) < 1e-16);
}

TEST_CASE("RK4 step renormalizes the direction") {
  const auto m = model_example1();
  GadState s = initial_state(Dynamics::SimplifiedV, Vector{1.0, 2.0}, Vector{1.0, 1.0});
  for (int k = 0; k < 10; ++k) {
    s = step_rk4(Dynamics::SimplifiedV, m, s, 0.05);
    CHECK(std::abs(norm2(s.dir.components) - 1.0) < 1e-15);
  }
}

TEST_CASE("RK4 step reports non-finite states with the step index") {
  VectorFieldModel m;
  m.name = "explosive";
  m.dim = 1;
  m.eval = [](std::span<const double> x) { return Vector{x[0] * x[0] * x[0] * x[0]}; };
  const GadState s = initial_state(Dynamics::SimplifiedV, Vector{1e80}, Vector{1.0});
  try {
    step_rk4(Dynamics::SimplifiedV, m, s, 1.0, 1.0, 17);
    FAIL("expected NumericalBlowup");
  } catch (const NumericalBlowup& e) {
    CHECK(e.step() == 17);
  }
}

TEST_CASE("options are validated") {
  GadOptions o;
  o.dt = -1.0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o = {};
  o.relaxation = 0.0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  CHECK_THROWS_AS(find_saddle(model_example1(), Vector{1.0, 1.0}, Vector{0.0, 0.0}), InvalidArgument);
}

TEST_CASE("v-form from m1 along (1, 0) reaches the example1 saddle") {
  const SaddleResult r = find_saddle(model_example1(), example1_point("m1"), Vector{1.0, 0.0});
  REQUIRE(r.converged);
  CHECK(std::abs(r.x_star[0] - 1.7954) < 1e-3);
  CHECK(std::abs(r.x_star[1] - 3.3088) < 1e-3);
  CHECK(r.residual <= 1e-8);
  CHECK(r.eigen_estimate > 0.0);
}

TEST_CASE("v-form from m2 along (0, 1) reaches the same saddle") {
  GadOptions o;
  const Vector m2 = example1_point("m2");
  o.kick = -1e-2 * (1.0 + norm_inf(m2));
  const SaddleResult r = find_saddle(model_example1(), m2, Vector{0.0, 1.0}, o);
  REQUIRE(r.converged);
  CHECK(std::abs(r.x_star[0] - 1.7954) < 1e-3);
  CHECK(std::abs(r.x_star[1] - 3.3088) < 1e-3);
}

TEST_CASE("averaged slow-fast example: saddle from m2") {
  const auto m = model_example2_effective();
  const auto pts = zoo::example2_points();
  const SaddleResult r = find_saddle(m, refine_fixed_point(m, pts.m2), Vector{1.0, 0.0});
  REQUIRE(r.converged);
  const bool near_s1 = norm_inf(sub(r.x_star, pts.s1)) < 1e-3;
  const bool near_s2 = norm_inf(sub(r.x_star, pts.s2)) < 1e-3;
  CHECK((near_s1 || near_s2));
}

TEST_CASE("original GAD and w-form agree with the v-form saddle") {
  const auto m = model_example1();
  const Vector m1 = example1_point("m1");
  const SaddleResult rv = find_saddle(m, m1, Vector{1.0, 0.0}, {}, Dynamics::SimplifiedV);
  const SaddleResult rw = find_saddle(m, m1, Vector{1.0, 0.0}, {}, Dynamics::SimplifiedW);
  const SaddleResult ro = find_saddle(m, m1, Vector{1.0, 0.0}, {}, Dynamics::Original);
  REQUIRE(rv.converged);
  REQUIRE(rw.converged);
  REQUIRE(ro.converged);
  CHECK(norm_inf(sub(rw.x_star, rv.x_star)) < 1e-6);
  CHECK(norm_inf(sub(ro.x_star, rv.x_star)) < 1e-6);
}

TEST_CASE("Hamilton flow does not settle at the saddle") {
  GadOptions o;
  o.max_steps = 100'000;
  o.stop_on_blowup = true;
  const SaddleResult r = find_saddle(model_example1(), example1_point("m1"), Vector{1.0, 0.0}, o, Dynamics::Hamilton);
  CHECK_FALSE(r.converged);
}

TEST_CASE("stop_on_blowup ends the run instead of throwing") {
  VectorFieldModel m;
  m.name = "explosive";
  m.dim = 1;
  // The reflected flow x' = x^2 escapes in finite time.
  m.eval = [](std::span<const double> x) { return Vector{-x[0] * x[0]}; };
  m.analytic_jvp = [](std::span<const double> x, std::span<const double> v) { return Vector{-2.0 * x[0] * v[0]}; };
  GadOptions o;
  o.dt = 0.5;
  o.max_steps = 1000;
  CHECK_THROWS_AS(find_saddle(m, Vector{0.0}, Vector{1.0}, o), NumericalBlowup);
  o.stop_on_blowup = true;
  const SaddleResult r = find_saddle(m, Vector{0.0}, Vector{1.0}, o);
  CHECK_FALSE(r.converged);
  REQUIRE(r.blowup_step.has_value());
  CHECK(*r.blowup_step < 1000);
}

TEST_CASE("trajectory CSV header") {
  GadOptions o;
  o.record_every = 1000;
  const SaddleResult r = find_saddle(model_example1(), example1_point("m1"), Vector{1.0, 0.0}, o);
  std::ostringstream os;
  write_trajectory_csv(os, r.trajectory, 2);
  const std::string text = os.str();
  CHECK(text.rfind("step,t,x_1,x_2,dir_1,dir_2,residual_inf,rayleigh\n", 0) == 0);
  CHECK(r.trajectory.size() >= 40);
}

TEST_CASE("dynamics names round-trip") {
  for (Dynamics d : {Dynamics::SimplifiedV, Dynamics::SimplifiedW, Dynamics::Original, Dynamics::Hamilton})
    CHECK(parse_dynamics(to_string(d)) == d);
  CHECK_THROWS_AS(parse_dynamics("gad"), InvalidArgument);
}

}  // TEST_SUITE
