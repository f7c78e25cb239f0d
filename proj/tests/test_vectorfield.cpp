#include <doctest.h>

#include <cmath>

#include "sgad/eigen.hpp"
#include "sgad/errors.hpp"
#include "sgad/vectorfield.hpp"
#include "test_support.hpp"

using namespace sgad;

namespace {

double gamma_prime(double xi) {
  const double u = xi - 5.0;
  return -2.0 * u / ((1.0 + u * u) * (1.0 + u * u));
}

VectorFieldModel without_analytic(VectorFieldModel m) {
  m.analytic_jvp = nullptr;
  m.analytic_vjp = nullptr;
  return m;
}

}  // namespace

TEST_SUITE("vectorfield") {

TEST_CASE("quoted fixed points of example1 have small drift") {
  const auto m = model_example1();
  const auto pts = zoo::example1_points();
  CHECK(norm_inf(eval_b(m, pts.m1)) < 5e-4);
  CHECK(norm_inf(eval_b(m, pts.s1)) < 5e-4);
  CHECK(norm_inf(eval_b(m, pts.m2)) < 5e-4);
}

TEST_CASE("quoted fixed points of the averaged slow-fast example have small drift") {
  const auto m = model_example2_effective();
  const auto pts = zoo::example2_points();
  for (const auto& x : {pts.m1, pts.m2, pts.m3, pts.s1, pts.s2}) CHECK(norm_inf(eval_b(m, x)) < 5e-4);
}

TEST_CASE("linear model evaluates A x") {
  const auto m = model_linear(Matrix::diagonal(Vector{1.0, -1.0}));
  const Vector b = eval_b(m, Vector{2.0, 3.0});
  CHECK(b[0] == 2.0);
  CHECK(b[1] == -3.0);
}

TEST_CASE("dimension mismatch is rejected") {
  const auto m = model_example1();
  CHECK_THROWS_AS(eval_b(m, Vector{1.0, 2.0, 3.0}), InvalidArgument);
  CHECK_THROWS_AS(jvp(m, Vector{1.0}, Vector{1.0, 0.0}), InvalidArgument);
}

TEST_CASE("finite-difference jvp is exact on linear fields for any step") {
  const Matrix a(2, 2, Vector{0.3, -1.2, 2.5, 0.7});
  const auto m = without_analytic(model_linear(a));
  const Vector x{0.4, -2.0}, v{1.5, -0.25};
  const Vector ref = a.apply(v);
  // No truncation error; only round-off of order eps |b| / h remains.
  for (double h : {1e-6, 1e-3, 0.1, 1.0}) CHECK(testing::max_abs_diff(jvp(m, x, v, h), ref) < 1e-14 * (1.0 + 1.0 / h));
}

TEST_CASE("finite-difference jvp at the example1 saddle matches the differentiated drift") {
  const auto m = without_analytic(model_example1());
  const Vector s = zoo::example1_points().s1;
  const Vector col = jvp(m, s, Vector{1.0, 0.0});
  const double expect0 = -0.8 + 0.5 * zoo::kSigmaSquared * gamma_prime(s[0]);
  const double expect1 = 0.2;
  CHECK(std::abs(col[0] - expect0) < 1e-8);
  CHECK(std::abs(col[1] - expect1) < 1e-8);
}

TEST_CASE("gradient model with identity Hessian has jvp = -v") {
  const auto m = model_from_gradient(
      "quadratic", 3, [](std::span<const double> x) { return 0.5 * dot(x, x); },
      [](std::span<const double> x) { return Vector(x.begin(), x.end()); });
  const Vector v{0.3, -0.7, 2.0};
  const Vector jv = jvp(m, Vector{1.0, 2.0, 3.0}, v);
  CHECK(testing::max_abs_diff(jv, scaled(-1.0, v)) < 1e-9);
}

TEST_CASE("jvp of a zero vector is rejected") {
  CHECK_THROWS_AS(jvp(model_example1(), Vector{1.0, 1.0}, Vector{0.0, 0.0}), InvalidArgument);
}

TEST_CASE("vjp of a symmetric Jacobian equals jvp") {
  const auto m = model_from_gradient(
      "coupled", 2,
      [](std::span<const double> x) { return x[0] * x[0] * x[1] + std::cos(x[1]); },
      [](std::span<const double> x) { return Vector{2.0 * x[0] * x[1], x[0] * x[0] - std::sin(x[1])}; });
  const Vector x{0.7, -0.4}, w{0.2, 1.1};
  CHECK(testing::max_abs_diff(vjp(m, x, w), jvp(m, x, w)) < 1e-8);
}

TEST_CASE("vjp is the explicit transpose for a nilpotent linear field") {
  const Matrix a(2, 2, Vector{0.0, 1.0, 0.0, 0.0});
  for (const auto& m : {model_linear(a), without_analytic(model_linear(a))}) {
    const Vector r = vjp(m, Vector{0.0, 0.0}, Vector{1.0, 0.0});
    CHECK(std::abs(r[0]) < 1e-12);
    CHECK(std::abs(r[1] - 1.0) < 1e-12);
  }
}

TEST_CASE("dense transpose fallback satisfies the adjoint identity at the example1 saddle") {
  const auto m = without_analytic(model_example1());
  const Vector s = zoo::example1_points().s1;
  for (int k = 0; k < 5; ++k) {
    const Vector v = testing::random_vector(2), w = testing::random_vector(2);
    CHECK(std::abs(dot(w, jvp(m, s, v)) - dot(vjp(m, s, w), v)) < 1e-8);
  }
}

TEST_CASE("dense Jacobian of a linear field reproduces the matrix") {
  const Matrix a(3, 3, Vector{1, 2, 3, -4, 5, 6, 0.5, -0.25, 9});
  const Matrix j = dense_jacobian(without_analytic(model_linear(a)), Vector{0.1, 0.2, 0.3});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(j(i, k) - a(i, k)) < 1e-10);
}

TEST_CASE("dense Jacobian refuses large dimensions") {
  const auto m = model_linear(Matrix::identity(kDenseThreshold + 1));
  CHECK_THROWS_AS(dense_jacobian(m, Vector(kDenseThreshold + 1, 0.0)), UnsupportedOperation);
  const auto big = without_analytic(m);
  CHECK_THROWS_AS(vjp(big, Vector(kDenseThreshold + 1, 0.0), Vector(kDenseThreshold + 1, 1.0)),
                  UnsupportedOperation);
}

TEST_CASE("example1 saddle has exactly one positive eigenvalue") {
  const auto m = model_example1();
  const auto eig = eigenvalues(dense_jacobian(m, zoo::example1_points().s1));
  int positive = 0;
  for (const auto& l : eig) positive += l.real() > 0.0;
  CHECK(positive == 1);
}

TEST_CASE("averaged slow-fast example is stable at m1") {
  const auto eig = eigenvalues(dense_jacobian(model_example2_effective(), zoo::example2_points().m1));
  for (const auto& l : eig) CHECK(l.real() < 0.0);
}

TEST_CASE("model lookup by name") {
  CHECK(model_by_name("example1").name == "example1");
  CHECK(model_by_name("example2-effective").dim == 2);
  CHECK_THROWS_AS(model_by_name("nope"), InvalidArgument);
}

}  // TEST_SUITE
