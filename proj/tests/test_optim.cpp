#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pafnet/expr.hpp"
#include "pafnet/optim.hpp"

using namespace pafnet;

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  AdamState st(3, 0.01);
  std::vector<double> params = {1.0, -2.0, 0.5};
  std::vector<double> grads = {0.0, 0.0, 0.0};
  const auto before = params;
  adam_step(st, params, grads);
  CHECK(params == before);
}

TEST_CASE("adam: first bias-corrected step is a signed learning-rate step") {
  AdamState st(1, 0.01);
  std::vector<double> params = {2.0};
  std::vector<double> grads = {0.37};
  adam_step(st, params, grads);
  // mhat = g, vhat = g^2 on step 1 -> delta = -lr * g / (|g| + eps)
  const double expect = 2.0 - 0.01 * 0.37 / (std::fabs(0.37) + 1e-8);
  CHECK(params[0] == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("adam: minimizes a quadratic with autodiff gradients") {
  ad::Graph g;
  ad::Expr theta = g.variable("theta");
  ad::Expr f = theta * theta;
  const ad::VarId ids[] = {g.var_id(theta)};

  AdamState st(1, 0.1);
  std::vector<double> params = {1.0};
  std::vector<double> grad(1);
  ad::Binding b(g);
  for (int i = 0; i < 500; ++i) {
    b.set(ids[0], params[0]);
    grad = ad::gradient(f, ids, b);
    adam_step(st, params, grad);
  }
  CHECK(std::fabs(params[0]) < 1e-3);
}

TEST_CASE("adam: update is elementwise (permutation-consistent)") {
  AdamState s1(2, 0.05), s2(2, 0.05);
  std::vector<double> p1 = {0.3, -1.1}, p2 = {-1.1, 0.3};
  std::vector<double> g1 = {0.9, 0.2}, g2 = {0.2, 0.9};
  for (int i = 0; i < 5; ++i) {
    adam_step(s1, p1, g1);
    adam_step(s2, p2, g2);
  }
  CHECK(p1[0] == p2[1]);
  CHECK(p1[1] == p2[0]);
}

TEST_CASE("adam: length mismatch") {
  AdamState st(2, 0.1);
  std::vector<double> params = {1.0, 2.0};
  std::vector<double> grads = {1.0};
  CHECK_THROWS_AS(adam_step(st, params, grads), LengthMismatch);
}

namespace {

LossGradFn quadratic_diag(double a, double b) {
  return [a, b](std::span<const double> x, std::span<double> grad) {
    grad[0] = a * x[0];
    grad[1] = b * x[1];
    return 0.5 * (a * x[0] * x[0] + b * x[1] * x[1]);
  };
}

LossGradFn rosenbrock() {
  return [](std::span<const double> x, std::span<double> grad) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    grad[0] = -2.0 * a - 400.0 * x[0] * b;
    grad[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
}

}  // namespace

TEST_CASE("lbfgs: quadratic converges in a few iterations") {
  LbfgsState st;
  std::vector<double> x = {1.0, 1.0};
  auto f = quadratic_diag(1.0, 10.0);
  for (int i = 0; i < 20; ++i) lbfgs_step(st, x, f);
  std::vector<double> grad(2);
  f(x, grad);
  CHECK(std::sqrt(grad[0] * grad[0] + grad[1] * grad[1]) < 1e-8);
}

TEST_CASE("lbfgs: Rosenbrock from the classic start") {
  LbfgsState st;
  std::vector<double> x = {-1.2, 1.0};
  auto f = rosenbrock();
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    double loss;
    try {
      loss = lbfgs_step(st, x, f);
    } catch (const LineSearchFailed&) {
      st.pairs.clear();
      loss = steepest_descent_step(x, f);
    }
    CHECK(loss <= prev + 1e-15);  // non-increasing accepted sequence
    prev = loss;
  }
  CHECK(std::fabs(x[0] - 1.0) < 1e-6);
  CHECK(std::fabs(x[1] - 1.0) < 1e-6);
}

TEST_CASE("lbfgs: no-op at an exact minimum") {
  LbfgsState st;
  std::vector<double> x = {0.0, 0.0};
  auto f = quadratic_diag(2.0, 3.0);
  const double loss = lbfgs_step(st, x, f);
  CHECK(loss == 0.0);
  CHECK(x[0] == 0.0);
  CHECK(x[1] == 0.0);
}

TEST_CASE("lbfgs: non-finite loss raises") {
  LbfgsState st;
  std::vector<double> x = {1.0};
  LossGradFn f = [](std::span<const double>, std::span<double> grad) {
    grad[0] = 0.0;
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(lbfgs_step(st, x, f), NonFiniteLoss);
}

TEST_CASE("lbfgs: determinism") {
  auto run = [] {
    LbfgsState st;
    std::vector<double> x = {-1.2, 1.0};
    auto f = rosenbrock();
    for (int i = 0; i < 50; ++i) {
      try {
        lbfgs_step(st, x, f);
      } catch (const LineSearchFailed&) {
        st.pairs.clear();
        steepest_descent_step(x, f);
      }
    }
    return x;
  };
  CHECK(run() == run());
}

TEST_CASE("lbfgs: infeasible trial points are backed away from") {
  // loss throws below x = 0.25; minimum at 0.6, close to the barrier
  LbfgsState st;
  std::vector<double> x = {1.0};
  LossGradFn f = [](std::span<const double> x_, std::span<double> grad) -> double {
    if (x_[0] < 0.25) throw DomainViolation("log", x_[0]);
    grad[0] = 1.0 - 0.6 / x_[0];
    return x_[0] - 0.6 * std::log(x_[0]);
  };
  for (int i = 0; i < 30; ++i) {
    try {
      lbfgs_step(st, x, f);
    } catch (const LineSearchFailed&) {
      st.pairs.clear();
      steepest_descent_step(x, f);
    }
  }
  CHECK(x[0] == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("steepest descent fallback decreases a quadratic") {
  std::vector<double> x = {3.0, -2.0};
  auto f = quadratic_diag(1.0, 4.0);
  std::vector<double> g0(2);
  const double before = f(x, g0);
  const double after = steepest_descent_step(x, f);
  CHECK(after < before);
}
