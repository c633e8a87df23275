#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "pafnet/network.hpp"
#include "pafnet/physics.hpp"
#include "pafnet/reference.hpp"
#include "test_support.hpp"

using namespace pafnet;
using namespace pafnet::ad;

TEST_CASE("residual_oscillator: trivial solutions") {
  Graph g;
  Expr t = g.variable("t");
  Binding b(g);
  b.set(g.var_id(t), 0.7);

  Expr zero = g.constant(0.0);
  CHECK(evaluate(residual_oscillator(g, zero, t, 1.0, 4.0, 400.0), b) == 0.0);
  Expr one = g.constant(1.0);
  CHECK(evaluate(residual_oscillator(g, one, t, 1.0, 4.0, 400.0), b) == 400.0);
}

TEST_CASE("residual_oscillator: closed form satisfies its own equation") {
  const double m = 1.0, mu = 4.0, k = 400.0;
  Graph g;
  Expr t = g.variable("t");
  Expr u = analytic_oscillator_expr(g, t, m, mu, k);
  Expr res = residual_oscillator(g, u, t, m, mu, k);
  Session s(g, res);
  Binding b(g);
  for (int i = 0; i < 100; ++i) {
    b.set(g.var_id(t), 2.5 * i / 99.0);
    s.forward(b);
    CHECK(std::fabs(s.value(res)) < 1e-6);
  }
}

TEST_CASE("residual_advection_dispersion: trivial and closed-form cases") {
  const double D = 0.003, v = 0.003;
  Graph g;
  Expr x = g.variable("x"), t = g.variable("t");
  Binding b(g);
  b.set(g.var_id(x), 0.4);
  b.set(g.var_id(t), 25.0);

  CHECK(evaluate(residual_advection_dispersion(g, g.constant(0.7), x, t, D, v), b) ==
        0.0);
  CHECK(evaluate(residual_advection_dispersion(g, x, x, t, D, v), b) ==
        doctest::Approx(v).epsilon(1e-15));

  Expr c = analytic_advection_dispersion_expr(g, x, t, 1.0, v, D);
  Expr res = residual_advection_dispersion(g, c, x, t, D, v);
  Session s(g, res);
  for (int i = 0; i <= 19; ++i) {
    for (int j = 0; j <= 19; ++j) {
      b.set(g.var_id(x), 0.1 + (2.0 - 0.1) * i / 19.0);
      b.set(g.var_id(t), 10.0 + (300.0 - 10.0) * j / 19.0);
      s.forward(b);
      CHECK(std::fabs(s.value(res)) < 1e-5);
    }
  }
}

TEST_CASE("residual_diffusion: coefficient forms and trivial solution") {
  Graph g;
  Expr x = g.variable("x"), t = g.variable("t");
  Binding b(g);
  b.set(g.var_id(x), 0.0);
  b.set(g.var_id(t), 3.0);

  DiffusivityBuilder het = [](Graph& gg, Expr xx, Expr) {
    return 0.02 * (0.3 * xx + gg.log(xx * xx + 1.5));
  };
  CHECK(evaluate(residual_diffusion(g, g.constant(2.0), x, t, het), b) == 0.0);

  // coefficient values at reference points
  Expr d_het = het(g, x, t);
  CHECK(evaluate(d_het, b) ==
        doctest::Approx(0.02 * std::log(1.5)).epsilon(1e-12));  // 0.00810930...

  Expr l1 = g.variable("l1"), l2 = g.variable("l2");
  Expr d_inv = 0.01 * (l1 * x * x + l2);
  b.set(g.var_id(l1), 0.30);
  b.set(g.var_id(l2), 0.30);
  b.set(g.var_id(x), 1.0);
  CHECK(evaluate(d_inv, b) == doctest::Approx(0.006).epsilon(1e-15));
}

TEST_CASE("residual_laplace: harmonic and non-harmonic probes") {
  Graph g;
  Expr x = g.variable("x"), y = g.variable("y");
  Binding b(g);
  b.set(g.var_id(x), 1.3);
  b.set(g.var_id(y), -0.2);

  Expr harmonic = x * x - y * y;
  CHECK(evaluate(residual_laplace(g, harmonic, x, y), b) == 0.0);
  Expr bowl = x * x + y * y;
  CHECK(evaluate(residual_laplace(g, bowl, x, y), b) == 4.0);

  // the x=0 boundary formula with lambda1 = pi
  PdeProblem p = make_problem("laplace_inverse");
  Expr lambda1 = g.variable("lambda1"), lambda2 = g.variable("lambda2");
  Expr in[] = {x, y};
  Expr lams[] = {lambda1, lambda2};
  Expr target = p.bc[0].target(g, in, lams);
  b.set(g.var_id(lambda1), 3.141592653589793);
  b.set(g.var_id(lambda2), 0.0);
  for (double yq : {0.5, 2.0, 5.0}) {
    b.set(g.var_id(y), yq);
    CHECK(evaluate(target, b) ==
          doctest::Approx(3.0 * yq * std::sin(yq + 3.141592653589793)).epsilon(1e-14));
  }
}

TEST_CASE("total_loss: reference values and empty batches") {
  NetworkSpec spec;
  spec.input_vars = {"t"};
  spec.hidden_widths = {3};
  spec.activation_map = {{"tanh", "tanh", "tanh"}};

  Graph g;
  auto params = make_param_vars(spec, g);
  Expr t = g.variable("t");
  Expr in[] = {t};
  Expr u = forward(spec, g, params, in);
  Expr res = residual_oscillator(g, u, t, 1.0, 4.0, 400.0);

  PointMatrix data = {{0.1}, {0.4}};
  PointMatrix coll = {{0.2}, {0.3}, {0.6}};

  // all-zero parameters: u == 0 identically, which solves the equation
  LossWeights w_physics{0.0, 1.0, 0.0, 0.0};
  LossParts p1 = total_loss(g, u, in, data, std::vector<double>{0.0, 0.0}, res, coll,
                            {}, {}, w_physics);
  Binding b(g);
  for (const Expr& pv : params) b.set(g.var_id(pv), 0.0);
  CHECK(evaluate(p1.total, b) == 0.0);

  // data term: single point, prediction 0 vs target given
  LossWeights w_data{1.0, 0.0, 0.0, 0.0};
  PointMatrix one_pt = {{0.1}};
  LossParts p2 = total_loss(g, u, in, one_pt, std::vector<double>{1.0}, res, coll, {},
                            {}, w_data);
  // zero net predicts 0.5 off by... prediction 0 vs target 1 -> 1; rescale:
  CHECK(evaluate(p2.total, b) == 1.0);
  LossParts p3 = total_loss(g, u, in, one_pt, std::vector<double>{0.5}, res, coll, {},
                            {}, w_data);
  CHECK(evaluate(p3.total, b) == doctest::Approx(0.25).epsilon(1e-15));

  // perfect data fit -> zero loss
  LossParts p4 = total_loss(g, u, in, one_pt, std::vector<double>{0.0}, res, coll, {},
                            {}, w_data);
  CHECK(evaluate(p4.total, b) == 0.0);

  CHECK_THROWS_AS(total_loss(g, u, in, {}, {}, res, coll, {}, {}, w_data),
                  EmptyBatch);
  LossWeights w_bc{0.0, 0.0, 1.0, 0.0};
  CHECK_THROWS_AS(total_loss(g, u, in, data, std::vector<double>{0.0, 0.0}, res, coll,
                             {}, {}, w_bc),
                  EmptyBatch);
}

TEST_CASE("total_loss: closed-form solutions drive the physics terms to zero") {
  // oscillator: all terms, including both initial conditions
  {
    PdeProblem p = make_problem("oscillator");
    Graph g;
    Expr t = g.variable("t");
    Expr in[] = {t};
    Expr u = analytic_oscillator_expr(g, t, p.meta.at("m"), p.meta.at("mu"),
                                      p.meta.at("k"));
    Expr res = p.residual(g, u, in, {});
    std::vector<TermBatch> ic;
    for (const auto& term : p.ic) {
      Expr lhs = term.deriv_var.empty() ? u : g.derive(u, t);
      ic.push_back({lhs - term.target(g, in, {}), {{0.0}}});
    }
    PointMatrix coll = sample_collocation({{0.0, 1.5}}, 128, 5, SampleMode::UniformRandom);
    PointMatrix data = {{0.1}};
    LossWeights w{0.0, 1.0, 0.0, 1.0};
    LossParts parts = total_loss(g, u, in, data, std::vector<double>{0.0}, res, coll,
                                 {}, ic, w);
    Binding b(g);
    CHECK(evaluate(parts.total, b) < 1e-5 * (w.pde + w.bc + w.ic));
  }
  // transport: inlet and far boundary; the closed form is singular at t=0,
  // so the initial term is left out of this check
  {
    PdeProblem p = make_problem("advection_dispersion");
    const double C0 = p.meta.at("C0"), v = p.meta.at("v"), D = p.meta.at("D");
    Graph g;
    Expr x = g.variable("x"), t = g.variable("t");
    Expr in[] = {x, t};
    Expr u = analytic_advection_dispersion_expr(g, x, t, C0, v, D);
    Expr res = p.residual(g, u, in, {});
    std::vector<TermBatch> bc;
    for (const auto& term : p.bc) {
      Expr r = u - term.target(g, in, {});
      PointMatrix pts;
      const double xpin = term.pinned.at("x");
      for (int i = 1; i <= 32; ++i) pts.push_back({xpin, 100.0 * i / 32.0});
      bc.push_back({r, std::move(pts)});
    }
    PointMatrix coll =
        sample_collocation({{0.0, 1.0}, {0.0, 100.0}}, 256, 6, SampleMode::UniformRandom);
    PointMatrix data = {{0.1, 1.0}};
    LossWeights w{0.0, 1.0, 1.0, 0.0};
    LossParts parts = total_loss(g, u, in, data, std::vector<double>{0.0}, res, coll,
                                 bc, {}, w);
    Binding b(g);
    CHECK(evaluate(parts.total, b) < 1e-5 * (w.pde + w.bc + w.ic));
  }
}

TEST_CASE("total_loss: nonnegative and homogeneous in the weights") {
  NetworkSpec spec;
  spec.input_vars = {"t"};
  spec.hidden_widths = {4};
  spec.activation_map = {{"tanh", "tanh", "cos", "exp"}};

  Graph g;
  auto params = make_param_vars(spec, g);
  Expr t = g.variable("t");
  Expr in[] = {t};
  Expr u = forward(spec, g, params, in);
  Expr res = residual_oscillator(g, u, t, 1.0, 4.0, 400.0);
  PointMatrix data = {{0.1}, {0.3}, {0.5}};
  std::vector<double> targets = {0.9, -0.2, 0.4};
  PointMatrix coll = {{0.15}, {0.25}, {0.4}, {0.7}};

  LossWeights w1{1.0, 1.0, 0.0, 0.0};
  LossWeights w3{3.0, 3.0, 0.0, 0.0};
  LossParts a = total_loss(g, u, in, data, targets, res, coll, {}, {}, w1);
  LossParts c = total_loss(g, u, in, data, targets, res, coll, {}, {}, w3);

  std::vector<VarId> theta;
  for (const Expr& pv : params) theta.push_back(g.var_id(pv));
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    Binding b(g);
    for (const Expr& pv : params)
      b.set(g.var_id(pv), testsup::uniform(rng, -0.8, 0.8));
    const double la = evaluate(a.total, b);
    const double lc = evaluate(c.total, b);
    CHECK(la >= 0.0);
    CHECK(lc == doctest::Approx(3.0 * la).epsilon(1e-12));
    auto ga = gradient(a.total, theta, b);
    auto gc = gradient(c.total, theta, b);
    for (std::size_t i = 0; i < theta.size(); ++i)
      CHECK(gc[i] == doctest::Approx(3.0 * ga[i]).epsilon(1e-9));
  }
}

TEST_CASE("sample_collocation: grid, determinism, membership") {
  PointMatrix grid = sample_collocation({{0.0, 1.0}}, 3, 0, SampleMode::Grid);
  REQUIRE(grid.size() == 3);
  CHECK(grid[0][0] == 0.0);
  CHECK(grid[1][0] == 0.5);
  CHECK(grid[2][0] == 1.0);

  PointMatrix u1 = sample_collocation({{0.0, 1.0}, {0.0, 100.0}}, 1000, 42,
                                      SampleMode::UniformRandom);
  PointMatrix u2 = sample_collocation({{0.0, 1.0}, {0.0, 100.0}}, 1000, 42,
                                      SampleMode::UniformRandom);
  CHECK(u1 == u2);
  for (const auto& pt : u1) {
    CHECK(pt[0] > 0.0);
    CHECK(pt[0] < 1.0);
    CHECK(pt[1] > 0.0);
    CHECK(pt[1] < 100.0);
  }

  PointMatrix g22 = sample_grid({{0.0, 1.0}, {0.0, 2.0}}, {3, 2});
  CHECK(g22.size() == 6);

  CHECK_THROWS_AS(sample_collocation({{1.0, 0.0}}, 5, 0, SampleMode::Grid),
                  InvalidRange);
  CHECK_THROWS_AS(sample_collocation({{0.0, 1.0}}, 0, 0, SampleMode::Grid),
                  InvalidRange);
}

TEST_CASE("problem registry: names, metas, unknown overrides") {
  std::set<std::string> names;
  for (const auto& n : problem_names()) names.insert(n);
  CHECK(names == std::set<std::string>{"oscillator", "advection_dispersion",
                                       "diffusion_hetx", "diffusion_hetxt",
                                       "diffusion_inverse", "laplace_inverse"});
  PdeProblem p = make_problem("oscillator", {{"mu", 2.0}});
  CHECK(p.meta.at("mu") == 2.0);
  CHECK_THROWS_AS(make_problem("oscillator", {{"bogus", 1.0}}), ConfigError);
  CHECK_THROWS_AS(make_problem("burgers"), ConfigError);

  PdeProblem inv = make_problem("diffusion_inverse");
  CHECK(inv.unknowns == std::vector<std::string>{"lambda1", "lambda2"});
  CHECK(inv.unknown_truth[0] == 0.30);
}
