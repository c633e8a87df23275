#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pafnet/activations.hpp"
#include "test_support.hpp"

using namespace pafnet;
using namespace pafnet::ad;

namespace {

struct Built {
  Graph g;
  Expr z, x_aux, t_aux;
  Expr out;
};

// builds one catalog activation over variable z with fixed-variable aux
Expr build_for(Graph& g, const ActivationKind& kind, Expr z, Expr x_aux, Expr t_aux,
               bool guard) {
  std::vector<Expr> aux;
  for (const auto& name : kind.aux) aux.push_back(name == "t" ? t_aux : x_aux);
  std::vector<Expr> params;
  for (std::size_t i = 0; i < kind.trainable_params.size(); ++i)
    params.push_back(g.constant(1.0));
  return build_activation(kind, z, aux, params, guard);
}

}  // namespace

TEST_CASE("catalog: names and arities") {
  const char* expected[] = {"linear", "tanh",  "sigmoid",      "relu",
                            "softmax", "cos",  "exp",          "erfc_adv",
                            "exp_erfc_adv",    "logx2",        "invx2",
                            "expx",    "expt", "paf_d",        "paf_laplace"};
  for (const char* name : expected) CHECK(is_activation_name(name));
  CHECK_FALSE(is_activation_name("swish"));

  for (const auto& k : activation_catalog()) {
    if (!k.is_paf) CHECK(k.trainable_params.empty());
  }
  CHECK(activation_by_name("erfc_adv").aux == std::vector<std::string>{"x"});
  CHECK(activation_by_name("expt").aux == std::vector<std::string>{"t"});
  CHECK(activation_by_name("paf_d").trainable_params.size() == 2);
  CHECK(activation_by_name("paf_laplace").trainable_params.size() == 1);
  CHECK_THROWS_AS(activation_by_name("swish"), ConfigError);
}

TEST_CASE("catalog values at reference points") {
  Graph g;
  Expr z = g.variable("z");
  Expr x = g.variable("x");
  Binding b(g);

  b.set(g.var_id(z), 0.0);
  CHECK(evaluate(build_activation(activation_by_name("cos"), z, {}, {}), b) == 1.0);
  CHECK(evaluate(build_activation(activation_by_name("invx2"), z, {}, {}), b) ==
        doctest::Approx(5.0).epsilon(1e-14));

  // raw (unguarded) erfc activation at x=0, z=1 -> erfc(-1/2)
  Expr xs[] = {x};
  Expr raw = build_activation(activation_by_name("erfc_adv"), z, xs, {}, false);
  b.set(g.var_id(z), 1.0);
  b.set(g.var_id(x), 0.0);
  CHECK(evaluate(raw, b) ==
        doctest::Approx(testsup::erfc_oracle(-0.5)).epsilon(1e-12));

  // formulas with trainable parameters at omega = 1
  Expr one = g.constant(1.0);
  Expr params2[] = {one, one};
  Expr pd = build_activation(activation_by_name("paf_d"), z, {}, params2);
  b.set(g.var_id(z), 2.0);
  CHECK(evaluate(pd, b) == doctest::Approx(0.01 * (4.0 + 1.0)).epsilon(1e-14));
  Expr params1[] = {one};
  Expr pl = build_activation(activation_by_name("paf_laplace"), z, {}, params1);
  CHECK(evaluate(pl, b) == doctest::Approx(6.0 * std::sin(3.0)).epsilon(1e-14));
}

TEST_CASE("guard_domain: softplus surrogate") {
  Graph g;
  Expr z = g.variable("z");
  Expr guarded = guard_domain(z);
  Binding b(g);

  b.set(g.var_id(z), -5.0);
  CHECK(evaluate(guarded, b) ==
        doctest::Approx(std::log1p(std::exp(-5.0)) + 1e-6).epsilon(1e-14));
  CHECK(evaluate(guarded, b) == doctest::Approx(0.0067).epsilon(1e-2));

  // softplus reaches its identity asymptote within 1e-8 by z=20; the
  // full guard keeps its fixed 1e-6 shift
  b.set(g.var_id(z), 20.0);
  CHECK(std::fabs(evaluate(guarded, b) - (20.0 + 1e-6)) < 1e-8);
  CHECK(std::fabs(evaluate(guarded, b) - 20.0) < 2e-6);
}

TEST_CASE("guarded erfc activations stay finite on the scan grid") {
  Graph g;
  Expr z = g.variable("z");
  Expr x = g.variable("x");
  Expr xs[] = {x};
  for (const char* name : {"erfc_adv", "exp_erfc_adv"}) {
    Expr act = build_activation(activation_by_name(name), z, xs, {});
    Session s(g, act);
    Binding b(g);
    for (int i = 0; i < 201; ++i) {
      b.set(g.var_id(z), -10.0 + 20.0 * i / 200.0);
      for (int j = 0; j < 201; ++j) {
        b.set(g.var_id(x), 2.0 * j / 200.0);
        s.forward(b);
        CHECK(std::isfinite(s.value(act)));
      }
    }
  }
}

TEST_CASE("no activation goes non-finite over z in [-100, 100] with guard on") {
  Graph g;
  Expr z = g.variable("z");
  Expr x = g.variable("x");
  Expr t = g.variable("t");
  Binding b(g);
  b.set(g.var_id(x), 1.7);    // inside the x 0..2 range
  b.set(g.var_id(t), 250.0);  // inside the t 0..300 range
  for (const auto& kind : activation_catalog()) {
    if (kind.layer_group) continue;
    Expr act = build_for(g, kind, z, x, t, true);
    Session s(g, act);
    for (int i = 0; i <= 400; ++i) {
      b.set(g.var_id(z), -100.0 + 200.0 * i / 400.0);
      s.forward(b);
      CAPTURE(kind.name);
      CHECK(std::isfinite(s.value(act)));
    }
  }
}

TEST_CASE("property: every catalog entry differentiates like its FD") {
  std::mt19937_64 rng(5);
  Graph g;
  Expr z = g.variable("z");
  Expr x = g.variable("x");
  Expr t = g.variable("t");
  for (const auto& kind : activation_catalog()) {
    if (kind.layer_group) continue;
    CAPTURE(kind.name);
    Expr act = build_for(g, kind, z, x, t, true);
    Expr dact = g.derive(act, z);
    for (int i = 0; i < 100; ++i) {
      double at = testsup::uniform(rng, -3.0, 3.0);
      if (kind.name == "relu" && std::fabs(at) < 0.1) at += 0.2;  // kink margin
      Binding b(g);
      b.set(g.var_id(z), at);
      b.set(g.var_id(x), testsup::uniform(rng, 0.0, 2.0));
      b.set(g.var_id(t), testsup::uniform(rng, 0.0, 300.0));
      const double sym = evaluate(dact, b);
      const double fd = testsup::central_fd(act, g.var_id(z), b, at, 1e-5);
      CHECK(std::fabs(sym - fd) / std::max(1.0, std::fabs(fd)) < 1e-6);
    }
  }
}

TEST_CASE("cos activation is 2pi-periodic; exp stays positive") {
  std::mt19937_64 rng(9);
  Graph g;
  Expr z = g.variable("z");
  Expr c = build_activation(activation_by_name("cos"), z, {}, {});
  Expr e = build_activation(activation_by_name("exp"), z, {}, {});
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < 50; ++i) {
    const double at = testsup::uniform(rng, -10.0, 10.0);
    Binding b(g);
    b.set(g.var_id(z), at);
    const double v0 = evaluate(c, b);
    CHECK(evaluate(e, b) > 0.0);
    b.set(g.var_id(z), at + two_pi);
    CHECK(std::fabs(evaluate(c, b) - v0) < 1e-12);
  }
}

TEST_CASE("softmax group normalizes over exactly its members") {
  Graph g;
  Expr z0 = g.variable("z0"), z1 = g.variable("z1"), z2 = g.variable("z2");
  Expr zs[] = {z0, z1, z2};
  auto sm = build_softmax_group(zs);
  REQUIRE(sm.size() == 3);
  Binding b(g);
  b.set(g.var_id(z0), 0.3);
  b.set(g.var_id(z1), -1.2);
  b.set(g.var_id(z2), 2.0);
  double sum = 0.0;
  for (const Expr& s : sm) {
    const double v = evaluate(s, b);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
    sum += v;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("arity errors") {
  Graph g;
  Expr z = g.variable("z");
  CHECK_THROWS_AS(build_activation(activation_by_name("erfc_adv"), z, {}, {}),
                  ArityMismatch);
  CHECK_THROWS_AS(build_activation(activation_by_name("paf_d"), z, {}, {}),
                  ArityMismatch);
  Expr aux[] = {z};
  CHECK_THROWS_AS(build_activation(activation_by_name("tanh"), z, aux, {}),
                  ArityMismatch);
  CHECK_THROWS_AS(build_activation(activation_by_name("softmax"), z, {}, {}),
                  ArityMismatch);
  CHECK_THROWS_AS(build_softmax_group({}), ArityMismatch);
}
