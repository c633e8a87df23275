#pragma once

// Shared test-only oracles and generators. These stay independent of the
// library's own evaluation paths: erfc comes from a Maclaurin series, and
// derivatives are checked against central finite differences of evaluate().

#include <cmath>
#include <random>
#include <vector>

#include "pafnet/expr.hpp"

namespace testsup {

/// erf via its Maclaurin series in long double (60 terms); good to ~1e-17
/// for |x| <= 3. erfc(-x) = 2 - erfc(x) extends the usable range.
inline long double erf_series(long double x) {
  const long double two_over_sqrt_pi = 1.12837916709551257389615890312154517L;
  long double term = x;  // x^(2n+1) / n!
  long double sum = 0.0L;
  for (int n = 0; n < 60; ++n) {
    sum += term / (2 * n + 1);
    term *= -x * x / (n + 1);
  }
  return two_over_sqrt_pi * sum;
}

inline double erfc_oracle(double x) {
  return static_cast<double>(1.0L - erf_series(static_cast<long double>(x)));
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  return lo + (hi - lo) * u;
}

/// Random smooth expression over the given variables: composition of add,
/// sub, mul, sin, cos, tanh, bounded exp and a safe reciprocal, so that all
/// derivatives up to order 3 exist everywhere.
inline pafnet::ad::Expr random_expr(pafnet::ad::Graph& g,
                                    const std::vector<pafnet::ad::Expr>& vars,
                                    std::mt19937_64& rng, int depth) {
  using pafnet::ad::Expr;
  if (depth <= 0) {
    if (rng() % 3 == 0) return g.constant(uniform(rng, -2.0, 2.0));
    return vars[rng() % vars.size()];
  }
  auto sub = [&] { return random_expr(g, vars, rng, depth - 1); };
  switch (rng() % 8) {
    case 0: return sub() + sub();
    case 1: return sub() - sub();
    case 2: return sub() * sub();
    case 3: return g.sin(sub());
    case 4: return g.cos(sub());
    case 5: return g.tanh(sub());
    case 6: return g.exp(0.4 * g.tanh(sub()));
    default: return 1.0 / (2.0 + pafnet::ad::pow_int(g.tanh(sub()), 2));
  }
}

/// Central finite difference of `f` (an Expr in one designated variable set)
/// with respect to var, at the binding's current values.
inline double central_fd(pafnet::ad::Expr f, pafnet::ad::VarId var,
                         pafnet::ad::Binding bind, double at, double h) {
  bind.set(var, at + h);
  const double up = pafnet::ad::evaluate(f, bind);
  bind.set(var, at - h);
  const double dn = pafnet::ad::evaluate(f, bind);
  return (up - dn) / (2.0 * h);
}

}  // namespace testsup
