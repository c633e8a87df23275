#include "pafnet/optim.hpp"

#include <cmath>
#include <limits>

#include "pafnet/errors.hpp"

namespace pafnet {

void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw LengthMismatch("adam_step: parameter/gradient/state lengths differ");
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double gi = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * gi;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * gi * gi;
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Probe {
  double phi = kInf;    // f(x + alpha d); +inf if evaluation failed
  double dphi = kInf;   // directional derivative at the trial point
};

// Evaluates along the ray; exceptions and non-finite values become +inf so
// the line search backs away from infeasible regions.
class RayEval {
public:
  RayEval(const std::vector<double>& x0, const std::vector<double>& dir,
          const LossGradFn& f)
      : x0_(x0), dir_(dir), f_(f), trial_(x0.size()), grad_(x0.size()) {}

  Probe at(double alpha) {
    for (std::size_t i = 0; i < x0_.size(); ++i)
      trial_[i] = x0_[i] + alpha * dir_[i];
    Probe p;
    try {
      const double loss = f_(trial_, grad_);
      if (!std::isfinite(loss)) return p;
      p.phi = loss;
      p.dphi = dot(grad_, dir_);
    } catch (const Error&) {
      // out-of-domain trial point
    }
    return p;
  }

  const std::vector<double>& trial() const { return trial_; }
  const std::vector<double>& grad() const { return grad_; }

private:
  const std::vector<double>& x0_;
  const std::vector<double>& dir_;
  const LossGradFn& f_;
  std::vector<double> trial_;
  std::vector<double> grad_;
};

}  // namespace

double lbfgs_step(LbfgsState& state, std::vector<double>& params,
                  const LossGradFn& f) {
  const std::size_t n = params.size();
  state.grad.resize(n);
  const double f0 = f(params, state.grad);
  if (!std::isfinite(f0)) throw NonFiniteLoss("lbfgs_step: loss is not finite");
  for (double gi : state.grad)
    if (!std::isfinite(gi)) throw NonFiniteLoss("lbfgs_step: gradient is not finite");

  const std::vector<double> g0 = state.grad;
  const double gnorm2 = dot(g0, g0);
  if (gnorm2 == 0.0) {
    state.have_prev = true;
    state.prev_loss = f0;
    return f0;  // already at a stationary point
  }

  // two-loop recursion
  std::vector<double> d(g0.begin(), g0.end());
  std::vector<double> alpha_hist(state.pairs.size());
  for (std::size_t i = state.pairs.size(); i-- > 0;) {
    const auto& [s, y] = state.pairs[i];
    const double rho = 1.0 / dot(s, y);
    const double a = rho * dot(s, d);
    alpha_hist[i] = a;
    for (std::size_t k = 0; k < n; ++k) d[k] -= a * y[k];
  }
  if (!state.pairs.empty()) {
    const auto& [s, y] = state.pairs.back();
    const double gamma = dot(s, y) / dot(y, y);
    for (double& v : d) v *= gamma;
  }
  for (std::size_t i = 0; i < state.pairs.size(); ++i) {
    const auto& [s, y] = state.pairs[i];
    const double rho = 1.0 / dot(s, y);
    const double beta = rho * dot(y, d);
    for (std::size_t k = 0; k < n; ++k) d[k] += (alpha_hist[i] - beta) * s[k];
  }
  for (double& v : d) v = -v;

  double dphi0 = dot(g0, d);
  if (dphi0 >= 0.0) {
    // curvature information is stale; fall back to steepest descent direction
    state.pairs.clear();
    for (std::size_t k = 0; k < n; ++k) d[k] = -g0[k];
    dphi0 = -gnorm2;
  }

  // strong Wolfe line search (bracket + zoom)
  RayEval ray(params, d, f);
  const double phi0 = f0;
  int evals = 0;

  auto accept = [&](double alpha, const Probe& p) {
    std::vector<double> s(n), y(n);
    for (std::size_t k = 0; k < n; ++k) {
      s[k] = alpha * d[k];
      y[k] = ray.grad()[k] - g0[k];
    }
    params = ray.trial();
    state.grad = ray.grad();
    if (dot(s, y) > state.curvature_floor) {
      state.pairs.emplace_back(std::move(s), std::move(y));
      while (state.pairs.size() > static_cast<std::size_t>(state.history))
        state.pairs.pop_front();
    }
    state.have_prev = true;
    state.prev_loss = p.phi;
    return p.phi;
  };

  auto zoom = [&](double lo, double philo, double dphilo, double hi,
                  double phihi) -> double {
    for (; evals < state.max_linesearch; ++evals) {
      // quadratic interpolation, safeguarded by bisection
      double alpha;
      const double denom = 2.0 * (phihi - philo - dphilo * (hi - lo));
      if (denom != 0.0 && std::isfinite(phihi)) {
        alpha = lo - dphilo * (hi - lo) * (hi - lo) / denom;
        const double lo_ = std::min(lo, hi), hi_ = std::max(lo, hi);
        const double margin = 0.1 * (hi_ - lo_);
        if (!(alpha > lo_ + margin && alpha < hi_ - margin))
          alpha = 0.5 * (lo + hi);
      } else {
        alpha = 0.5 * (lo + hi);
      }
      const Probe p = ray.at(alpha);
      if (p.phi > phi0 + state.c1 * alpha * dphi0 || p.phi >= philo) {
        hi = alpha;
        phihi = p.phi;
      } else {
        if (std::fabs(p.dphi) <= -state.c2 * dphi0) return accept(alpha, p);
        if (p.dphi * (hi - lo) >= 0.0) {
          hi = lo;
          phihi = philo;
        }
        lo = alpha;
        philo = p.phi;
        dphilo = p.dphi;
      }
      if (std::fabs(hi - lo) < 1e-16 * std::max(1.0, std::fabs(lo))) break;
    }
    throw LineSearchFailed("zoom exhausted without a strong-Wolfe point");
  };

  double alpha_prev = 0.0, phi_prev = phi0, dphi_prev = dphi0;
  double alpha = 1.0;
  for (; evals < state.max_linesearch; ++evals) {
    const Probe p = ray.at(alpha);
    if (p.phi > phi0 + state.c1 * alpha * dphi0 || (evals > 0 && p.phi >= phi_prev))
      return zoom(alpha_prev, phi_prev, dphi_prev, alpha, p.phi);
    if (std::fabs(p.dphi) <= -state.c2 * dphi0) return accept(alpha, p);
    if (p.dphi >= 0.0) return zoom(alpha, p.phi, p.dphi, alpha_prev, phi_prev);
    alpha_prev = alpha;
    phi_prev = p.phi;
    dphi_prev = p.dphi;
    alpha *= 2.0;
  }
  throw LineSearchFailed("no strong-Wolfe step within max_linesearch trials");
}

double steepest_descent_step(std::vector<double>& params, const LossGradFn& f,
                             int max_backtracks) {
  const std::size_t n = params.size();
  std::vector<double> g(n);
  const double f0 = f(params, g);
  if (!std::isfinite(f0)) throw NonFiniteLoss("steepest_descent_step: loss not finite");
  const double gnorm2 = dot(g, g);
  if (gnorm2 == 0.0) return f0;

  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = -g[k];
  RayEval ray(params, d, f);
  double alpha = 1.0 / std::max(1.0, std::sqrt(gnorm2));
  for (int i = 0; i < max_backtracks; ++i) {
    const Probe p = ray.at(alpha);
    if (p.phi <= f0 - 1e-4 * alpha * gnorm2) {
      params = ray.trial();
      return p.phi;
    }
    alpha *= 0.5;
  }
  return f0;  // no descent found; keep current point
}

}  // namespace pafnet
