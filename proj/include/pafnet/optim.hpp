#pragma once

#include <deque>
#include <functional>
#include <span>
#include <vector>

namespace pafnet {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
  double lr;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState(std::size_t n, double learning_rate)
      : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

/// Standard bias-corrected Adam update; mutates state and params in place.
void adam_step(AdamState& state, std::span<double> params,
               std::span<const double> grads);

/// Evaluates loss and writes the gradient for the given parameters.
using LossGradFn =
    std::function<double(std::span<const double> params, std::span<double> grad)>;

struct LbfgsState {
  int history = 10;
  double c1 = 1e-4;   // sufficient decrease
  double c2 = 0.9;    // curvature
  int max_linesearch = 25;
  double curvature_floor = 1e-10;  // s.y filter

  std::deque<std::pair<std::vector<double>, std::vector<double>>> pairs;  // (s, y)
  bool have_prev = false;
  double prev_loss = 0.0;
  std::vector<double> grad;  // gradient at current params
};

/// One L-BFGS iteration: two-loop-recursion direction, strong-Wolfe step,
/// curvature-filtered history update. Returns the new loss (<= previous on
/// every accepted step). Throws LineSearchFailed when no Wolfe step exists
/// within max_linesearch trials (caller falls back, e.g. to
/// steepest_descent_step), NonFiniteLoss when the evaluator returns a
/// non-finite value at the current point.
double lbfgs_step(LbfgsState& state, std::vector<double>& params,
                  const LossGradFn& f);

/// Backtracking steepest-descent fallback (Armijo). Returns the new loss.
double steepest_descent_step(std::vector<double>& params, const LossGradFn& f,
                             int max_backtracks = 40);

}  // namespace pafnet
