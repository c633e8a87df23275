#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pafnet/activations.hpp"
#include "pafnet/expr.hpp"

namespace pafnet {

/// Feed-forward MLP topology with a per-neuron activation map. Hidden layer k
/// (0-based) has hidden_widths[k] neurons; activation_map[k][i] names the
/// activation of neuron i in that layer. The single output neuron is linear.
struct NetworkSpec {
  std::vector<std::string> input_vars;
  std::vector<int> hidden_widths;
  std::vector<std::vector<std::string>> activation_map;
  int output_width = 1;
  bool guard_domains = true;
  std::vector<std::string> physics_unknowns;  // lambda names, joint segment

  void validate() const;
  std::size_t num_hidden_neurons() const;
  std::size_t num_paf_neurons() const;
  double paf_fraction() const;
  std::size_t num_omega() const;
  std::uint64_t hash() const;  // stable across runs; guards checkpoints
};

/// Single authoritative parameter count: sum_k (n_{k-1}+1)*n_k + |omega| + |lambda|.
std::size_t count_params(const NetworkSpec& spec);

/// Flat trainable vector theta = {w, b, omega, lambda} with canonical
/// per-entry names ("w1.0.2", "b3.1", "omega2.4.omega1", "lambda.lambda1").
struct ParamStore {
  std::vector<double> values;
  std::vector<std::string> names;
  std::size_t omega_offset = 0;
  std::size_t omega_count = 0;
  std::size_t lambda_offset = 0;
  std::size_t lambda_count = 0;

  std::size_t size() const { return values.size(); }
  std::span<const double> omegas() const {
    return {values.data() + omega_offset, omega_count};
  }
  std::span<const double> lambdas() const {
    return {values.data() + lambda_offset, lambda_count};
  }
  /// Index of a named entry; throws ConfigError if absent.
  std::size_t index_of(const std::string& name) const;
};

/// Glorot-uniform weights, zero biases, omega = 1, lambda from
/// `lambda_init` (one per spec.physics_unknowns). Deterministic per seed.
ParamStore init_params(const NetworkSpec& spec, std::uint64_t seed,
                       std::span<const double> lambda_init = {});

/// One graph variable per parameter, in ParamStore order.
std::vector<ad::Expr> make_param_vars(const NetworkSpec& spec, ad::Graph& g);

/// Scalar output expression of the network. `params` in ParamStore order
/// (variables during training, constants for frozen evaluation); `inputs`
/// aligned with spec.input_vars. PAF neurons receive their declared raw
/// inputs directly alongside z.
ad::Expr forward(const NetworkSpec& spec, ad::Graph& g,
                 std::span<const ad::Expr> params,
                 std::span<const ad::Expr> inputs);

}  // namespace pafnet
