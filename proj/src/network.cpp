#include "pafnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pafnet/errors.hpp"

namespace pafnet {

using ad::Expr;

void NetworkSpec::validate() const {
  if (input_vars.empty()) throw ConfigError("network needs at least one input");
  if (hidden_widths.empty()) throw ConfigError("network needs at least one hidden layer");
  if (output_width != 1) throw ConfigError("only single-output networks are supported");
  for (int w : hidden_widths)
    if (w < 1) throw ConfigError("hidden layer width must be positive");
  if (activation_map.size() != hidden_widths.size())
    throw ConfigError("activation map must cover every hidden layer");
  for (std::size_t k = 0; k < hidden_widths.size(); ++k) {
    if (activation_map[k].size() != static_cast<std::size_t>(hidden_widths[k]))
      throw ConfigError("activation map for layer " + std::to_string(k + 1) +
                        " must name exactly " + std::to_string(hidden_widths[k]) +
                        " neurons");
    for (const std::string& name : activation_map[k]) {
      const ActivationKind& kind = activation_by_name(name);
      for (const std::string& aux : kind.aux) {
        if (std::find(input_vars.begin(), input_vars.end(), aux) == input_vars.end())
          throw ConfigError("activation '" + name + "' needs auxiliary input '" +
                            aux + "' which is not a network input");
      }
    }
  }
}

std::size_t NetworkSpec::num_hidden_neurons() const {
  std::size_t n = 0;
  for (int w : hidden_widths) n += static_cast<std::size_t>(w);
  return n;
}

std::size_t NetworkSpec::num_paf_neurons() const {
  std::size_t n = 0;
  for (const auto& layer : activation_map)
    for (const auto& name : layer)
      if (activation_by_name(name).is_paf) ++n;
  return n;
}

double NetworkSpec::paf_fraction() const {
  return static_cast<double>(num_paf_neurons()) /
         static_cast<double>(num_hidden_neurons());
}

std::size_t NetworkSpec::num_omega() const {
  std::size_t n = 0;
  for (const auto& layer : activation_map)
    for (const auto& name : layer)
      n += activation_by_name(name).trainable_params.size();
  return n;
}

std::uint64_t NetworkSpec::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix_str = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  for (const auto& v : input_vars) mix_str(v);
  for (int w : hidden_widths) mix_str(std::to_string(w));
  for (const auto& layer : activation_map)
    for (const auto& a : layer) mix_str(a);
  mix_str(guard_domains ? "guard" : "noguard");
  for (const auto& u : physics_unknowns) mix_str(u);
  return h;
}

std::size_t count_params(const NetworkSpec& spec) {
  std::size_t n = 0;
  std::size_t prev = spec.input_vars.size();
  for (int w : spec.hidden_widths) {
    n += (prev + 1) * static_cast<std::size_t>(w);
    prev = static_cast<std::size_t>(w);
  }
  n += (prev + 1) * static_cast<std::size_t>(spec.output_width);
  n += spec.num_omega();
  n += spec.physics_unknowns.size();
  return n;
}

std::size_t ParamStore::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw ConfigError("unknown parameter '" + name + "'");
}

namespace {

// canonical theta order: per layer W (row-major) then b, then omega, then lambda
template <typename WeightFn, typename BiasFn, typename OmegaFn, typename LambdaFn>
void walk_params(const NetworkSpec& spec, WeightFn&& on_weight, BiasFn&& on_bias,
                 OmegaFn&& on_omega, LambdaFn&& on_lambda) {
  std::size_t prev = spec.input_vars.size();
  const std::size_t n_layers = spec.hidden_widths.size();
  for (std::size_t k = 0; k <= n_layers; ++k) {
    const std::size_t width = (k < n_layers)
                                  ? static_cast<std::size_t>(spec.hidden_widths[k])
                                  : static_cast<std::size_t>(spec.output_width);
    for (std::size_t i = 0; i < width; ++i)
      for (std::size_t j = 0; j < prev; ++j) on_weight(k + 1, i, j, prev, width);
    for (std::size_t i = 0; i < width; ++i) on_bias(k + 1, i);
    prev = width;
  }
  for (std::size_t k = 0; k < spec.activation_map.size(); ++k)
    for (std::size_t i = 0; i < spec.activation_map[k].size(); ++i) {
      const ActivationKind& kind = activation_by_name(spec.activation_map[k][i]);
      for (const std::string& p : kind.trainable_params) on_omega(k + 1, i, p);
    }
  for (const std::string& name : spec.physics_unknowns) on_lambda(name);
}

double uniform_pm(std::mt19937_64& rng, double bound) {
  // uniform in (-bound, bound), mapped from the top 53 bits
  const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  return (2.0 * u - 1.0) * bound;
}

}  // namespace

ParamStore init_params(const NetworkSpec& spec, std::uint64_t seed,
                       std::span<const double> lambda_init) {
  spec.validate();
  if (!lambda_init.empty() && lambda_init.size() != spec.physics_unknowns.size())
    throw ShapeMismatch("lambda_init length does not match physics_unknowns");

  ParamStore store;
  store.values.reserve(count_params(spec));
  store.names.reserve(count_params(spec));
  std::mt19937_64 rng(seed);

  walk_params(
      spec,
      [&](std::size_t layer, std::size_t i, std::size_t j, std::size_t n_in,
          std::size_t n_out) {
        const double bound = std::sqrt(6.0 / static_cast<double>(n_in + n_out));
        store.values.push_back(uniform_pm(rng, bound));
        store.names.push_back("w" + std::to_string(layer) + "." + std::to_string(i) +
                              "." + std::to_string(j));
      },
      [&](std::size_t layer, std::size_t i) {
        store.values.push_back(0.0);
        store.names.push_back("b" + std::to_string(layer) + "." + std::to_string(i));
      },
      [&](std::size_t layer, std::size_t i, const std::string& p) {
        store.values.push_back(1.0);
        store.names.push_back("omega" + std::to_string(layer) + "." +
                              std::to_string(i) + "." + p);
      },
      [&](const std::string& name) {
        store.values.push_back(0.0);
        store.names.push_back("lambda." + name);
      });

  store.omega_count = spec.num_omega();
  store.lambda_count = spec.physics_unknowns.size();
  store.lambda_offset = store.values.size() - store.lambda_count;
  store.omega_offset = store.lambda_offset - store.omega_count;
  for (std::size_t i = 0; i < lambda_init.size(); ++i)
    store.values[store.lambda_offset + i] = lambda_init[i];
  return store;
}

std::vector<Expr> make_param_vars(const NetworkSpec& spec, ad::Graph& g) {
  // variable names must match ParamStore order; reuse the init walk
  ParamStore layout = init_params(spec, 0);
  std::vector<Expr> vars;
  vars.reserve(layout.size());
  for (const std::string& name : layout.names) vars.push_back(g.variable(name));
  return vars;
}

Expr forward(const NetworkSpec& spec, ad::Graph& g, std::span<const Expr> params,
             std::span<const Expr> inputs) {
  spec.validate();
  if (params.size() != count_params(spec))
    throw ShapeMismatch("expected " + std::to_string(count_params(spec)) +
                        " parameters, got " + std::to_string(params.size()));
  if (inputs.size() != spec.input_vars.size())
    throw ShapeMismatch("expected " + std::to_string(spec.input_vars.size()) +
                        " inputs, got " + std::to_string(inputs.size()));
  for (const Expr& e : params)
    if (e.graph_ptr() != &g) throw ShapeMismatch("parameter from a different graph");
  for (const Expr& e : inputs)
    if (e.graph_ptr() != &g) throw ShapeMismatch("input from a different graph");

  auto aux_input = [&](const std::string& name) -> Expr {
    for (std::size_t i = 0; i < spec.input_vars.size(); ++i)
      if (spec.input_vars[i] == name) return inputs[i];
    throw ConfigError("auxiliary input '" + name + "' missing");  // validate() catches earlier
  };

  std::size_t w_cursor = 0;  // consumes weights/biases in canonical order
  std::size_t omega_cursor = count_params(spec) - spec.num_omega() -
                             spec.physics_unknowns.size();

  std::vector<Expr> prev(inputs.begin(), inputs.end());
  const std::size_t n_layers = spec.hidden_widths.size();
  for (std::size_t k = 0; k <= n_layers; ++k) {
    const std::size_t width = (k < n_layers)
                                  ? static_cast<std::size_t>(spec.hidden_widths[k])
                                  : static_cast<std::size_t>(spec.output_width);
    std::vector<Expr> z(width);
    for (std::size_t i = 0; i < width; ++i) {
      Expr acc = params[w_cursor++] * prev[0];
      for (std::size_t j = 1; j < prev.size(); ++j)
        acc = acc + params[w_cursor++] * prev[j];
      z[i] = acc;  // bias added below once all weights are consumed
    }
    for (std::size_t i = 0; i < width; ++i) z[i] = z[i] + params[w_cursor++];

    if (k == n_layers) return z[0];  // linear output neuron

    std::vector<Expr> act(width);
    std::vector<std::size_t> softmax_members;
    for (std::size_t i = 0; i < width; ++i) {
      const ActivationKind& kind = activation_by_name(spec.activation_map[k][i]);
      if (kind.layer_group) {
        softmax_members.push_back(i);
        continue;
      }
      std::vector<Expr> aux;
      for (const std::string& name : kind.aux) aux.push_back(aux_input(name));
      std::vector<Expr> omegas;
      for (std::size_t p = 0; p < kind.trainable_params.size(); ++p)
        omegas.push_back(params[omega_cursor++]);
      act[i] = build_activation(kind, z[i], aux, omegas, spec.guard_domains);
    }
    if (!softmax_members.empty()) {
      std::vector<Expr> zs;
      for (std::size_t i : softmax_members) zs.push_back(z[i]);
      std::vector<Expr> sm = build_softmax_group(zs);
      for (std::size_t m = 0; m < softmax_members.size(); ++m)
        act[softmax_members[m]] = sm[m];
    }
    prev = std::move(act);
  }
  throw Error("unreachable");
}

}  // namespace pafnet
