#include "pafnet/activations.hpp"

#include "pafnet/errors.hpp"

namespace pafnet {

using ad::Expr;

const std::vector<ActivationKind>& activation_catalog() {
  static const std::vector<ActivationKind> catalog = [] {
    std::vector<ActivationKind> v;
    auto standard = [&](const std::string& name) {
      v.push_back({name, {}, {}, false, false, false});
    };
    standard("linear");
    standard("tanh");
    standard("sigmoid");
    standard("relu");
    v.push_back({"softmax", {}, {}, false, false, true});

    auto paf = [&](const std::string& name, std::vector<std::string> aux,
                   std::vector<std::string> params, bool restricted) {
      v.push_back({name, std::move(aux), std::move(params), true, restricted, false});
    };
    paf("cos", {}, {}, false);
    paf("exp", {}, {}, false);
    paf("erfc_adv", {"x"}, {}, true);
    paf("exp_erfc_adv", {"x"}, {}, true);
    paf("logx2", {}, {}, false);
    paf("invx2", {}, {}, false);
    paf("expx", {"x"}, {}, false);
    paf("expt", {"t"}, {}, false);
    paf("paf_d", {}, {"omega1", "omega2"}, false);
    paf("paf_laplace", {}, {"omega1"}, false);
    return v;
  }();
  return catalog;
}

const ActivationKind& activation_by_name(const std::string& name) {
  for (const auto& k : activation_catalog())
    if (k.name == name) return k;
  throw ConfigError("unknown activation '" + name + "'");
}

bool is_activation_name(const std::string& name) {
  for (const auto& k : activation_catalog())
    if (k.name == name) return true;
  return false;
}

Expr guard_domain(ad::Expr z) {
  ad::Graph& g = z.graph();
  // softplus(z) + 1e-6, spelled with engine ops so derivatives are exact
  return g.log(1.0 + g.exp(z)) + 1e-6;
}

Expr build_activation(const ActivationKind& kind, Expr z,
                      std::span<const Expr> aux, std::span<const Expr> params,
                      bool guard) {
  if (aux.size() != kind.aux.size())
    throw ArityMismatch("activation '" + kind.name + "' expects " +
                        std::to_string(kind.aux.size()) + " auxiliary inputs, got " +
                        std::to_string(aux.size()));
  if (params.size() != kind.trainable_params.size())
    throw ArityMismatch("activation '" + kind.name + "' expects " +
                        std::to_string(kind.trainable_params.size()) +
                        " trainable parameters, got " + std::to_string(params.size()));
  if (kind.layer_group)
    throw ArityMismatch("activation '" + kind.name +
                        "' normalizes over a layer group; use build_softmax_group");

  ad::Graph& g = z.graph();

  if (kind.name == "linear") return z;
  if (kind.name == "tanh") return g.tanh(z);
  if (kind.name == "sigmoid") return 1.0 / (1.0 + g.exp(-z));
  if (kind.name == "relu") return z * g.step(z);
  if (kind.name == "cos") return g.cos(z);
  if (kind.name == "exp") return g.exp(z);
  if (kind.name == "erfc_adv") {
    Expr x = aux[0];
    Expr zz = (kind.restricted_domain && guard) ? guard_domain(z) : z;
    return g.erfc((x - zz) / (2.0 * g.sqrt(zz)));
  }
  if (kind.name == "exp_erfc_adv") {
    Expr x = aux[0];
    Expr zz = (kind.restricted_domain && guard) ? guard_domain(z) : z;
    return g.exp(x) * g.erfc((x + zz) / (2.0 * g.sqrt(zz)));
  }
  if (kind.name == "logx2") return 0.3 * z + g.log(z * z + 1.5);
  if (kind.name == "invx2") return 0.2 * ad::pow_int(1.0 / (z * z + 0.2), 2);
  if (kind.name == "expx") {
    Expr x = aux[0];
    return 0.02 * g.exp(-ad::pow_int(x + g.sin(z), 2));
  }
  if (kind.name == "expt") {
    Expr t = aux[0];
    return 0.02 * g.exp(-ad::pow_int(z + g.sin(t), 2));
  }
  if (kind.name == "paf_d") return 0.01 * (params[0] * z * z + params[1]);
  if (kind.name == "paf_laplace") return 3.0 * z * g.sin(z + params[0]);

  throw ConfigError("unknown activation '" + kind.name + "'");
}

std::vector<Expr> build_softmax_group(std::span<const Expr> zs) {
  if (zs.empty()) throw ArityMismatch("softmax group must have at least one neuron");
  ad::Graph& g = zs[0].graph();
  std::vector<Expr> exps;
  exps.reserve(zs.size());
  for (const Expr& z : zs) exps.push_back(g.exp(z));
  Expr denom = exps[0];
  for (std::size_t i = 1; i < exps.size(); ++i) denom = denom + exps[i];
  std::vector<Expr> out;
  out.reserve(zs.size());
  for (const Expr& e : exps) out.push_back(e / denom);
  return out;
}

}  // namespace pafnet
