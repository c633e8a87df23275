#pragma once

#include <span>
#include <string>
#include <vector>

#include "pafnet/expr.hpp"

namespace pafnet {

/// One entry of the activation catalog. `aux` names the raw network inputs
/// the activation consumes besides its pre-activation z (wired past the
/// hidden layers); `trainable_params` names its own trainable parameters.
struct ActivationKind {
  std::string name;
  std::vector<std::string> aux;
  std::vector<std::string> trainable_params;
  bool is_paf = false;
  bool restricted_domain = false;  // requires z > 0; see guard_domain
  bool layer_group = false;        // softmax: built over the declaring group
};

const std::vector<ActivationKind>& activation_catalog();
const ActivationKind& activation_by_name(const std::string& name);
bool is_activation_name(const std::string& name);

/// Smooth surrogate mapping R -> (0, inf): softplus(z) + 1e-6. Substituted
/// for z inside restricted subterms when guarding is enabled.
ad::Expr guard_domain(ad::Expr z);

/// Output expression of a single neuron's activation. `guard` controls the
/// domain remedy for restricted kinds; with it off, evaluation outside the
/// domain throws DomainViolation. Layer-group kinds (softmax) are rejected
/// here; use build_softmax_group.
ad::Expr build_activation(const ActivationKind& kind, ad::Expr z,
                          std::span<const ad::Expr> aux,
                          std::span<const ad::Expr> params, bool guard = true);

/// Softmax over exactly the neurons of a layer that declare it.
std::vector<ad::Expr> build_softmax_group(std::span<const ad::Expr> zs);

}  // namespace pafnet
