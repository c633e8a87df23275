#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pafnet/expr.hpp"

namespace pafnet {

struct LossWeights {
  double data = 1.0;
  double pde = 1.0;
  double bc = 1.0;
  double ic = 1.0;
};

using PointMatrix = std::vector<std::vector<double>>;

// -- residual operators -------------------------------------------------------

/// m u_tt + mu u_t + k u
ad::Expr residual_oscillator(ad::Graph& g, ad::Expr u, ad::Expr t, double m,
                             double mu, double k);

/// C_t - D C_xx + v C_x
ad::Expr residual_advection_dispersion(ad::Graph& g, ad::Expr c, ad::Expr x,
                                       ad::Expr t, double D, double v);

/// C_t - d/dx(D C_x); D may depend on x, t and trainable parameters. The
/// product rule expansion is left to the engine.
using DiffusivityBuilder =
    std::function<ad::Expr(ad::Graph&, ad::Expr x, ad::Expr t)>;
ad::Expr residual_diffusion(ad::Graph& g, ad::Expr c, ad::Expr x, ad::Expr t,
                            const DiffusivityBuilder& d_builder);

/// u_xx + u_yy
ad::Expr residual_laplace(ad::Graph& g, ad::Expr u, ad::Expr x, ad::Expr y);

// -- collocation sampling -----------------------------------------------------

enum class SampleMode { Grid, UniformRandom };

/// Grid mode: n points per axis, endpoints included (cartesian product).
/// UniformRandom: n points total, strictly inside the box; deterministic per
/// seed.
PointMatrix sample_collocation(const std::vector<std::pair<double, double>>& ranges,
                               int n, std::uint64_t seed, SampleMode mode);

/// Cartesian grid with an explicit point count per axis.
PointMatrix sample_grid(const std::vector<std::pair<double, double>>& ranges,
                        const std::vector<int>& counts);

// -- problem registry ---------------------------------------------------------

/// One boundary or initial condition: u (or du/d deriv_var) at points with
/// some coordinates pinned must match `target`.
struct ConditionTerm {
  std::string name;
  std::map<std::string, double> pinned;
  std::string deriv_var;  // empty: condition on u itself
  std::function<ad::Expr(ad::Graph&, std::span<const ad::Expr> inputs,
                         std::span<const ad::Expr> lambdas)>
      target;
};

struct PdeProblem {
  std::string name;
  std::vector<std::string> input_vars;
  std::map<std::string, double> meta;
  std::vector<std::string> unknowns;   // trainable lambda names (inverse mode)
  std::vector<double> unknown_truth;   // aligned with `unknowns`
  std::function<ad::Expr(ad::Graph&, ad::Expr u, std::span<const ad::Expr> inputs,
                         std::span<const ad::Expr> lambdas)>
      residual;
  std::vector<ConditionTerm> bc;
  std::vector<ConditionTerm> ic;
  std::map<std::string, std::pair<double, double>> domain;
};

std::vector<std::string> problem_names();
PdeProblem make_problem(const std::string& name,
                        const std::map<std::string, double>& meta_overrides = {});

// -- loss assembly --------------------------------------------------------------

/// Residual template plus the points it is enforced at.
struct TermBatch {
  ad::Expr residual_template;
  PointMatrix points;
};

/// Component expressions of the Eq-22-style composite loss. data/pde/bc/ic are
/// unweighted per-term means; total carries the weights.
struct LossParts {
  ad::Expr total;
  ad::Expr data;
  ad::Expr pde;
  ad::Expr bc;
  ad::Expr ic;
};

/// Builds the full training loss by substituting each point's coordinates
/// into the templates. `inputs` are the symbolic input variables the
/// templates were built over. Throws EmptyBatch when a positively weighted
/// term has no points.
LossParts total_loss(ad::Graph& g, ad::Expr u_template,
                     std::span<const ad::Expr> inputs,
                     const PointMatrix& data_points,
                     std::span<const double> data_targets,
                     ad::Expr pde_template, const PointMatrix& collocation,
                     std::span<const TermBatch> bc_terms,
                     std::span<const TermBatch> ic_terms, const LossWeights& w);

}  // namespace pafnet
