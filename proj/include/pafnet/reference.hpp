#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pafnet/expr.hpp"
#include "pafnet/physics.hpp"

namespace pafnet {

/// Time sequence of a 1D field on a uniform grid.
struct Field1D {
  std::string problem;
  std::map<std::string, double> meta;
  std::vector<double> x;
  std::vector<double> t;
  std::vector<std::vector<double>> values;  // [time][x]

  double interp(double xq, double tq) const;  // bilinear
  double mass_at(std::size_t time_index) const;  // trapezoid of the slice
};

/// 2D field on a uniform grid.
struct Field2D {
  std::string problem;
  std::map<std::string, double> meta;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::vector<double>> values;  // [ix][iy]

  double interp(double xq, double yq) const;
};

// -- closed forms ---------------------------------------------------------------

/// Underdamped solution x(t) = e^{-delta t} 2A cos(phi + omega t) with x(0)=1,
/// x'(0)=0. Throws Overdamped when delta >= omega0.
double analytic_oscillator(double t, double m, double mu, double k);
ad::Expr analytic_oscillator_expr(ad::Graph& g, ad::Expr t, double m, double mu,
                                  double k);

/// C(x,t) = C0/2 [erfc((x-vt)/(2 sqrt(Dt))) + e^{vx/D} erfc((x+vt)/(2 sqrt(Dt)))].
/// t <= 0 returns the initial condition (C0 at x=0, else 0). The e^{vx/D} erfc
/// product switches to a scaled form when the exponent would overflow.
double analytic_advection_dispersion(double x, double t, double C0, double v,
                                     double D);
ad::Expr analytic_advection_dispersion_expr(ad::Graph& g, ad::Expr x, ad::Expr t,
                                            double C0, double v, double D);

// -- finite-difference solvers ----------------------------------------------------

using DiffusivityFn = std::function<double(double x, double t)>;
using ProfileFn = std::function<double(double x)>;

/// Conservative finite-volume solve of C_t = d/dx(D C_x) with face-averaged D
/// and Dirichlet 0 edges. Explicit stepping; throws UnstableStep unless
/// dt <= 0.4 dx^2 / max D, NonPositiveD if D is not positive on the grid.
/// Saves the t=0 slice and then every save_stride-th step up to T.
Field1D fd_diffusion_solve(const DiffusivityFn& D, const ProfileFn& ic, double xlo,
                           double xhi, double T, int nx, double dt,
                           int save_stride = 1);

/// Largest explicit step <= 0.4 dx^2 / max D that divides save_interval evenly.
double stable_diffusion_dt(const DiffusivityFn& D, double xlo, double xhi, int nx,
                           double t_probe_max, double save_interval);

/// 5-point SOR solve of u_xx + u_yy = 0 on [0,2pi]^2 with the parametric
/// Dirichlet boundaries u(0|2pi, y) = 3y sin(y+l1), u(x, 0|2pi) = 3x sin(x+l2).
/// Iterates until the max stencil residual is below tol.
Field2D fd_laplace_solve(double lambda1, double lambda2, int n,
                         double tol = 1e-8, int max_sweeps = 200000);

// -- dataset assembly -------------------------------------------------------------

enum class Role { Data, Validation, Physics, Test };
const char* role_name(Role role);

struct Dataset {
  std::vector<std::string> vars;
  PointMatrix data_points;
  std::vector<double> data_values;
  PointMatrix val_points;
  std::vector<double> val_values;
  PointMatrix physics_points;
  PointMatrix test_points;
  std::vector<double> test_values;
};

using TruthFn = std::function<double(std::span<const double>)>;

struct SplitSpec {
  std::vector<std::pair<double, double>> data_ranges;
  std::vector<std::pair<double, double>> physics_ranges;
  std::vector<std::pair<double, double>> test_ranges;  // empty => no test set
  // random mode: single total count; grid mode: per-axis counts (a single
  // value broadcasts to every axis)
  std::vector<int> n_data{0};
  std::vector<int> n_physics{0};
  std::vector<int> n_test{0};
  SampleMode mode = SampleMode::UniformRandom;
  double validation_fraction = 0.1;
};

/// Labeled point sets with ground truth attached; deterministic per seed.
/// All ranges must lie inside `oracle_domain` (RangeOutsideOracle otherwise).
Dataset make_dataset(const std::vector<std::string>& vars, const TruthFn& truth,
                     const std::vector<std::pair<double, double>>& oracle_domain,
                     const SplitSpec& split, std::uint64_t seed);

void write_dataset_csv(const Dataset& ds, const std::string& path);
void write_field_csv(const Field1D& f, const std::string& path);
void write_field_csv(const Field2D& f, const std::string& path);

}  // namespace pafnet
