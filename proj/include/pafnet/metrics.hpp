#pragma once

#include <map>
#include <span>
#include <string>

namespace pafnet {

/// 1 - SS_res/SS_tot; negative when predictions are worse than the mean.
double r_squared(std::span<const double> predictions, std::span<const double> targets);

/// |estimate - truth| / |truth|.
double are(double estimate, double truth);

struct ParameterEstimate {
  double estimate = 0.0;
  double truth = 0.0;
  double are = 0.0;
};

struct MetricsRecord {
  std::string problem;
  std::uint64_t seed = 0;
  std::size_t n_params = 0;
  double paf_fraction = 0.0;
  double loss_total = 0.0;
  double loss_data = 0.0;
  double loss_pde = 0.0;
  double loss_bc = 0.0;
  double loss_ic = 0.0;
  double loss_physics = 0.0;  // weighted pde+bc+ic
  double r2_train = 0.0;
  bool has_test = false;
  double r2_test = 0.0;
  std::map<std::string, ParameterEstimate> lambdas;
  std::map<std::string, double> omegas;
  long epochs_run = 0;
  bool early_stopped = false;
  double wall_time_s = 0.0;
};

}  // namespace pafnet
