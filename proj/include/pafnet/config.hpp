#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pafnet/network.hpp"
#include "pafnet/physics.hpp"

namespace pafnet {

struct ScheduleConfig {
  std::string kind = "constant";  // constant | two_phase | linear
  double lr = 1e-3;
  std::vector<std::pair<double, long>> phases;  // two_phase: (lr, epochs)
  double lr_start = 0.0;                        // linear
  double lr_end = 0.0;

  double lr_at(long epoch, long total_epochs) const;
  long total_epochs_or(long fallback) const;
};

struct OptimizerConfig {
  // adam | lbfgs | adam_lbfgs (Adam warmup for `epochs`, then an L-BFGS
  // polish for `polish_epochs`)
  std::string kind = "adam";
  long epochs = 0;
  long polish_epochs = 0;
  ScheduleConfig schedule;
  int history = 10;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_linesearch = 25;
  long early_stop_patience = 200;  // 0 disables validation-based stopping
};

struct DatasetConfig {
  SampleMode mode = SampleMode::UniformRandom;
  std::map<std::string, std::pair<double, double>> data_ranges;
  std::map<std::string, std::pair<double, double>> physics_ranges;
  std::map<std::string, std::pair<double, double>> test_ranges;
  // random mode: a single total count; grid mode: per-axis counts (single
  // value broadcasts)
  std::vector<int> n_data{0};
  std::vector<int> n_physics{0};
  std::vector<int> n_test{0};
  int n_bc = 64;
  int n_ic = 64;
  int n_boundary_data = 0;  // observed boundary points (Laplace)
  double validation_fraction = 0.1;
  int oracle_nx = 21;              // diffusion solver grid
  double oracle_save_interval = 1.0;
  int oracle_n = 65;               // Laplace solver grid
};

struct UnknownConfig {
  double init = 1.0;
  bool has_truth = false;
  double truth = 0.0;
};

struct ExperimentConfig {
  std::string name;
  std::string problem;
  std::uint64_t seed = 0;
  std::string out_dir;
  NetworkSpec network;
  LossWeights weights;
  OptimizerConfig optimizer;
  DatasetConfig dataset;
  std::map<std::string, double> problem_params;
  std::map<std::string, UnknownConfig> unknowns;
  std::map<std::string, double> init_overrides;
};

/// Parses and validates a config file. Unknown keys anywhere in the tree are
/// hard errors; see docs/config.md for the schema.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text, const std::string& name);

}  // namespace pafnet
