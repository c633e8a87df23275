#pragma once

#include <string>

#include "pafnet/config.hpp"
#include "pafnet/metrics.hpp"

namespace pafnet {

/// Builds the dataset, trains per the config, evaluates train/test metrics
/// and writes metrics.json, loss_curve.csv, predictions.csv, dataset.csv and
/// checkpoint.bin into cfg.out_dir (created if missing). Deterministic per
/// seed. Pass write_outputs = false for a dry evaluation without touching
/// the filesystem.
MetricsRecord run_experiment(const ExperimentConfig& cfg, bool write_outputs = true);

/// Restores a checkpoint and evaluates metrics without training.
MetricsRecord evaluate_checkpoint(const ExperimentConfig& cfg,
                                  const std::string& checkpoint_path,
                                  bool write_outputs = true);

void write_metrics_json(const MetricsRecord& rec, const std::string& path);

}  // namespace pafnet
