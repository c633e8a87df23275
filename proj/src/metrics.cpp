#include "pafnet/metrics.hpp"

#include <cmath>

#include "pafnet/errors.hpp"

namespace pafnet {

double r_squared(std::span<const double> predictions,
                 std::span<const double> targets) {
  if (targets.size() < 2) throw DegenerateTargets();
  if (predictions.size() != targets.size())
    throw LengthMismatch("r_squared: prediction/target lengths differ");
  double mean = 0.0;
  for (double y : targets) mean += y;
  mean /= static_cast<double>(targets.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    ss_res += (targets[i] - predictions[i]) * (targets[i] - predictions[i]);
    ss_tot += (targets[i] - mean) * (targets[i] - mean);
  }
  if (ss_tot == 0.0) throw DegenerateTargets();
  return 1.0 - ss_res / ss_tot;
}

double are(double estimate, double truth) {
  if (truth == 0.0) throw ZeroTruth();
  return std::fabs(estimate - truth) / std::fabs(truth);
}

}  // namespace pafnet
