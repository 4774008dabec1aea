#pragma once

#include "rg/bench/scene.hpp"
#include "rg/engine.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace rg::bench {

/// Outcome of one estimate() call on one pair. Failed runs carry infinite errors.
struct PairResult {
  std::string name;
  bool ok = false;
  double rotation_deg = 0.0;
  /// Degrees between translation directions for image problems; distance in
  /// input units for rigid registration.
  double translation_err = 0.0;
  /// max(rotation, translation angle); the rotation error alone for rigid
  /// pairs and whenever a translation is zero.
  double pose_deg = 0.0;
  bool rotation_only = false;
  std::size_t inliers = 0;
  std::size_t iterations = 0;
  double runtime_s = 0.0;
};

PairResult assess(const ScenePair& pair, const EstimationReport& report);
PairResult failed_result(const std::string& name);

/// Exact integral of the empirical recall curve over [0, max_threshold],
/// divided by max_threshold. Equals the mean of max(0, 1 - e / max).
double auc(std::span<const double> errors, double max_threshold);

/// Fraction of errors at or below the threshold.
double recall_at(std::span<const double> errors, double threshold);

/// Mean recall at the integer thresholds 1..10 degrees.
double mean_average_accuracy(std::span<const double> errors);

/// Median with infinities allowed; the mean of the middle pair for even sizes.
double median(std::vector<double> values);

struct MetricSummary {
  std::map<int, double> auc_at;
  double median_error_deg = 0.0;
  double maa = 0.0;
  double mean_runtime_s = 0.0;
  double median_rotation_deg = 0.0;
  double median_translation = 0.0;
  std::size_t pairs = 0;
  std::size_t failures = 0;
};

/// AUC at 5, 10 and 20 degrees over pose errors. Requires at least one result.
MetricSummary evaluate(std::span<const PairResult> results);

}  // namespace rg::bench
