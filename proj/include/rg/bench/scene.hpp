#pragma once

#include "rg/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rg::bench {

/// Ground truth of a pair: the model in input units plus the relative (or
/// absolute, or rigid) motion used for pose errors.
struct GroundTruth {
  Model model;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};

struct ScenePair {
  std::string name;
  CorrespondenceSet set;
  GroundTruth truth;
  std::optional<ViewIntrinsics> intrinsics;
  double noise_sigma = 0.0;
  double inlier_ratio = 1.0;
  std::uint64_t seed = 0;
  /// Planted inlier flags; empty for ingested pairs.
  std::vector<bool> planted;
};

/// Synthetic image size and camera shared by all generated image problems.
inline constexpr double kImageWidth = 640.0;
inline constexpr double kImageHeight = 480.0;
CameraIntrinsics synthetic_camera();

/// Random ground truth, round(n * inlier_ratio) inliers perturbed by Gaussian
/// noise on the target side (pixels, or meters for rigid), outliers uniform
/// over the data domain, and noisy inverse-residual quality scores. The order
/// of correspondences is shuffled. Deterministic per seed.
/// Throws InvalidConfig when n < m, inlier_ratio is outside (0, 1] or noise < 0.
ScenePair generate_scene(ProblemKind problem, std::size_t n, double inlier_ratio, double noise_sigma,
                         std::uint64_t seed);

/// Threshold used when none is given: three noise deviations of the residual
/// (six for H, whose symmetric transfer error adds two image distances), with
/// a floor of one pixel or one centimeter.
double default_threshold(ProblemKind kind, double noise_sigma);

}  // namespace rg::bench
