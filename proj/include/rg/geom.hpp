#pragma once

#include "rg/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace rg {

/// Isotropic similarity x' = scale * (x - centroid). Residual thresholds in the
/// normalized space are the original thresholds multiplied by `scale`.
struct NormalizationTransform {
  Vec3 centroid = Vec3::Zero();
  double scale = 1.0;

  Vec2 apply(const Vec2& p) const { return scale * (p - centroid.head<2>()); }
  Vec2 invert(const Vec2& p) const { return p / scale + centroid.head<2>(); }
  Vec3 apply(const Vec3& p) const { return scale * (p - centroid); }
  Vec3 invert(const Vec3& p) const { return p / scale + centroid; }

  /// Homogeneous 3x3 form acting on (x, y, 1).
  Mat3 matrix() const;
  Mat3 inverse_matrix() const;
};

struct Normalized2D {
  std::vector<Vec2> points;
  NormalizationTransform transform;
};

struct Normalized3D {
  std::vector<Vec3> points;
  NormalizationTransform transform;
};

/// Centroid to the origin, mean distance to the origin sqrt(2).
/// Throws AllPointsCoincident when the spread is zero.
Normalized2D hartley_normalize(std::span<const Vec2> points);

/// Per-image centroids with one shared scale, so that a similarity-invariant
/// residual computed in the normalized frame is exactly `scale` times the
/// residual in the input frame.
std::pair<NormalizationTransform, NormalizationTransform> hartley_normalize_pair(
    std::span<const Vec2> first, std::span<const Vec2> second);

Vec2 intrinsic_normalize(const Vec2& p, const CameraIntrinsics& K);
Vec2 intrinsic_denormalize(const Vec2& p, const CameraIntrinsics& K);

/// Translation only; the transform's scale is exactly 1.
Normalized3D centroid_normalize_3d(std::span<const Vec3> points);

Mat3 skew(const Vec3& v);
Mat3 rotation_from_axis_angle(const Vec3& axis_angle);
Vec3 axis_angle_from_rotation(const Mat3& R);
/// Closest rotation in Frobenius norm (SVD projection with det fixed to +1).
Mat3 project_to_rotation(const Mat3& M);
Mat3 essential_from_pose(const Mat3& R, const Vec3& t);
/// Projects onto the essential manifold U diag(1,1,0) V^T.
Mat3 project_to_essential(const Mat3& E);

/// Point-to-model distance with the per-kind residual:
///   H: symmetric transfer error, F/E: Sampson distance,
///   absolute pose: reprojection error, rigid: Euclidean distance.
double residual(const Model& model, const Correspondence& c);
/// As above, but throws KindMismatch when the model does not fit the set.
double residual(const Model& model, const CorrespondenceSet& set, std::size_t index);

/// Residual evaluator with per-model precomputation (H^-1, F^T), meant for
/// the scoring hot loop.
class ModelEvaluator {
 public:
  explicit ModelEvaluator(const Model& model);
  double operator()(const Correspondence& c) const;
  const Model& model() const { return model_; }

 private:
  Model model_;
  Mat3 aux_;
  bool invertible_ = true;
};

double sampson_distance(const Mat3& F, const Vec3& x1, const Vec3& x2);
double symmetric_transfer_error(const Mat3& H, const Mat3& H_inv, const Vec3& x1, const Vec3& x2);
double reprojection_error(const Mat3& R, const Vec3& t, const Vec3& X, const Vec3& x);

struct RelativePose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::UnitX();
};

/// Four (R, t) candidates of an essential matrix; t has unit norm.
std::vector<RelativePose> essential_pose_candidates(const Mat3& E);

/// Number of correspondences (normalized coordinates) triangulating in front of both cameras.
std::size_t count_cheiral(const RelativePose& pose, std::span<const Correspondence> points);

/// Chirality-based selection among the four decompositions of E.
/// Correspondences must be in normalized camera coordinates.
RelativePose decompose_essential(const Model& essential, std::span<const Correspondence> points);
RelativePose decompose_essential(const Model& essential, const CorrespondenceSet& set);

/// Decomposition of a calibrated homography H ~ R + t n^T into its (up to four)
/// motion hypotheses. Only candidates with the plane in front of the first camera are kept.
struct HomographyMotion {
  Mat3 rotation;
  Vec3 translation;
  Vec3 normal;
};
std::vector<HomographyMotion> decompose_homography(const Mat3& H_calibrated,
                                                   std::span<const Correspondence> points = {});

struct PoseError {
  double rotation_deg = 0.0;
  double translation_deg = 0.0;
  double pose_deg = 0.0;
};

/// Rotation angle of R_est^T R_gt and the angle between translation directions.
/// Throws ZeroTranslation if either translation is (numerically) zero.
PoseError pose_error(const Mat3& R_est, const Vec3& t_est, const Mat3& R_gt, const Vec3& t_gt);
double rotation_error_deg(const Mat3& R_est, const Mat3& R_gt);
double angle_between_deg(const Vec3& a, const Vec3& b);

}  // namespace rg
