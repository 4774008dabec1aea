#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rg {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class ProblemKind { Homography, Fundamental, Essential, AbsolutePose, Rigid };

std::string_view to_string(ProblemKind kind);
ProblemKind problem_from_string(std::string_view name);

/// Number of correspondences in a minimal sample: 4, 7, 5, 3, 3.
std::size_t minimal_sample_size(ProblemKind kind);

/// True when the source side of a correspondence is a 3D point.
inline bool source_is_3d(ProblemKind kind) {
  return kind == ProblemKind::AbsolutePose || kind == ProblemKind::Rigid;
}
inline bool target_is_3d(ProblemKind kind) { return kind == ProblemKind::Rigid; }

enum class ErrorCode {
  AllPointsCoincident,
  KindMismatch,
  NoCheiralSolution,
  ZeroTranslation,
  TooFewPoints,
  RankDeficient,
  DegenerateControlPoints,
  DegenerateConfiguration,
  NoModelFound,
  MissingIntrinsics,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  explicit Error(ErrorCode code) : Error(code, std::string(to_string(code))) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Image points are stored homogeneously as (x, y, 1); 3D points as (X, Y, Z).
// Which side is which is fixed by the problem kind of the owning set.
struct Correspondence {
  Vec3 source = Vec3::Zero();
  Vec3 target = Vec3::Zero();
  double quality = 0.0;

  static Correspondence image_pair(const Vec2& p, const Vec2& q, double quality = 0.0) {
    return {p.homogeneous(), q.homogeneous(), quality};
  }
  static Correspondence world_to_image(const Vec3& X, const Vec2& q, double quality = 0.0) {
    return {X, q.homogeneous(), quality};
  }
  static Correspondence cloud_pair(const Vec3& X, const Vec3& Y, double quality = 0.0) {
    return {X, Y, quality};
  }
};

struct CorrespondenceSet {
  ProblemKind kind = ProblemKind::Homography;
  std::vector<Correspondence> items;
  bool has_quality = false;

  std::size_t size() const noexcept { return items.size(); }
  const Correspondence& operator[](std::size_t i) const { return items[i]; }
};

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  Mat3 matrix() const;
  static CameraIntrinsics from_matrix(const Mat3& K);
};

/// Intrinsics for the two views of an epipolar problem; absolute pose uses `second`.
struct ViewIntrinsics {
  CameraIntrinsics first;
  CameraIntrinsics second;
};

/// A geometric model. `matrix` holds H, F or E for two-view problems and the
/// rotation for pose problems; `translation` is used by pose problems only.
struct Model {
  ProblemKind kind = ProblemKind::Homography;
  Mat3 matrix = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Model homography(const Mat3& H) { return {ProblemKind::Homography, H, Vec3::Zero()}; }
  static Model fundamental(const Mat3& F) { return {ProblemKind::Fundamental, F, Vec3::Zero()}; }
  static Model essential(const Mat3& E) { return {ProblemKind::Essential, E, Vec3::Zero()}; }
  static Model absolute_pose(const Mat3& R, const Vec3& t) {
    return {ProblemKind::AbsolutePose, R, t};
  }
  static Model rigid(const Mat3& R, const Vec3& t) { return {ProblemKind::Rigid, R, t}; }

  const Mat3& rotation() const { return matrix; }
};

/// Checks the per-kind model invariants (rank, singular values, SO(3)).
bool satisfies_invariants(const Model& model);

}  // namespace rg
