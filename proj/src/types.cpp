#include "rg/types.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace rg {

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Homography: return "homography";
    case ProblemKind::Fundamental: return "fundamental";
    case ProblemKind::Essential: return "essential";
    case ProblemKind::AbsolutePose: return "absolute";
    case ProblemKind::Rigid: return "rigid";
  }
  return "unknown";
}

ProblemKind problem_from_string(std::string_view name) {
  if (name == "homography" || name == "H") return ProblemKind::Homography;
  if (name == "fundamental" || name == "F") return ProblemKind::Fundamental;
  if (name == "essential" || name == "E") return ProblemKind::Essential;
  if (name == "absolute" || name == "absolute_pose" || name == "pnp") return ProblemKind::AbsolutePose;
  if (name == "rigid") return ProblemKind::Rigid;
  throw Error(ErrorCode::InvalidConfig, "unknown problem '" + std::string(name) + "'");
}

std::size_t minimal_sample_size(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Homography: return 4;
    case ProblemKind::Fundamental: return 7;
    case ProblemKind::Essential: return 5;
    case ProblemKind::AbsolutePose: return 3;
    case ProblemKind::Rigid: return 3;
  }
  return 0;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AllPointsCoincident: return "AllPointsCoincident";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::NoCheiralSolution: return "NoCheiralSolution";
    case ErrorCode::ZeroTranslation: return "ZeroTranslation";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::DegenerateControlPoints: return "DegenerateControlPoints";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::NoModelFound: return "NoModelFound";
    case ErrorCode::MissingIntrinsics: return "MissingIntrinsics";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Mat3 CameraIntrinsics::matrix() const {
  Mat3 K;
  K << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return K;
}

CameraIntrinsics CameraIntrinsics::from_matrix(const Mat3& K) {
  if (!(K(0, 0) > 0.0) || !(K(1, 1) > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "intrinsics need positive focal lengths");
  }
  return {K(0, 0), K(1, 1), K(0, 2), K(1, 2)};
}

namespace {

bool is_rotation(const Mat3& R, double tol) {
  return (R.transpose() * R - Mat3::Identity()).norm() < tol && R.determinant() > 0.0;
}

}  // namespace

bool satisfies_invariants(const Model& model) {
  const Mat3& M = model.matrix;
  if (!M.allFinite() || !model.translation.allFinite()) return false;
  switch (model.kind) {
    case ProblemKind::Homography:
      return std::abs(M.determinant()) > 0.0;
    case ProblemKind::Fundamental: {
      const double n = M.norm();
      return n > 0.0 && std::abs(M.determinant()) <= 1e-8 * n * n * n;
    }
    case ProblemKind::Essential: {
      const Eigen::JacobiSVD<Mat3> svd(M);
      const Vec3 s = svd.singularValues();
      return s(0) > 0.0 && (s(0) - s(1)) <= 1e-6 * s(0) && s(2) <= 1e-6 * s(0);
    }
    case ProblemKind::AbsolutePose:
    case ProblemKind::Rigid:
      return is_rotation(M, 1e-8);
  }
  return false;
}

}  // namespace rg
