#include "rg/geom.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rg {

namespace {

constexpr double kFarAway = 1e12;

Vec3 mean_of(std::span<const Vec3> pts) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

}  // namespace

Mat3 NormalizationTransform::matrix() const {
  Mat3 T;
  T << scale, 0.0, -scale * centroid.x(), 0.0, scale, -scale * centroid.y(), 0.0, 0.0, 1.0;
  return T;
}

Mat3 NormalizationTransform::inverse_matrix() const {
  Mat3 T;
  T << 1.0 / scale, 0.0, centroid.x(), 0.0, 1.0 / scale, centroid.y(), 0.0, 0.0, 1.0;
  return T;
}

Normalized2D hartley_normalize(std::span<const Vec2> points) {
  if (points.empty()) throw Error(ErrorCode::TooFewPoints, "hartley_normalize: no points");
  Vec2 c = Vec2::Zero();
  for (const auto& p : points) c += p;
  c /= static_cast<double>(points.size());
  double mean_dist = 0.0;
  for (const auto& p : points) mean_dist += (p - c).norm();
  mean_dist /= static_cast<double>(points.size());
  if (!(mean_dist > 0.0)) throw Error(ErrorCode::AllPointsCoincident);

  Normalized2D out;
  out.transform.centroid = Vec3(c.x(), c.y(), 0.0);
  out.transform.scale = std::numbers::sqrt2 / mean_dist;
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(out.transform.apply(p));
  return out;
}

std::pair<NormalizationTransform, NormalizationTransform> hartley_normalize_pair(
    std::span<const Vec2> first, std::span<const Vec2> second) {
  if (first.empty() || second.empty()) {
    throw Error(ErrorCode::TooFewPoints, "hartley_normalize_pair: no points");
  }
  auto centroid = [](std::span<const Vec2> pts) {
    Vec2 c = Vec2::Zero();
    for (const auto& p : pts) c += p;
    return Vec2(c / static_cast<double>(pts.size()));
  };
  const Vec2 c1 = centroid(first);
  const Vec2 c2 = centroid(second);
  double total = 0.0;
  for (const auto& p : first) total += (p - c1).norm();
  for (const auto& p : second) total += (p - c2).norm();
  const double mean_dist = total / static_cast<double>(first.size() + second.size());
  if (!(mean_dist > 0.0)) throw Error(ErrorCode::AllPointsCoincident);
  const double scale = std::numbers::sqrt2 / mean_dist;
  return {NormalizationTransform{Vec3(c1.x(), c1.y(), 0.0), scale},
          NormalizationTransform{Vec3(c2.x(), c2.y(), 0.0), scale}};
}

Vec2 intrinsic_normalize(const Vec2& p, const CameraIntrinsics& K) {
  return {(p.x() - K.cx) / K.fx, (p.y() - K.cy) / K.fy};
}

Vec2 intrinsic_denormalize(const Vec2& p, const CameraIntrinsics& K) {
  return {p.x() * K.fx + K.cx, p.y() * K.fy + K.cy};
}

Normalized3D centroid_normalize_3d(std::span<const Vec3> points) {
  if (points.empty()) throw Error(ErrorCode::TooFewPoints, "centroid_normalize_3d: no points");
  Normalized3D out;
  out.transform.centroid = mean_of(points);
  out.transform.scale = 1.0;
  out.points.reserve(points.size());
  for (const auto& p : points) out.points.push_back(p - out.transform.centroid);
  return out;
}

Mat3 skew(const Vec3& v) {
  Mat3 S;
  S << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return S;
}

Mat3 rotation_from_axis_angle(const Vec3& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle < 1e-300) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
}

Vec3 axis_angle_from_rotation(const Mat3& R) {
  const Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

Mat3 project_to_rotation(const Mat3& M) {
  const Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0.0) D(2, 2) = -1.0;
  return svd.matrixU() * D * svd.matrixV().transpose();
}

Mat3 essential_from_pose(const Mat3& R, const Vec3& t) { return skew(t) * R; }

Mat3 project_to_essential(const Mat3& E) {
  const Eigen::JacobiSVD<Mat3> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 d(1.0, 1.0, 0.0);
  Mat3 out = svd.matrixU() * d.asDiagonal() * svd.matrixV().transpose();
  return out / out.norm();
}

double sampson_distance(const Mat3& F, const Vec3& x1, const Vec3& x2) {
  const Vec3 Fx1 = F * x1;
  const Vec3 Ftx2 = F.transpose() * x2;
  const double num = x2.dot(Fx1);
  const double den = Fx1.x() * Fx1.x() + Fx1.y() * Fx1.y() + Ftx2.x() * Ftx2.x() +
                     Ftx2.y() * Ftx2.y();
  if (!(den > 0.0)) return num == 0.0 ? 0.0 : kFarAway;
  return std::abs(num) / std::sqrt(den);
}

double symmetric_transfer_error(const Mat3& H, const Mat3& H_inv, const Vec3& x1,
                                const Vec3& x2) {
  const Vec3 fwd = H * x1;
  const Vec3 bwd = H_inv * x2;
  if (std::abs(fwd.z()) < 1e-300 || std::abs(bwd.z()) < 1e-300) return kFarAway;
  const double e1 = (fwd.head<2>() / fwd.z() - x2.head<2>()).norm();
  const double e2 = (bwd.head<2>() / bwd.z() - x1.head<2>()).norm();
  return 0.5 * (e1 + e2);
}

double reprojection_error(const Mat3& R, const Vec3& t, const Vec3& X, const Vec3& x) {
  const Vec3 P = R * X + t;
  if (P.z() <= 1e-12) return kFarAway;
  return (P.head<2>() / P.z() - x.head<2>()).norm();
}

ModelEvaluator::ModelEvaluator(const Model& model) : model_(model), aux_(Mat3::Zero()) {
  if (model.kind == ProblemKind::Homography) {
    Eigen::FullPivLU<Mat3> lu(model.matrix);
    invertible_ = lu.isInvertible();
    if (invertible_) aux_ = lu.inverse();
  }
}

double ModelEvaluator::operator()(const Correspondence& c) const {
  switch (model_.kind) {
    case ProblemKind::Homography:
      if (!invertible_) return kFarAway;
      return symmetric_transfer_error(model_.matrix, aux_, c.source, c.target);
    case ProblemKind::Fundamental:
    case ProblemKind::Essential:
      return sampson_distance(model_.matrix, c.source, c.target);
    case ProblemKind::AbsolutePose:
      return reprojection_error(model_.matrix, model_.translation, c.source, c.target);
    case ProblemKind::Rigid:
      return (model_.matrix * c.source + model_.translation - c.target).norm();
  }
  return kFarAway;
}

double residual(const Model& model, const Correspondence& c) { return ModelEvaluator(model)(c); }

double residual(const Model& model, const CorrespondenceSet& set, std::size_t index) {
  if (model.kind != set.kind) throw Error(ErrorCode::KindMismatch);
  return residual(model, set.items.at(index));
}

std::vector<RelativePose> essential_pose_candidates(const Mat3& E) {
  Eigen::JacobiSVD<Mat3> svd(E, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 U = svd.matrixU();
  Mat3 V = svd.matrixV();
  if (U.determinant() < 0.0) U = -U;
  if (V.determinant() < 0.0) V = -V;
  Mat3 W;
  W << 0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0;
  const Mat3 R1 = U * W * V.transpose();
  const Mat3 R2 = U * W.transpose() * V.transpose();
  const Vec3 t = U.col(2).normalized();
  return {{R1, t}, {R1, -t}, {R2, t}, {R2, -t}};
}

namespace {

// Depths (d1, d2) with d2 * x2 = d1 * R x1 + t in the least-squares sense.
bool triangulate_depths(const RelativePose& pose, const Vec3& x1, const Vec3& x2, double& d1,
                        double& d2) {
  const Vec3 a = pose.rotation * x1;
  const Vec3& b = x2;
  // Normal equations of [a, -b] [d1; d2] = -t.
  const double aa = a.dot(a), bb = b.dot(b), ab = a.dot(b);
  const double det = aa * bb - ab * ab;
  if (std::abs(det) < 1e-14 * aa * bb) return false;
  const double at = a.dot(pose.translation), bt = b.dot(pose.translation);
  d1 = (-at * bb + ab * bt) / det;
  d2 = (aa * bt - ab * at) / det;
  return true;
}

}  // namespace

std::size_t count_cheiral(const RelativePose& pose, std::span<const Correspondence> points) {
  std::size_t count = 0;
  for (const auto& c : points) {
    double d1 = 0.0, d2 = 0.0;
    if (triangulate_depths(pose, c.source, c.target, d1, d2) && d1 > 0.0 && d2 > 0.0) ++count;
  }
  return count;
}

RelativePose decompose_essential(const Model& essential, std::span<const Correspondence> points) {
  if (essential.kind != ProblemKind::Essential) throw Error(ErrorCode::KindMismatch);
  if (points.empty()) throw Error(ErrorCode::TooFewPoints, "decompose_essential: no points");
  const auto candidates = essential_pose_candidates(essential.matrix);
  std::size_t best_count = 0;
  const RelativePose* best = nullptr;
  for (const auto& cand : candidates) {
    const std::size_t count = count_cheiral(cand, points);
    if (count > best_count) {
      best_count = count;
      best = &cand;
    }
  }
  if (best == nullptr) throw Error(ErrorCode::NoCheiralSolution);
  return *best;
}

RelativePose decompose_essential(const Model& essential, const CorrespondenceSet& set) {
  return decompose_essential(essential, std::span<const Correspondence>(set.items));
}

std::vector<HomographyMotion> decompose_homography(const Mat3& H_calibrated,
                                                   std::span<const Correspondence> points) {
  const Eigen::JacobiSVD<Mat3> svd0(H_calibrated);
  const double s2 = svd0.singularValues()(1);
  if (!(s2 > 0.0)) return {};
  Mat3 H = H_calibrated / s2;
  if (!points.empty()) {
    double vote = 0.0;
    for (const auto& c : points) vote += c.target.dot(H * c.source) > 0.0 ? 1.0 : -1.0;
    if (vote < 0.0) H = -H;
  }

  const Eigen::SelfAdjointEigenSolver<Mat3> eig(H.transpose() * H);
  // Eigenvalues ascending: sigma3^2 <= 1 <= sigma1^2.
  const double l3 = eig.eigenvalues()(0), l1 = eig.eigenvalues()(2);
  Vec3 v1 = eig.eigenvectors().col(2), v2 = eig.eigenvectors().col(1),
       v3 = eig.eigenvectors().col(0);
  if (v1.cross(v2).dot(v3) < 0.0) v3 = -v3;

  if (l1 - l3 < 1e-12) {
    // Pure rotation; translation and plane are unobservable.
    return {{project_to_rotation(H), Vec3::Zero(), Vec3::UnitZ()}};
  }
  const double denom = std::sqrt(l1 - l3);
  const double a = std::sqrt(std::max(0.0, 1.0 - l3));
  const double b = std::sqrt(std::max(0.0, l1 - 1.0));
  const Vec3 u1 = (a * v1 + b * v3) / denom;
  const Vec3 u2 = (a * v1 - b * v3) / denom;

  std::vector<HomographyMotion> out;
  for (const Vec3& u : {u1, u2}) {
    Mat3 U, W;
    U.col(0) = v2;
    U.col(1) = u;
    U.col(2) = v2.cross(u);
    W.col(0) = H * v2;
    W.col(1) = H * u;
    W.col(2) = W.col(0).cross(W.col(1));
    const Mat3 R = W * U.transpose();
    const Vec3 n = v2.cross(u);
    const Vec3 t = (H - R) * n;
    out.push_back({R, t, n});
    out.push_back({R, -t, -n});
  }
  std::vector<HomographyMotion> in_front;
  for (const auto& m : out) {
    if (m.normal.z() > 0.0) in_front.push_back(m);
  }
  return in_front.empty() ? out : in_front;
}

double rotation_error_deg(const Mat3& R_est, const Mat3& R_gt) {
  // The quaternion half-angle form keeps precision near zero, where acos of the trace does not.
  const Eigen::Quaterniond q(Mat3(R_est.transpose() * R_gt));
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w())) * 180.0 / std::numbers::pi;
}

double angle_between_deg(const Vec3& a, const Vec3& b) {
  const double na = a.norm(), nb = b.norm();
  if (na < 1e-12 || nb < 1e-12) throw Error(ErrorCode::ZeroTranslation);
  // atan2 form stays accurate for nearly parallel vectors.
  return std::atan2(a.cross(b).norm(), a.dot(b)) * 180.0 / std::numbers::pi;
}

PoseError pose_error(const Mat3& R_est, const Vec3& t_est, const Mat3& R_gt, const Vec3& t_gt) {
  PoseError e;
  e.rotation_deg = rotation_error_deg(R_est, R_gt);
  e.translation_deg = angle_between_deg(t_est, t_gt);
  e.pose_deg = std::max(e.rotation_deg, e.translation_deg);
  return e;
}

}  // namespace rg
