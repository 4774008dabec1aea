#include "rg/bench/metrics.hpp"

#include "rg/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rg::bench {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PoseError guarded_pose_error(const Mat3& R, const Vec3& t, const GroundTruth& gt, bool& rotation_only) {
  if (t.norm() < 1e-6 || gt.translation.norm() < 1e-6) {
    rotation_only = true;
    const double r = rotation_error_deg(R, gt.rotation);
    return {r, 0.0, r};
  }
  return pose_error(R, t, gt.rotation, gt.translation);
}

std::vector<Correspondence> normalized_inliers(const ScenePair& pair, const EstimationReport& report) {
  const auto& K = *pair.intrinsics;
  std::vector<Correspondence> out;
  for (std::size_t i = 0; i < pair.set.size(); ++i) {
    if (!report.inlier_mask.empty() && !report.inlier_mask[i]) continue;
    const auto& c = pair.set[i];
    out.push_back(Correspondence::image_pair(intrinsic_normalize(c.source.hnormalized(), K.first),
                                             intrinsic_normalize(c.target.hnormalized(), K.second)));
  }
  if (out.empty() && !report.inlier_mask.empty()) {
    EstimationReport all = report;
    all.inlier_mask.clear();
    return normalized_inliers(pair, all);
  }
  return out;
}

}  // namespace

PairResult failed_result(const std::string& name) {
  PairResult r;
  r.name = name;
  r.rotation_deg = r.translation_err = r.pose_deg = kInf;
  return r;
}

PairResult assess(const ScenePair& pair, const EstimationReport& report) {
  PairResult r;
  r.name = pair.name;
  r.ok = true;
  r.inliers = report.score.inlier_count;
  r.iterations = report.iterations_run;
  r.runtime_s = report.timings.total / 1000.0;
  const Model& m = report.model;
  PoseError e;
  switch (m.kind) {
    case ProblemKind::Homography: {
      if (!pair.intrinsics) throw Error(ErrorCode::MissingIntrinsics);
      const Mat3 K1 = pair.intrinsics->first.matrix(), K2 = pair.intrinsics->second.matrix();
      const auto pts = normalized_inliers(pair, report);
      // The decomposition is ambiguous; the candidate closest to the truth is scored.
      e = {kInf, kInf, kInf};
      for (const auto& motion : decompose_homography(K2.inverse() * m.matrix * K1, pts)) {
        bool rot_only = false;
        const PoseError c = guarded_pose_error(motion.rotation, motion.translation, pair.truth, rot_only);
        if (c.pose_deg < e.pose_deg) {
          e = c;
          r.rotation_only = rot_only;
        }
      }
      break;
    }
    case ProblemKind::Fundamental:
    case ProblemKind::Essential: {
      if (!pair.intrinsics) throw Error(ErrorCode::MissingIntrinsics);
      Mat3 E = m.matrix;
      if (m.kind == ProblemKind::Fundamental) {
        E = pair.intrinsics->second.matrix().transpose() * m.matrix * pair.intrinsics->first.matrix();
      }
      const auto pts = normalized_inliers(pair, report);
      const RelativePose pose = decompose_essential(Model::essential(E), pts);
      e = guarded_pose_error(pose.rotation, pose.translation, pair.truth, r.rotation_only);
      break;
    }
    case ProblemKind::AbsolutePose:
      e = guarded_pose_error(m.rotation(), m.translation, pair.truth, r.rotation_only);
      break;
    case ProblemKind::Rigid:
      e.rotation_deg = e.pose_deg = rotation_error_deg(m.rotation(), pair.truth.rotation);
      e.translation_deg = (m.translation - pair.truth.translation).norm();
      r.rotation_only = true;
      break;
  }
  r.rotation_deg = e.rotation_deg;
  r.translation_err = e.translation_deg;
  r.pose_deg = e.pose_deg;
  return r;
}

double auc(std::span<const double> errors, double max_threshold) {
  if (errors.empty()) return 0.0;
  double area = 0.0;
  for (double e : errors) {
    if (e < max_threshold) area += 1.0 - std::max(e, 0.0) / max_threshold;
  }
  return area / static_cast<double>(errors.size());
}

double recall_at(std::span<const double> errors, double threshold) {
  if (errors.empty()) return 0.0;
  const auto hits = std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= threshold; });
  return static_cast<double>(hits) / static_cast<double>(errors.size());
}

double mean_average_accuracy(std::span<const double> errors) {
  double sum = 0.0;
  for (int t = 1; t <= 10; ++t) sum += recall_at(errors, t);
  return sum / 10.0;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  if (v.size() % 2 == 1) return v[h];
  if (std::isinf(v[h])) return v[h];
  return 0.5 * (v[h - 1] + v[h]);
}

MetricSummary evaluate(std::span<const PairResult> results) {
  MetricSummary s;
  std::vector<double> pose, rot, trans;
  double runtime = 0.0;
  for (const auto& r : results) {
    pose.push_back(r.ok ? r.pose_deg : kInf);
    rot.push_back(r.ok ? r.rotation_deg : kInf);
    trans.push_back(r.ok ? r.translation_err : kInf);
    runtime += r.runtime_s;
    s.failures += !r.ok;
  }
  s.pairs = results.size();
  for (int t : {5, 10, 20}) s.auc_at[t] = auc(pose, t);
  s.median_error_deg = median(pose);
  s.maa = mean_average_accuracy(pose);
  s.median_rotation_deg = median(rot);
  s.median_translation = median(trans);
  s.mean_runtime_s = results.empty() ? 0.0 : runtime / static_cast<double>(results.size());
  return s;
}

}  // namespace rg::bench
