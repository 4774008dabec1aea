#include "rg/degeneracy.hpp"

#include <array>
#include <cmath>

namespace rg {

double orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

namespace {

bool collinear_2d(const Vec2& a, const Vec2& b, const Vec2& c, double tol) {
  return std::abs(orientation(a, b, c)) <= tol * (b - a).norm() * (c - a).norm();
}

// Closed segments pq and rs cross when each one's endpoints straddle the other's line.
bool segments_cross(const Vec2& p, const Vec2& q, const Vec2& r, const Vec2& s) {
  return orientation(p, q, r) * orientation(p, q, s) <= 0.0 &&
         orientation(r, s, p) * orientation(r, s, q) <= 0.0;
}

DegeneracyVerdict check_quad(std::span<const Vec2> p, double tol) {
  static constexpr std::array<std::array<int, 3>, 4> kTriples{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
  for (const auto& t : kTriples) {
    if (collinear_2d(p[t[0]], p[t[1]], p[t[2]], tol)) {
      return DegeneracyVerdict::fail(DegeneracyReason::CollinearTriple);
    }
  }
  if (segments_cross(p[0], p[1], p[2], p[3]) || segments_cross(p[1], p[2], p[3], p[0])) {
    return DegeneracyVerdict::fail(DegeneracyReason::TwistedQuad);
  }
  return DegeneracyVerdict::pass();
}

}  // namespace

DegeneracyVerdict check_homography_sample(std::span<const Vec2> first, std::span<const Vec2> second,
                                          const DegeneracyTolerances& tol) {
  if (first.size() != 4 || second.size() != 4) {
    throw Error(ErrorCode::TooFewPoints, "homography sample needs exactly 4 points");
  }
  const auto a = check_quad(first, tol.collinear_2d);
  if (!a.ok) return a;
  return check_quad(second, tol.collinear_2d);
}

DegeneracyVerdict check_collinear_3d(const Vec3& p1, const Vec3& p2, const Vec3& p3,
                                     const DegeneracyTolerances& tol) {
  const Vec3 v1 = p2 - p1;
  const Vec3 v2 = p3 - p1;
  if (v1.cross(v2).norm() > tol.collinear_3d * v1.norm() * v2.norm()) return DegeneracyVerdict::pass();
  return DegeneracyVerdict::fail(DegeneracyReason::CollinearTriple);
}

DegeneracyVerdict check_homography_model(const Mat3& H, const DegeneracyTolerances& tol) {
  const double h33 = H(2, 2);
  double det = 0.0;
  if (std::abs(h33) > 1e-12) {
    det = (H / h33).determinant();
  } else {
    const double n = H.norm();
    if (!(n > 0.0)) return DegeneracyVerdict::fail(DegeneracyReason::DetOutOfRange);
    det = (H / n).determinant();
  }
  det = std::abs(det);
  if (std::isfinite(det) && det >= tol.det_low && det <= tol.det_high) return DegeneracyVerdict::pass();
  return DegeneracyVerdict::fail(DegeneracyReason::DetOutOfRange);
}

DegeneracyVerdict check_rotation(const Mat3& R, const DegeneracyTolerances& tol) {
  if (R.allFinite() && (R.transpose() * R - Mat3::Identity()).norm() < tol.rotation &&
      R.determinant() > 0.0) {
    return DegeneracyVerdict::pass();
  }
  return DegeneracyVerdict::fail(DegeneracyReason::ImproperRotation);
}

DegeneracyVerdict check_sample(const CorrespondenceSet& set, std::span<const std::size_t> indices,
                               const DegeneracyTolerances& tol) {
  switch (set.kind) {
    case ProblemKind::Homography: {
      std::array<Vec2, 4> a, b;
      for (std::size_t i = 0; i < 4; ++i) {
        a[i] = set[indices[i]].source.head<2>();
        b[i] = set[indices[i]].target.head<2>();
      }
      return check_homography_sample(a, b, tol);
    }
    case ProblemKind::AbsolutePose:
      return check_collinear_3d(set[indices[0]].source, set[indices[1]].source,
                                set[indices[2]].source, tol);
    case ProblemKind::Rigid: {
      const auto v = check_collinear_3d(set[indices[0]].source, set[indices[1]].source,
                                        set[indices[2]].source, tol);
      if (!v.ok) return v;
      return check_collinear_3d(set[indices[0]].target, set[indices[1]].target,
                                set[indices[2]].target, tol);
    }
    case ProblemKind::Fundamental:
    case ProblemKind::Essential:
      break;
  }
  return DegeneracyVerdict::pass();
}

DegeneracyVerdict check_model(const Model& model, const DegeneracyTolerances& tol) {
  switch (model.kind) {
    case ProblemKind::Homography: return check_homography_model(model.matrix, tol);
    case ProblemKind::AbsolutePose:
    case ProblemKind::Rigid: return check_rotation(model.matrix, tol);
    case ProblemKind::Fundamental:
    case ProblemKind::Essential: break;
  }
  return DegeneracyVerdict::pass();
}

}  // namespace rg
