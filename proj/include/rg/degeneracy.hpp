#pragma once

#include "rg/types.hpp"

#include <span>

namespace rg {

enum class DegeneracyReason { None, CollinearTriple, TwistedQuad, DetOutOfRange, ImproperRotation };

struct DegeneracyVerdict {
  bool ok = true;
  DegeneracyReason reason = DegeneracyReason::None;

  static DegeneracyVerdict pass() { return {}; }
  static DegeneracyVerdict fail(DegeneracyReason r) { return {false, r}; }
};

struct DegeneracyTolerances {
  double collinear_2d = 1e-8;
  double collinear_3d = 1e-6;
  double det_low = 1e-4;
  double det_high = 1e4;
  double rotation = 1e-6;
};

/// (b - a) x (c - a); positive for a counter-clockwise turn.
double orientation(const Vec2& a, const Vec2& b, const Vec2& c);

/// Rejects collinear triples and self-intersecting quadrilaterals in either image.
DegeneracyVerdict check_homography_sample(std::span<const Vec2> first, std::span<const Vec2> second,
                                          const DegeneracyTolerances& tol = {});

DegeneracyVerdict check_collinear_3d(const Vec3& p1, const Vec3& p2, const Vec3& p3,
                                     const DegeneracyTolerances& tol = {});

DegeneracyVerdict check_homography_model(const Mat3& H, const DegeneracyTolerances& tol = {});

DegeneracyVerdict check_rotation(const Mat3& R, const DegeneracyTolerances& tol = {});

/// Dispatches the sample test for the problem kind; F and E samples always pass.
DegeneracyVerdict check_sample(const CorrespondenceSet& set, std::span<const std::size_t> indices,
                               const DegeneracyTolerances& tol = {});

/// Dispatches the model test for the problem kind; F and E models always pass.
DegeneracyVerdict check_model(const Model& model, const DegeneracyTolerances& tol = {});

}  // namespace rg
