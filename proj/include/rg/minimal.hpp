#pragma once

#include "rg/types.hpp"

#include <span>
#include <vector>

namespace rg {

using HypothesisList = std::vector<Model>;

// All solvers take correspondences in the (already normalized) estimation
// frame and return only models that satisfy their kind's invariants. An empty
// list means the sample admits no usable solution.

/// 8x8 linear system with H33 = 1.
HypothesisList solve_h_4pt(std::span<const Correspondence> sample);

/// Two-dimensional null space plus the cubic rank constraint; 1 or 3 models.
HypothesisList solve_f_7pt(std::span<const Correspondence> sample);

/// Up to 10 essential matrices, unit norm with a positive first nonzero entry.
HypothesisList solve_e_5pt(std::span<const Correspondence> sample);

/// Up to 4 poses. Sources are world points, targets normalized image points.
HypothesisList solve_p3p(std::span<const Correspondence> sample);

/// Exactly one proper rigid transform.
HypothesisList solve_rigid_3pt(std::span<const Correspondence> sample);

HypothesisList solve_minimal(ProblemKind kind, std::span<const Correspondence> sample);

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};

/// Weighted least-squares rotation and translation mapping `source` onto
/// `target`, with det(R) = +1 enforced. Empty weights mean unit weights.
RigidTransform procrustes(std::span<const Vec3> source, std::span<const Vec3> target,
                          std::span<const double> weights = {});

/// Scales to unit Frobenius norm and flips the sign so that the first entry
/// (row-major) with magnitude above 1e-12 is positive.
Mat3 canonical_sign(const Mat3& M);

}  // namespace rg
