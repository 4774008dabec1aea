#pragma once

#include "rg/lm.hpp"
#include "rg/types.hpp"

#include <Eigen/Geometry>

#include <span>
#include <vector>

namespace rg {

// Every fit takes correspondences in the estimation frame plus one weight per
// correspondence (empty means unit weights). Zero-weight points do not
// influence the result.

struct WeightedSet {
  std::vector<std::size_t> indices;
  std::vector<double> weights;
};

/// Gathers the indexed correspondences of `set` in order.
std::vector<Correspondence> gather(const CorrespondenceSet& set, std::span<const std::size_t> indices);

/// Relative pose with a unit translation (5 dof).
struct RelativePoseParams {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::UnitX();
};

/// F = U diag(1, sigma, 0) V^T with U, V given by unit quaternions (7 dof).
struct FParams {
  Eigen::Quaterniond qu = Eigen::Quaterniond::Identity();
  Eigen::Quaterniond qv = Eigen::Quaterniond::Identity();
  double sigma = 1.0;

  Mat3 matrix() const;
  static FParams from_matrix(const Mat3& F);
};

struct AbsolutePoseParams {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};

/// Signed Sampson residual x2^T F x1 / |grad|, the square root of the Sampson error with sign.
double signed_sampson(const Mat3& F, const Vec3& x1, const Vec3& x2);

/// Weighted sum of squared residuals of `model` over the points.
double weighted_model_cost(const Model& model, std::span<const Correspondence> points,
                           std::span<const double> weights);

LMProblem<FParams> fundamental_problem(std::span<const Correspondence> points);
LMProblem<RelativePoseParams> relative_pose_problem(std::span<const Correspondence> points);
LMProblem<AbsolutePoseParams> absolute_pose_problem(std::span<const Correspondence> points);

/// Normalized weighted DLT. Throws RankDeficient when the design matrix has rank < 8.
Model fit_h_dlt(std::span<const Correspondence> points, std::span<const double> weights = {});

/// Normalized 8-point initialization (7-point with fewer points) followed by LM
/// over FParams on weighted Sampson residuals. `initial`, when given, competes
/// with the linear estimate as the LM starting point.
Model fit_f_nonminimal(std::span<const Correspondence> points, std::span<const double> weights = {},
                       const LMSettings& settings = {}, const Model* initial = nullptr);

/// Linear initialization (5-point solver below 8 points), chirality-based
/// decomposition and LM over the 5-dof relative pose. Points must be in
/// normalized camera coordinates.
Model fit_e_nonminimal(std::span<const Correspondence> points, std::span<const double> weights = {},
                       const LMSettings& settings = {}, const Model* initial = nullptr);

/// Weighted EPnP (P3P with exactly three points) followed by LM on the reprojection error.
Model fit_pnp_nonminimal(std::span<const Correspondence> points, std::span<const double> weights = {},
                         const LMSettings& settings = {}, const Model* initial = nullptr);

/// Weighted EPnP alone. Throws DegenerateControlPoints for collinear world points.
Model epnp(std::span<const Correspondence> points, std::span<const double> weights = {});

/// Weighted Procrustes. Throws DegenerateConfiguration for collinear or
/// insufficient positively weighted points.
Model fit_rigid_nonminimal(std::span<const Correspondence> points, std::span<const double> weights = {});

/// Dispatch on kind. Throws the fit's error on failure.
Model fit_nonminimal(ProblemKind kind, std::span<const Correspondence> points,
                     std::span<const double> weights = {}, const LMSettings& settings = {},
                     const Model* initial = nullptr);

}  // namespace rg
