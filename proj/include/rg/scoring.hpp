#pragma once

#include "rg/types.hpp"

#include <limits>
#include <span>
#include <string_view>
#include <vector>

namespace rg {

enum class ScoringKind { InlierCount, Msac, MagsacPP };

std::string_view to_string(ScoringKind kind);
ScoringKind scoring_from_string(std::string_view name);

/// Per-point quality in [0, q_max] with q_max = 1 for every kind.
///   InlierCount: 1 if r < tau.
///   Msac: 1 - r^2 / tau^2, truncated at zero.
///   MagsacPP: chi-residual likelihood marginalized over sigma in (0, tau],
///     shifted and scaled so that q(0) = 1 and q(r >= cutoff) = 0, where
///     cutoff = tau * sqrt(chi2_0.99(dof)).
struct ScoringFn {
  ScoringKind kind = ScoringKind::MagsacPP;
  double threshold = 1.0;
  /// Residual dimensionality: 2 for image residuals, 3 for 3D distances.
  int dof = 2;

  double q_max() const { return 1.0; }
  /// Residual at and beyond which the quality is zero.
  double cutoff() const;
  double quality(double r) const;
};

ScoringFn make_scoring(ScoringKind kind, double threshold, ProblemKind problem);

struct ScoreValue {
  double value = 0.0;
  std::size_t inlier_count = 0;
  std::size_t evaluated = 0;
  bool preempted = false;

  /// Below every real score; disables preemption.
  static ScoreValue worst() { return {-std::numeric_limits<double>::infinity(), 0, 0, false}; }
};

/// -1, 0 or 1 as a is worse than, tied with, or better than b. Value first,
/// then inlier count.
int compare(const ScoreValue& a, const ScoreValue& b);

/// True when the candidate strictly beats the incumbent; ties keep the incumbent.
inline bool improves(const ScoreValue& candidate, const ScoreValue& incumbent) {
  return compare(candidate, incumbent) > 0;
}

/// The optimistic-bound rule: after k of n points with partial score s, the
/// model cannot beat `best` once s + (n - k) q_max <= best.
inline bool should_preempt(double s, std::size_t k, std::size_t n, double q_max, double best) {
  return s + static_cast<double>(n - k) * q_max <= best;
}

/// Sequential scoring in storage order. Stops after the first k < n points
/// where s_k + (n - k) q_max <= best.value and marks the result preempted.
ScoreValue score_model(const ScoringFn& fn, const Model& model, std::span<const Correspondence> points,
                       const ScoreValue& best = ScoreValue::worst());
ScoreValue score_model(const ScoringFn& fn, const Model& model, const CorrespondenceSet& set,
                       const ScoreValue& best = ScoreValue::worst());

/// Full scoring with residuals evaluated by an OpenMP loop. The qualities are
/// summed serially afterwards, so the result equals score_model with no
/// preemption bit for bit.
ScoreValue score_model_parallel(const ScoringFn& fn, const Model& model, std::span<const Correspondence> points);

/// Residual of every point; the serial reference and its OpenMP counterpart.
std::vector<double> compute_residuals(const Model& model, std::span<const Correspondence> points);
std::vector<double> compute_residuals_parallel(const Model& model, std::span<const Correspondence> points);

/// Score of precomputed residuals, without preemption.
ScoreValue score_residuals(const ScoringFn& fn, std::span<const double> residuals);

/// Indices with residual strictly below tau, ascending.
std::vector<std::size_t> select_inliers(const Model& model, std::span<const Correspondence> points, double tau);
std::vector<std::size_t> select_inliers(std::span<const double> residuals, double tau);

}  // namespace rg
