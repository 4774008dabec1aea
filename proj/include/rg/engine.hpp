#pragma once

#include "rg/lm.hpp"
#include "rg/optimize.hpp"
#include "rg/samplers.hpp"
#include "rg/scoring.hpp"
#include "rg/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace rg {

struct EstimationConfig {
  ProblemKind problem = ProblemKind::Homography;
  /// Inlier threshold in input units: pixels for image targets, the input
  /// length unit for rigid registration.
  double threshold = 1.0;
  double confidence = 0.999;
  std::size_t min_iterations = 50;
  std::size_t max_iterations = 5000;
  /// Unset selects PROSAC for F and E, P-NAPSAC otherwise.
  std::optional<SamplerKind> sampler;
  SamplerOptions sampler_options;
  ScoringKind scoring = ScoringKind::MagsacPP;
  LOSettings lo;
  /// Unset selects default_fo(problem).
  std::optional<FOKind> fo;
  std::uint64_t seed = 0;
  bool preemption = true;
  LMSettings lm;
};

SamplerKind default_sampler(ProblemKind kind);

/// Milliseconds spent per stage, accumulated over the run.
struct StageTimings {
  double normalize = 0.0;
  double sampling = 0.0;
  double sample_check = 0.0;
  double minimal = 0.0;
  double model_check = 0.0;
  double scoring = 0.0;
  double local_optimization = 0.0;
  double final_optimization = 0.0;
  double total = 0.0;
};

struct EstimationReport {
  /// In input units: H and F act on pixel coordinates, E and absolute pose on
  /// intrinsics-normalized coordinates, rigid on the input point clouds.
  Model model;
  std::vector<bool> inlier_mask;
  /// Full score of `model` at the configured threshold.
  ScoreValue score;
  std::size_t iterations_run = 0;
  std::size_t samples_rejected_degenerate = 0;
  std::size_t models_rejected_degenerate = 0;
  std::size_t hypotheses_scored = 0;
  std::size_t hypotheses_preempted = 0;
  std::size_t best_updates = 0;
  /// Incumbent score value after every change of the incumbent, LO included.
  std::vector<double> best_history;
  std::size_t lo_invocations = 0;
  std::size_t lo_graph_cut = 0;
  std::size_t lo_nested = 0;
  bool fo_improved = false;
  /// Threshold used in the estimation frame.
  double normalized_threshold = 0.0;
  SamplerKind sampler = SamplerKind::Uniform;
  FOKind fo = FOKind::IrlsCauchy;
  StageTimings timings;
};

/// Throws InvalidConfig on a violated config invariant.
void validate(const EstimationConfig& config);

/// Robustly estimates the model of `set.kind`. Intrinsics are required for E
/// (both views) and absolute pose (`second`). Deterministic for fixed inputs.
/// Throws TooFewPoints, MissingIntrinsics, KindMismatch, InvalidConfig, and
/// NoModelFound when no hypothesis survived within max_iterations.
EstimationReport estimate(const CorrespondenceSet& set, const EstimationConfig& config,
                          const std::optional<ViewIntrinsics>& intrinsics = std::nullopt);

/// ceil(ln(1 - confidence) / ln(1 - w^m)) without clamping; w <= 0 gives the
/// largest size_t and w >= 1 gives 1.
std::size_t required_iterations_raw(double inlier_ratio, std::size_t m, double confidence);

/// required_iterations_raw clamped to [min_iterations, max_iterations].
std::size_t required_iterations(double inlier_ratio, std::size_t m, double confidence, std::size_t min_iterations,
                                std::size_t max_iterations);

}  // namespace rg
