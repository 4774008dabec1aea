#pragma once

#include "rg/lm.hpp"
#include "rg/random.hpp"
#include "rg/scoring.hpp"
#include "rg/types.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace rg {

/// Undirected graph over correspondence indices; adjacency lists are sorted,
/// symmetric and free of self-loops.
struct NeighborGraph {
  std::vector<std::vector<std::uint32_t>> adjacency;
  std::size_t edge_count = 0;

  std::size_t size() const { return adjacency.size(); }
};

/// Joint coordinates used for spatial coherence: (x1, y1, x2, y2) for image
/// pairs, (X, Y, Z, u, v) for 2D-3D and (X1, Y1, Z1, X2, Y2, Z2) for 3D-3D.
std::vector<Eigen::VectorXd> joint_coordinates(ProblemKind kind, std::span<const Correspondence> points);

/// Connects every pair of points that share a cell of the uniform grid with
/// side `cell_size` over the joint coordinates.
NeighborGraph build_neighbor_graph(ProblemKind kind, std::span<const Correspondence> points, double cell_size);
NeighborGraph build_neighbor_graph(std::span<const Eigen::VectorXd> coords, double cell_size);

/// sum_i [inlier ? 1 - q_i : q_i] + lambda * #(edges with different labels).
double labeling_energy(std::span<const double> quality, const NeighborGraph& graph, double lambda,
                       std::span<const bool> inlier);

/// Exact minimizer of labeling_energy via s-t min cut; returns the inlier
/// indices, ascending. Ties resolve towards the outlier label.
std::vector<std::size_t> graph_cut_labeling(std::span<const double> quality, const NeighborGraph& graph,
                                            double lambda);

enum class LOKind { None, NestedRansac, GraphCut };
enum class FOKind { IrlsCauchy, SingleNonminimal };

std::string_view to_string(LOKind kind);
std::string_view to_string(FOKind kind);
LOKind lo_from_string(std::string_view name);
FOKind fo_from_string(std::string_view name);

struct LOSettings {
  LOKind kind = LOKind::GraphCut;
  int inner_iterations = 20;
  int sample_multiplier = 7;
  std::size_t gc_switch_threshold = 2000;
  double spatial_weight = 0.2;
  /// Grid cell side in the estimation frame; zero selects an eighth of the
  /// largest coordinate extent.
  double neighborhood_grid_cell = 0.0;
};

/// Everything an optimization step needs to know about the problem.
struct OptimizeContext {
  ProblemKind kind = ProblemKind::Homography;
  std::span<const Correspondence> points;
  ScoringFn scoring;
  LMSettings lm;
  /// Built on first use when null and the graph-cut path runs.
  const NeighborGraph* graph = nullptr;
};

enum class LOPath { None, NestedRansac, GraphCut };

struct OptimizeResult {
  Model model;
  ScoreValue score;
  LOPath path = LOPath::None;
  bool improved = false;
};

/// Default grid cell for the neighborhood graph of these points.
double default_cell_size(ProblemKind kind, std::span<const Correspondence> points);

/// Nested RANSAC or graph-cut local optimization. Never returns a worse score
/// than `score`; any failure returns the input unchanged.
OptimizeResult local_optimize(const Model& model, const ScoreValue& score, const OptimizeContext& ctx,
                              const LOSettings& settings, Rng& rng);

/// Cauchy-weighted IRLS with threshold halving, or one nonminimal fit on the
/// threshold inliers. Accepts a refit only when it improves the score.
OptimizeResult final_optimize(const Model& model, const ScoreValue& score, const OptimizeContext& ctx, FOKind kind);

/// Default final optimization: a single fit for F, IRLS otherwise.
FOKind default_fo(ProblemKind kind);

}  // namespace rg
