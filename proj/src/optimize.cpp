#include "rg/optimize.hpp"

#include "rg/degeneracy.hpp"
#include "rg/nonminimal.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace rg {

std::string_view to_string(LOKind kind) {
  switch (kind) {
    case LOKind::None: return "none";
    case LOKind::NestedRansac: return "nested";
    case LOKind::GraphCut: return "gc";
  }
  return "?";
}

std::string_view to_string(FOKind kind) {
  switch (kind) {
    case FOKind::IrlsCauchy: return "irls";
    case FOKind::SingleNonminimal: return "single";
  }
  return "?";
}

LOKind lo_from_string(std::string_view name) {
  if (name == "none") return LOKind::None;
  if (name == "nested" || name == "nested-ransac") return LOKind::NestedRansac;
  if (name == "gc" || name == "graph-cut") return LOKind::GraphCut;
  throw Error(ErrorCode::InvalidConfig, "unknown local optimization: " + std::string(name));
}

FOKind fo_from_string(std::string_view name) {
  if (name == "irls" || name == "irls-cauchy") return FOKind::IrlsCauchy;
  if (name == "single" || name == "nonminimal") return FOKind::SingleNonminimal;
  throw Error(ErrorCode::InvalidConfig, "unknown final optimization: " + std::string(name));
}

FOKind default_fo(ProblemKind kind) {
  return kind == ProblemKind::Fundamental ? FOKind::SingleNonminimal : FOKind::IrlsCauchy;
}

double default_cell_size(ProblemKind kind, std::span<const Correspondence> points) {
  const auto coords = joint_coordinates(kind, points);
  if (coords.empty()) return 1.0;
  Eigen::VectorXd lo = coords.front(), hi = coords.front();
  for (const auto& c : coords) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  const double extent = (hi - lo).maxCoeff();
  return extent > 0.0 ? extent / 8.0 : 1.0;
}

namespace {

// The best model so far with its residuals and score, as seen by one LO/FO call.
struct Incumbent {
  Model model;
  ScoreValue score;
  std::vector<double> residuals;
};

// Refits that reproduce the incumbent differ from it only by rounding; such
// gains are not adopted, so the path through LO does not hinge on the last bits.
bool clearly_improves(const ScoreValue& s, const ScoreValue& best) {
  if (!improves(s, best)) return false;
  return s.value - best.value > 1e-9 * std::max(1.0, std::abs(best.value)) || s.inlier_count > best.inlier_count;
}

// Fits, checks and fully scores a candidate; adopts it on a clear improvement.
bool try_candidate(const OptimizeContext& ctx, std::span<const Correspondence> sample, std::span<const double> weights,
                   Incumbent& best) {
  Model candidate;
  try {
    candidate = fit_nonminimal(ctx.kind, sample, weights, ctx.lm, &best.model);
  } catch (const Error&) {
    return false;
  }
  if (!check_model(candidate).ok) return false;
  const ScoreValue s = score_model(ctx.scoring, candidate, ctx.points, best.score);
  if (s.preempted || !clearly_improves(s, best.score)) return false;
  best.model = candidate;
  best.score = s;
  best.residuals = compute_residuals(candidate, ctx.points);
  return true;
}

std::vector<double> qualities(const ScoringFn& fn, std::span<const double> residuals) {
  std::vector<double> q(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) q[i] = fn.quality(residuals[i]);
  return q;
}

// Inner rounds of nested RANSAC over `pool`; the pool is refreshed from the
// threshold inliers after every improvement.
bool nested_rounds(const OptimizeContext& ctx, const LOSettings& settings, Rng& rng, std::vector<std::size_t> pool,
                   Incumbent& best) {
  const std::size_t m = minimal_sample_size(ctx.kind);
  const std::size_t want = static_cast<std::size_t>(std::max(1, settings.sample_multiplier)) * m;
  bool improved = false;
  std::vector<Correspondence> sample;
  std::vector<double> weights;
  for (int round = 0; round < settings.inner_iterations; ++round) {
    if (pool.size() < m) break;
    const std::size_t k = std::min(want, pool.size());
    // Partial Fisher-Yates: the first k entries become a uniform subset.
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
    sample.clear();
    weights.clear();
    for (std::size_t i = 0; i < k; ++i) {
      sample.push_back(ctx.points[pool[i]]);
      weights.push_back(ctx.scoring.quality(best.residuals[pool[i]]));
    }
    if (try_candidate(ctx, sample, weights, best)) {
      improved = true;
      pool = select_inliers(best.residuals, ctx.scoring.threshold);
    }
  }
  return improved;
}

}  // namespace

OptimizeResult local_optimize(const Model& model, const ScoreValue& score, const OptimizeContext& ctx,
                              const LOSettings& settings, Rng& rng) {
  OptimizeResult out{model, score, LOPath::None, false};
  if (settings.kind == LOKind::None) return out;
  const std::size_t m = minimal_sample_size(ctx.kind);
  Incumbent best{model, score, compute_residuals(model, ctx.points)};
  std::vector<std::size_t> pool = select_inliers(best.residuals, ctx.scoring.threshold);
  if (pool.size() < m) return out;

  const bool use_gc = settings.kind == LOKind::GraphCut && ctx.points.size() <= settings.gc_switch_threshold;
  bool improved = false;
  if (use_gc) {
    out.path = LOPath::GraphCut;
    std::unique_ptr<NeighborGraph> owned;
    const NeighborGraph* graph = ctx.graph;
    if (graph == nullptr) {
      const double cell = settings.neighborhood_grid_cell > 0.0 ? settings.neighborhood_grid_cell
                                                                : default_cell_size(ctx.kind, ctx.points);
      owned = std::make_unique<NeighborGraph>(build_neighbor_graph(ctx.kind, ctx.points, cell));
      graph = owned.get();
    }
    const auto q = qualities(ctx.scoring, best.residuals);
    const auto labeled = graph_cut_labeling(q, *graph, settings.spatial_weight);
    if (labeled.size() >= m) {
      std::vector<Correspondence> sample;
      std::vector<double> weights;
      for (std::size_t i : labeled) {
        sample.push_back(ctx.points[i]);
        weights.push_back(q[i]);
      }
      improved |= try_candidate(ctx, sample, weights, best);
      pool = improved ? select_inliers(best.residuals, ctx.scoring.threshold) : labeled;
    }
  } else {
    out.path = LOPath::NestedRansac;
  }
  improved |= nested_rounds(ctx, settings, rng, std::move(pool), best);
  out.model = best.model;
  out.score = best.score;
  out.improved = improved;
  return out;
}

OptimizeResult final_optimize(const Model& model, const ScoreValue& score, const OptimizeContext& ctx, FOKind kind) {
  const std::size_t m = minimal_sample_size(ctx.kind);
  Incumbent best{model, score, compute_residuals(model, ctx.points)};
  bool improved = false;
  std::vector<Correspondence> sample;
  std::vector<double> weights;
  if (kind == FOKind::SingleNonminimal) {
    for (std::size_t i : select_inliers(best.residuals, ctx.scoring.threshold)) sample.push_back(ctx.points[i]);
    if (sample.size() >= m) improved = try_candidate(ctx, sample, {}, best);
  } else {
    double tau = ctx.scoring.threshold;
    for (int round = 0; round < 4; ++round, tau *= 0.5) {
      const auto active = select_inliers(best.residuals, tau);
      if (active.size() < m) break;
      const double c = 0.5 * tau;
      sample.clear();
      weights.clear();
      for (std::size_t i : active) {
        const double u = best.residuals[i] / c;
        sample.push_back(ctx.points[i]);
        weights.push_back(1.0 / (1.0 + u * u));
      }
      improved |= try_candidate(ctx, sample, weights, best);
    }
  }
  return {best.model, best.score, LOPath::None, improved};
}

}  // namespace rg
