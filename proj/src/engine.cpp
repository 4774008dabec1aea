#include "rg/engine.hpp"

#include "rg/degeneracy.hpp"
#include "rg/geom.hpp"
#include "rg/minimal.hpp"
#include "rg/nonminimal.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <tuple>

namespace rg {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// The estimation-frame copy of the input and the way back to input units.
struct Frame {
  CorrespondenceSet set;
  double threshold = 1.0;
  NormalizationTransform first, second;
  // Rigid only: source and target centroids.
  Vec3 source_centroid = Vec3::Zero();
  Vec3 target_centroid = Vec3::Zero();
};

double mean_focal(const CameraIntrinsics& K) { return 0.5 * (K.fx + K.fy); }

Frame normalize(const CorrespondenceSet& input, double tau, const std::optional<ViewIntrinsics>& K) {
  Frame f;
  f.set = input;
  auto& items = f.set.items;
  switch (input.kind) {
    case ProblemKind::Homography:
    case ProblemKind::Fundamental: {
      std::vector<Vec2> a, b;
      for (const auto& c : input.items) {
        a.push_back(c.source.hnormalized());
        b.push_back(c.target.hnormalized());
      }
      std::tie(f.first, f.second) = hartley_normalize_pair(a, b);
      for (std::size_t i = 0; i < items.size(); ++i) {
        items[i].source = f.first.apply(a[i]).homogeneous();
        items[i].target = f.second.apply(b[i]).homogeneous();
      }
      f.threshold = tau * f.first.scale;
      break;
    }
    case ProblemKind::Essential:
      for (auto& c : items) {
        c.source = intrinsic_normalize(c.source.hnormalized(), K->first).homogeneous();
        c.target = intrinsic_normalize(c.target.hnormalized(), K->second).homogeneous();
      }
      f.threshold = tau / (0.5 * (mean_focal(K->first) + mean_focal(K->second)));
      break;
    case ProblemKind::AbsolutePose:
      for (auto& c : items) c.target = intrinsic_normalize(c.target.hnormalized(), K->second).homogeneous();
      f.threshold = tau / mean_focal(K->second);
      break;
    case ProblemKind::Rigid: {
      for (const auto& c : input.items) {
        f.source_centroid += c.source;
        f.target_centroid += c.target;
      }
      f.source_centroid /= static_cast<double>(items.size());
      f.target_centroid /= static_cast<double>(items.size());
      for (auto& c : items) {
        c.source -= f.source_centroid;
        c.target -= f.target_centroid;
      }
      f.threshold = tau;
      break;
    }
  }
  return f;
}

Model denormalize(const Model& m, const Frame& f) {
  switch (m.kind) {
    case ProblemKind::Homography:
      return Model::homography(canonical_sign(f.second.inverse_matrix() * m.matrix * f.first.matrix()));
    case ProblemKind::Fundamental:
      return Model::fundamental(canonical_sign(f.second.matrix().transpose() * m.matrix * f.first.matrix()));
    case ProblemKind::Essential:
    case ProblemKind::AbsolutePose: return m;
    case ProblemKind::Rigid:
      return Model::rigid(m.matrix, m.translation + f.target_centroid - m.matrix * f.source_centroid);
  }
  return m;
}

// E and absolute pose stay in the intrinsics-normalized frame; the rest are
// reported against the input points.
bool reports_in_input_frame(ProblemKind kind) {
  return kind != ProblemKind::Essential && kind != ProblemKind::AbsolutePose;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SamplerKind default_sampler(ProblemKind kind) {
  return kind == ProblemKind::Fundamental || kind == ProblemKind::Essential ? SamplerKind::Prosac
                                                                            : SamplerKind::PNapsac;
}

void validate(const EstimationConfig& c) {
  if (!(c.threshold > 0.0) || !std::isfinite(c.threshold)) {
    throw Error(ErrorCode::InvalidConfig, "threshold must be positive");
  }
  if (!(c.confidence > 0.0 && c.confidence < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "confidence must lie in (0, 1)");
  }
  if (c.max_iterations == 0 || c.min_iterations > c.max_iterations) {
    throw Error(ErrorCode::InvalidConfig, "need 0 < max_iterations and min_iterations <= max_iterations");
  }
  if (c.lo.inner_iterations < 0 || c.lo.sample_multiplier < 1) {
    throw Error(ErrorCode::InvalidConfig, "invalid local optimization settings");
  }
  if (!(c.lo.spatial_weight >= 0.0)) throw Error(ErrorCode::InvalidConfig, "spatial weight must be nonnegative");
}

std::size_t required_iterations_raw(double w, std::size_t m, double confidence) {
  constexpr std::size_t kInfinite = std::numeric_limits<std::size_t>::max();
  if (!(w > 0.0)) return kInfinite;
  if (w >= 1.0) return 1;
  const double p = std::pow(w, static_cast<double>(m));
  if (p <= 0.0) return kInfinite;
  const double k = std::ceil(std::log1p(-confidence) / std::log1p(-p));
  if (!(k < 1e18)) return kInfinite;
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

std::size_t required_iterations(double w, std::size_t m, double confidence, std::size_t min_iterations,
                                std::size_t max_iterations) {
  return std::clamp(required_iterations_raw(w, m, confidence), min_iterations, max_iterations);
}

EstimationReport estimate(const CorrespondenceSet& input, const EstimationConfig& config,
                          const std::optional<ViewIntrinsics>& intrinsics) {
  const auto t_start = Clock::now();
  validate(config);
  if (input.kind != config.problem) throw Error(ErrorCode::KindMismatch, "set kind differs from config problem");
  const ProblemKind kind = config.problem;
  const std::size_t m = minimal_sample_size(kind);
  const std::size_t n = input.size();
  if (n < m) throw Error(ErrorCode::TooFewPoints);
  if ((kind == ProblemKind::Essential || kind == ProblemKind::AbsolutePose) && !intrinsics) {
    throw Error(ErrorCode::MissingIntrinsics);
  }

  EstimationReport report;
  auto t = Clock::now();
  const Frame frame = normalize(input, config.threshold, intrinsics);
  report.timings.normalize = ms_since(t);
  report.normalized_threshold = frame.threshold;
  report.sampler = config.sampler.value_or(default_sampler(kind));
  report.fo = config.fo.value_or(default_fo(kind));

  const std::span<const Correspondence> points = frame.set.items;
  Sampler sampler(report.sampler, frame.set, m, config.seed, config.sampler_options);
  Rng lo_rng(splitmix64(config.seed));

  OptimizeContext ctx;
  ctx.kind = kind;
  ctx.points = points;
  ctx.scoring = make_scoring(config.scoring, frame.threshold, kind);
  ctx.lm = config.lm;
  std::optional<NeighborGraph> graph;
  if (config.lo.kind == LOKind::GraphCut && n <= config.lo.gc_switch_threshold) {
    const double cell = config.lo.neighborhood_grid_cell > 0.0 ? config.lo.neighborhood_grid_cell
                                                                : default_cell_size(kind, points);
    graph = build_neighbor_graph(kind, points, cell);
    ctx.graph = &*graph;
  }

  std::optional<Model> best;
  ScoreValue best_score = ScoreValue::worst();
  std::size_t required = config.max_iterations;
  std::vector<Correspondence> sample;

  auto run_lo = [&] {
    const auto t_lo = Clock::now();
    const auto r = local_optimize(*best, best_score, ctx, config.lo, lo_rng);
    report.timings.local_optimization += ms_since(t_lo);
    ++report.lo_invocations;
    report.lo_graph_cut += r.path == LOPath::GraphCut;
    report.lo_nested += r.path == LOPath::NestedRansac;
    best = r.model;
    best_score = r.score;
    report.best_history.push_back(best_score.value);
  };

  for (std::size_t it = 0; it < config.max_iterations && (it < config.min_iterations || it < required); ++it) {
    ++report.iterations_run;
    t = Clock::now();
    const MinimalSample draw = sampler.draw();
    report.timings.sampling += ms_since(t);

    t = Clock::now();
    const bool sample_ok = check_sample(frame.set, draw.indices).ok;
    report.timings.sample_check += ms_since(t);
    if (!sample_ok) {
      ++report.samples_rejected_degenerate;
      continue;
    }

    sample.clear();
    for (std::size_t i : draw.indices) sample.push_back(points[i]);
    t = Clock::now();
    HypothesisList hypotheses;
    try {
      hypotheses = solve_minimal(kind, sample);
    } catch (const Error&) {
      hypotheses.clear();
    }
    report.timings.minimal += ms_since(t);

    bool new_best = false;
    for (const Model& h : hypotheses) {
      t = Clock::now();
      const bool model_ok = check_model(h).ok;
      report.timings.model_check += ms_since(t);
      if (!model_ok) {
        ++report.models_rejected_degenerate;
        continue;
      }
      t = Clock::now();
      const ScoreValue s = score_model(ctx.scoring, h, points, config.preemption ? best_score : ScoreValue::worst());
      report.timings.scoring += ms_since(t);
      ++report.hypotheses_scored;
      report.hypotheses_preempted += s.preempted;
      if (s.preempted || !improves(s, best_score)) continue;
      best = h;
      best_score = s;
      new_best = true;
      ++report.best_updates;
      report.best_history.push_back(best_score.value);
    }
    if (!new_best) continue;
    if (config.lo.kind != LOKind::None) run_lo();
    required = required_iterations(static_cast<double>(best_score.inlier_count) / static_cast<double>(n), m,
                                   config.confidence, config.min_iterations, config.max_iterations);
  }

  if (!best) throw Error(ErrorCode::NoModelFound, "every hypothesis was rejected");
  if (config.lo.kind != LOKind::None && report.lo_invocations == 0) run_lo();

  t = Clock::now();
  const auto fo = final_optimize(*best, best_score, ctx, report.fo);
  report.timings.final_optimization = ms_since(t);
  report.fo_improved = fo.improved;

  report.model = denormalize(fo.model, frame);
  const bool input_frame = reports_in_input_frame(kind);
  const std::span<const Correspondence> report_points = input_frame ? std::span(input.items) : points;
  const ScoringFn report_fn = make_scoring(config.scoring, input_frame ? config.threshold : frame.threshold, kind);
  const auto residuals = compute_residuals_parallel(report.model, report_points);
  report.score = score_residuals(report_fn, residuals);
  report.inlier_mask.resize(n);
  for (std::size_t i = 0; i < n; ++i) report.inlier_mask[i] = residuals[i] < report_fn.threshold;
  report.timings.total = ms_since(t_start);
  return report;
}

}  // namespace rg
