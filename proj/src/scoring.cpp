#include "rg/scoring.hpp"

#include "rg/geom.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace rg {

namespace {

// Chi-square 0.99 quantiles for 2 and 3 degrees of freedom.
constexpr double kChi2Dof2 = 9.21034037197618;
constexpr double kChi2Dof3 = 11.344866730144373;

// Parallel loops only pay off above this many points.
constexpr std::ptrdiff_t kParallelMin = 1024;

// Unnormalized marginal likelihood Gamma((k-1)/2, r^2 / 2 sigma^2) / Gamma((k-1)/2).
double marginal(double r, double sigma_max, int dof) {
  const double x = r / sigma_max;
  if (dof == 3) return std::exp(-0.5 * x * x);
  return std::erfc(x / std::numbers::sqrt2);
}

}  // namespace

std::string_view to_string(ScoringKind kind) {
  switch (kind) {
    case ScoringKind::InlierCount: return "ransac";
    case ScoringKind::Msac: return "msac";
    case ScoringKind::MagsacPP: return "magsac++";
  }
  return "?";
}

ScoringKind scoring_from_string(std::string_view name) {
  if (name == "ransac" || name == "inliers" || name == "count") return ScoringKind::InlierCount;
  if (name == "msac") return ScoringKind::Msac;
  if (name == "magsac++" || name == "magsac" || name == "magsacpp") return ScoringKind::MagsacPP;
  throw Error(ErrorCode::InvalidConfig, "unknown scoring: " + std::string(name));
}

double ScoringFn::cutoff() const {
  switch (kind) {
    case ScoringKind::InlierCount:
    case ScoringKind::Msac: return threshold;
    case ScoringKind::MagsacPP: return threshold * std::sqrt(dof == 3 ? kChi2Dof3 : kChi2Dof2);
  }
  return threshold;
}

double ScoringFn::quality(double r) const {
  if (std::isnan(r)) return 0.0;
  r = std::abs(r);
  switch (kind) {
    case ScoringKind::InlierCount: return r < threshold ? 1.0 : 0.0;
    case ScoringKind::Msac: {
      const double u = r / threshold;
      return u < 1.0 ? 1.0 - u * u : 0.0;
    }
    case ScoringKind::MagsacPP: {
      const double rc = cutoff();
      if (r >= rc) return 0.0;
      const double floor = marginal(rc, threshold, dof);
      return (marginal(r, threshold, dof) - floor) / (1.0 - floor);
    }
  }
  return 0.0;
}

ScoringFn make_scoring(ScoringKind kind, double threshold, ProblemKind problem) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::InvalidConfig, "threshold must be positive");
  return {kind, threshold, target_is_3d(problem) ? 3 : 2};
}

int compare(const ScoreValue& a, const ScoreValue& b) {
  if (a.value != b.value) return a.value < b.value ? -1 : 1;
  if (a.inlier_count != b.inlier_count) return a.inlier_count < b.inlier_count ? -1 : 1;
  return 0;
}

ScoreValue score_model(const ScoringFn& fn, const Model& model, std::span<const Correspondence> points,
                       const ScoreValue& best) {
  const ModelEvaluator eval(model);
  const std::size_t n = points.size();
  const double q_max = fn.q_max();
  ScoreValue s;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = eval(points[k]);
    s.value += fn.quality(r);
    s.inlier_count += r < fn.threshold;
    s.evaluated = k + 1;
    if (s.evaluated < n && should_preempt(s.value, s.evaluated, n, q_max, best.value)) {
      s.preempted = true;
      break;
    }
  }
  return s;
}

ScoreValue score_model(const ScoringFn& fn, const Model& model, const CorrespondenceSet& set,
                       const ScoreValue& best) {
  if (set.kind != model.kind) throw Error(ErrorCode::KindMismatch);
  return score_model(fn, model, set.items, best);
}

std::vector<double> compute_residuals(const Model& model, std::span<const Correspondence> points) {
  const ModelEvaluator eval(model);
  std::vector<double> r(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) r[i] = eval(points[i]);
  return r;
}

std::vector<double> compute_residuals_parallel(const Model& model, std::span<const Correspondence> points) {
  const ModelEvaluator eval(model);
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<double> r(points.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::ptrdiff_t i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = eval(points[static_cast<std::size_t>(i)]);
  return r;
}

ScoreValue score_residuals(const ScoringFn& fn, std::span<const double> residuals) {
  ScoreValue s;
  for (double r : residuals) {
    s.value += fn.quality(r);
    s.inlier_count += r < fn.threshold;
  }
  s.evaluated = residuals.size();
  return s;
}

ScoreValue score_model_parallel(const ScoringFn& fn, const Model& model, std::span<const Correspondence> points) {
  const ModelEvaluator eval(model);
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<double> q(points.size());
  std::vector<unsigned char> inlier(points.size());
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double r = eval(points[k]);
    q[k] = fn.quality(r);
    inlier[k] = r < fn.threshold;
  }
  // Summed in storage order so the value matches the serial kernel exactly.
  ScoreValue s;
  for (std::size_t k = 0; k < q.size(); ++k) {
    s.value += q[k];
    s.inlier_count += inlier[k];
  }
  s.evaluated = q.size();
  return s;
}

std::vector<std::size_t> select_inliers(std::span<const double> residuals, double tau) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (residuals[i] < tau) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> select_inliers(const Model& model, std::span<const Correspondence> points, double tau) {
  return select_inliers(compute_residuals(model, points), tau);
}

}  // namespace rg
