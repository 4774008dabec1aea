#pragma once

#include "rg/bench/metrics.hpp"
#include "rg/bench/scene.hpp"
#include "rg/engine.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rg::bench {

// Text formats: whitespace-separated reals, one record per line, '#' starts a
// comment. Correspondences: `x1 y1 x2 y2 [q]`, `u v X Y Z [q]` (2D-3D, image
// point first) or `X1 Y1 Z1 X2 Y2 Z2 [q]`; the quality column must be present
// on all lines or on none. Intrinsics: one K (shared by both views) or two,
// each as three rows of three. Ground truth: three rows of the model matrix
// followed by three rows of [R | t]. All parse errors throw Io.

CorrespondenceSet parse_correspondences(std::istream& in, ProblemKind kind);
void write_correspondences(std::ostream& out, const CorrespondenceSet& set);

ViewIntrinsics parse_intrinsics(std::istream& in);
void write_intrinsics(std::ostream& out, const ViewIntrinsics& K);

GroundTruth parse_ground_truth(std::istream& in, ProblemKind kind);
void write_ground_truth(std::ostream& out, const GroundTruth& gt);

CorrespondenceSet read_correspondences(const std::string& path, ProblemKind kind);
ViewIntrinsics read_intrinsics(const std::string& path);
GroundTruth read_ground_truth(const std::string& path, ProblemKind kind);

/// Writes `<prefix>.txt`, `<prefix>.gt.txt` and, when present, `<prefix>.K.txt`.
void save_scene(const std::string& prefix, const ScenePair& pair);
/// Reads the files written by save_scene; the intrinsics file is optional.
ScenePair load_scene(const std::string& prefix, ProblemKind kind);

/// Report with keys model (row-major; 3x4 [R | t] for poses), inliers, score,
/// inlier_count, iterations, counters and config; timings_ms only on request
/// so that default output is reproducible byte for byte.
nlohmann::json report_json(const EstimationReport& report, const EstimationConfig& config, bool timings);
nlohmann::json summary_json(const MetricSummary& summary);

/// Per-pair CSV; runtime_s is written only on request.
void write_results_csv(std::ostream& out, std::span<const PairResult> results, bool timings);
std::vector<PairResult> parse_results_csv(std::istream& in);

}  // namespace rg::bench
