#include "rg/bench/io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace rg::bench {

namespace {

constexpr int kDigits = std::numeric_limits<double>::max_digits10;

// Numeric rows of a text file with comments and blank lines removed.
struct Row {
  std::size_t line = 0;
  std::vector<double> values;
};

std::vector<Row> parse_rows(std::istream& in) {
  std::vector<Row> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    Row row{number, {}};
    std::string token;
    while (fields >> token) {
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        throw Error(ErrorCode::Io, "line " + std::to_string(number) + ": not a number: " + token);
      }
      row.values.push_back(v);
    }
    if (!row.values.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

[[noreturn]] void bad_row(const Row& row, const std::string& what) {
  throw Error(ErrorCode::Io, "line " + std::to_string(row.line) + ": " + what);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << std::setprecision(kDigits);
  return out;
}

Mat3 matrix_from_rows(std::span<const Row> rows, std::size_t first) {
  Mat3 M;
  for (int r = 0; r < 3; ++r) {
    const Row& row = rows[first + static_cast<std::size_t>(r)];
    if (row.values.size() != 3) bad_row(row, "expected 3 values");
    for (int c = 0; c < 3; ++c) M(r, c) = row.values[static_cast<std::size_t>(c)];
  }
  return M;
}

void write_matrix(std::ostream& out, const Mat3& M) {
  for (int r = 0; r < 3; ++r) out << M(r, 0) << ' ' << M(r, 1) << ' ' << M(r, 2) << '\n';
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(kDigits) << v;
  return s.str();
}

}  // namespace

CorrespondenceSet parse_correspondences(std::istream& in, ProblemKind kind) {
  const std::size_t width = kind == ProblemKind::Rigid ? 6 : kind == ProblemKind::AbsolutePose ? 5 : 4;
  CorrespondenceSet set{kind, {}, false};
  const auto rows = parse_rows(in);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& v = rows[i].values;
    if (v.size() != width && v.size() != width + 1) bad_row(rows[i], "expected " + std::to_string(width) + " or " + std::to_string(width + 1) + " values");
    const bool q = v.size() == width + 1;
    if (i == 0) set.has_quality = q;
    if (q != set.has_quality) bad_row(rows[i], "quality column present on some lines only");
    const double quality = q ? v.back() : 0.0;
    switch (kind) {
      case ProblemKind::Homography:
      case ProblemKind::Fundamental:
      case ProblemKind::Essential:
        set.items.push_back(Correspondence::image_pair(Vec2(v[0], v[1]), Vec2(v[2], v[3]), quality));
        break;
      case ProblemKind::AbsolutePose:
        set.items.push_back(Correspondence::world_to_image(Vec3(v[2], v[3], v[4]), Vec2(v[0], v[1]), quality));
        break;
      case ProblemKind::Rigid:
        set.items.push_back(Correspondence::cloud_pair(Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]), quality));
        break;
    }
  }
  return set;
}

void write_correspondences(std::ostream& out, const CorrespondenceSet& set) {
  const auto precision = out.precision(kDigits);
  for (const auto& c : set.items) {
    switch (set.kind) {
      case ProblemKind::Homography:
      case ProblemKind::Fundamental:
      case ProblemKind::Essential: {
        const Vec2 a = c.source.hnormalized(), b = c.target.hnormalized();
        out << a.x() << ' ' << a.y() << ' ' << b.x() << ' ' << b.y();
        break;
      }
      case ProblemKind::AbsolutePose: {
        const Vec2 u = c.target.hnormalized();
        out << u.x() << ' ' << u.y() << ' ' << c.source.x() << ' ' << c.source.y() << ' ' << c.source.z();
        break;
      }
      case ProblemKind::Rigid:
        out << c.source.x() << ' ' << c.source.y() << ' ' << c.source.z() << ' ' << c.target.x() << ' '
            << c.target.y() << ' ' << c.target.z();
        break;
    }
    if (set.has_quality) out << ' ' << c.quality;
    out << '\n';
  }
  out.precision(precision);
}

ViewIntrinsics parse_intrinsics(std::istream& in) {
  const auto rows = parse_rows(in);
  if (rows.size() != 3 && rows.size() != 6) throw Error(ErrorCode::Io, "intrinsics need 3 or 6 rows");
  const CameraIntrinsics first = CameraIntrinsics::from_matrix(matrix_from_rows(rows, 0));
  const CameraIntrinsics second = rows.size() == 6 ? CameraIntrinsics::from_matrix(matrix_from_rows(rows, 3)) : first;
  return {first, second};
}

void write_intrinsics(std::ostream& out, const ViewIntrinsics& K) {
  const auto precision = out.precision(kDigits);
  write_matrix(out, K.first.matrix());
  write_matrix(out, K.second.matrix());
  out.precision(precision);
}

GroundTruth parse_ground_truth(std::istream& in, ProblemKind kind) {
  const auto rows = parse_rows(in);
  if (rows.size() != 6) throw Error(ErrorCode::Io, "ground truth needs 6 rows");
  GroundTruth gt;
  const Mat3 M = matrix_from_rows(rows, 0);
  for (int r = 0; r < 3; ++r) {
    const Row& row = rows[3 + static_cast<std::size_t>(r)];
    if (row.values.size() != 4) bad_row(row, "expected 4 values of [R | t]");
    for (int c = 0; c < 3; ++c) gt.rotation(r, c) = row.values[static_cast<std::size_t>(c)];
    gt.translation(r) = row.values[3];
  }
  gt.model = Model{kind, M, Vec3::Zero()};
  if (kind == ProblemKind::AbsolutePose || kind == ProblemKind::Rigid) gt.model.translation = gt.translation;
  return gt;
}

void write_ground_truth(std::ostream& out, const GroundTruth& gt) {
  const auto precision = out.precision(kDigits);
  write_matrix(out, gt.model.matrix);
  for (int r = 0; r < 3; ++r) {
    out << gt.rotation(r, 0) << ' ' << gt.rotation(r, 1) << ' ' << gt.rotation(r, 2) << ' ' << gt.translation(r) << '\n';
  }
  out.precision(precision);
}

CorrespondenceSet read_correspondences(const std::string& path, ProblemKind kind) {
  auto in = open_in(path);
  try {
    return parse_correspondences(in, kind);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

ViewIntrinsics read_intrinsics(const std::string& path) {
  auto in = open_in(path);
  try {
    return parse_intrinsics(in);
  } catch (const Error& e) {
    throw Error(ErrorCode::Io, path + ": " + e.what());
  }
}

GroundTruth read_ground_truth(const std::string& path, ProblemKind kind) {
  auto in = open_in(path);
  try {
    return parse_ground_truth(in, kind);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_scene(const std::string& prefix, const ScenePair& pair) {
  auto points = open_out(prefix + ".txt");
  points << "# " << to_string(pair.set.kind) << " n=" << pair.set.size() << " inlier_ratio=" << pair.inlier_ratio
         << " noise=" << pair.noise_sigma << " seed=" << pair.seed << '\n';
  write_correspondences(points, pair.set);
  auto gt = open_out(prefix + ".gt.txt");
  write_ground_truth(gt, pair.truth);
  if (pair.intrinsics) {
    auto K = open_out(prefix + ".K.txt");
    write_intrinsics(K, *pair.intrinsics);
  }
}

ScenePair load_scene(const std::string& prefix, ProblemKind kind) {
  ScenePair pair;
  pair.name = prefix;
  pair.set = read_correspondences(prefix + ".txt", kind);
  pair.truth = read_ground_truth(prefix + ".gt.txt", kind);
  if (std::ifstream probe(prefix + ".K.txt"); probe) pair.intrinsics = read_intrinsics(prefix + ".K.txt");
  return pair;
}

nlohmann::json report_json(const EstimationReport& report, const EstimationConfig& config, bool timings) {
  nlohmann::json j;
  const Model& m = report.model;
  std::vector<double> model;
  const bool pose = m.kind == ProblemKind::AbsolutePose || m.kind == ProblemKind::Rigid;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) model.push_back(m.matrix(r, c));
    if (pose) model.push_back(m.translation(r));
  }
  j["problem"] = to_string(m.kind);
  j["model"] = model;
  std::vector<std::size_t> inliers;
  for (std::size_t i = 0; i < report.inlier_mask.size(); ++i) {
    if (report.inlier_mask[i]) inliers.push_back(i);
  }
  j["inliers"] = inliers;
  j["score"] = report.score.value;
  j["inlier_count"] = report.score.inlier_count;
  j["iterations"] = report.iterations_run;
  j["counters"] = {{"samples_rejected_degenerate", report.samples_rejected_degenerate},
                   {"models_rejected_degenerate", report.models_rejected_degenerate},
                   {"hypotheses_scored", report.hypotheses_scored},
                   {"hypotheses_preempted", report.hypotheses_preempted},
                   {"best_updates", report.best_updates},
                   {"lo_invocations", report.lo_invocations},
                   {"lo_graph_cut", report.lo_graph_cut},
                   {"lo_nested", report.lo_nested},
                   {"fo_improved", report.fo_improved}};
  if (timings) {
    const auto& t = report.timings;
    j["timings_ms"] = {{"normalize", t.normalize},
                       {"sampling", t.sampling},
                       {"sample_check", t.sample_check},
                       {"minimal", t.minimal},
                       {"model_check", t.model_check},
                       {"scoring", t.scoring},
                       {"local_optimization", t.local_optimization},
                       {"final_optimization", t.final_optimization},
                       {"total", t.total}};
  }
  j["config"] = {{"problem", to_string(config.problem)},
                 {"threshold", config.threshold},
                 {"confidence", config.confidence},
                 {"min_iterations", config.min_iterations},
                 {"max_iterations", config.max_iterations},
                 {"sampler", to_string(report.sampler)},
                 {"scoring", to_string(config.scoring)},
                 {"lo", to_string(config.lo.kind)},
                 {"fo", to_string(report.fo)},
                 {"spatial_weight", config.lo.spatial_weight},
                 {"preemption", config.preemption},
                 {"seed", config.seed}};
  return j;
}

nlohmann::json summary_json(const MetricSummary& s) {
  nlohmann::json auc = nlohmann::json::object();
  for (const auto& [t, v] : s.auc_at) auc[std::to_string(t)] = v;
  auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"auc", auc},
          {"median_error_deg", finite_or_null(s.median_error_deg)},
          {"maa", s.maa},
          {"mean_runtime_s", s.mean_runtime_s},
          {"median_rotation_deg", finite_or_null(s.median_rotation_deg)},
          {"median_translation", finite_or_null(s.median_translation)},
          {"pairs", s.pairs},
          {"failures", s.failures}};
}

void write_results_csv(std::ostream& out, std::span<const PairResult> results, bool timings) {
  out << "name,ok,rotation_deg,translation_err,pose_deg,rotation_only,inliers,iterations";
  if (timings) out << ",runtime_s";
  out << '\n';
  for (const auto& r : results) {
    out << r.name << ',' << (r.ok ? 1 : 0) << ',' << format_double(r.rotation_deg) << ','
        << format_double(r.translation_err) << ',' << format_double(r.pose_deg) << ',' << (r.rotation_only ? 1 : 0)
        << ',' << r.inliers << ',' << r.iterations;
    if (timings) out << ',' << format_double(r.runtime_s);
    out << '\n';
  }
}

std::vector<PairResult> parse_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::Io, "empty results file");
  const bool timings = line.find("runtime_s") != std::string::npos;
  const std::size_t columns = timings ? 9 : 8;
  std::vector<PairResult> out;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != columns) throw Error(ErrorCode::Io, "line " + std::to_string(number) + ": expected " + std::to_string(columns) + " columns");
    try {
      PairResult r;
      r.name = f[0];
      r.ok = f[1] == "1";
      r.rotation_deg = std::stod(f[2]);
      r.translation_err = std::stod(f[3]);
      r.pose_deg = std::stod(f[4]);
      r.rotation_only = f[5] == "1";
      r.inliers = std::stoul(f[6]);
      r.iterations = std::stoul(f[7]);
      if (timings) r.runtime_s = std::stod(f[8]);
      out.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::Io, "line " + std::to_string(number) + ": malformed value");
    }
  }
  return out;
}

}  // namespace rg::bench
