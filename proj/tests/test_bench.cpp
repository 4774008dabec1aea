#include <doctest.h>

#include "rg/bench/io.hpp"
#include "rg/bench/metrics.hpp"
#include "rg/bench/scene.hpp"
#include "rg/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

using namespace rg;
using namespace rg::bench;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const ProblemKind kAllKinds[] = {ProblemKind::Homography, ProblemKind::Fundamental, ProblemKind::Essential,
                                 ProblemKind::AbsolutePose, ProblemKind::Rigid};

// Residual of the ground truth in the frame its model lives in.
double truth_residual(const ScenePair& s, const Correspondence& c) {
  Correspondence n = c;
  if (s.set.kind == ProblemKind::Essential) {
    n.source = intrinsic_normalize(c.source.hnormalized(), s.intrinsics->first).homogeneous();
    n.target = intrinsic_normalize(c.target.hnormalized(), s.intrinsics->second).homogeneous();
  } else if (s.set.kind == ProblemKind::AbsolutePose) {
    n.target = intrinsic_normalize(c.target.hnormalized(), s.intrinsics->second).homogeneous();
  }
  return residual(s.truth.model, n);
}

// Reference evaluator: recall curve integrated numerically from sorted errors.
double reference_auc(std::vector<double> e, double t) {
  std::sort(e.begin(), e.end());
  double area = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < e.size() && e[i] < t; ++i) {
    area += static_cast<double>(i) / static_cast<double>(e.size()) * (e[i] - prev);
    prev = e[i];
  }
  const auto below = std::count_if(e.begin(), e.end(), [&](double x) { return x < t; });
  area += static_cast<double>(below) / static_cast<double>(e.size()) * (t - prev);
  return area / t;
}

}  // namespace

TEST_CASE("noise-free full-inlier scenes satisfy the ground truth") {
  for (ProblemKind kind : kAllKinds) {
    const auto s = generate_scene(kind, 200, 1.0, 0.0, 11);
    CHECK(s.set.kind == kind);
    CHECK(s.truth.model.kind == kind);
    CHECK(s.set.has_quality);
    for (const auto& c : s.set.items) REQUIRE(truth_residual(s, c) < 1e-8);
    CHECK(std::count(s.planted.begin(), s.planted.end(), true) == 200);
  }
}

TEST_CASE("planted counts, determinism and argument checks") {
  for (ProblemKind kind : kAllKinds) {
    const auto s = generate_scene(kind, 100, 0.5, 1.0, 12);
    CHECK(s.set.size() == 100);
    CHECK(std::count(s.planted.begin(), s.planted.end(), true) == 50);
    std::ostringstream a, b;
    write_correspondences(a, s.set);
    write_correspondences(b, generate_scene(kind, 100, 0.5, 1.0, 12).set);
    CHECK(a.str() == b.str());
    std::ostringstream c;
    write_correspondences(c, generate_scene(kind, 100, 0.5, 1.0, 13).set);
    CHECK(a.str() != c.str());
  }
  CHECK_THROWS_AS(generate_scene(ProblemKind::Fundamental, 6, 0.5, 1.0, 0), Error);
  CHECK_THROWS_AS(generate_scene(ProblemKind::Homography, 100, 0.0, 1.0, 0), Error);
  CHECK_THROWS_AS(generate_scene(ProblemKind::Homography, 100, 1.5, 1.0, 0), Error);
  CHECK_THROWS_AS(generate_scene(ProblemKind::Homography, 100, 0.5, -1.0, 0), Error);
}

TEST_CASE("generator noise has the requested scale") {
  // Mean chi distance: sqrt(pi / 2) sigma in 2D, 2 sqrt(2 / pi) sigma in 3D.
  const auto h = generate_scene(ProblemKind::Homography, 4000, 1.0, 1.0, 14);
  double sum = 0.0;
  for (const auto& c : h.set.items) {
    sum += ((h.truth.model.matrix * c.source).hnormalized() - c.target.hnormalized()).norm();
  }
  CHECK(sum / 4000.0 == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(0.1));

  const auto r = generate_scene(ProblemKind::Rigid, 4000, 1.0, 0.01, 15);
  sum = 0.0;
  for (const auto& c : r.set.items) sum += residual(r.truth.model, c);
  CHECK(sum / 4000.0 == doctest::Approx(0.01 * 2.0 * std::sqrt(2.0 / std::numbers::pi)).epsilon(0.1));
}

TEST_CASE("quality scores prefer inliers") {
  const auto s = generate_scene(ProblemKind::Fundamental, 1000, 0.3, 1.0, 16);
  double in = 0.0, out = 0.0;
  for (std::size_t i = 0; i < s.set.size(); ++i) (s.planted[i] ? in : out) += s.set[i].quality;
  CHECK(in / 300.0 > 2.0 * out / 700.0);
}

TEST_CASE("auc examples") {
  const std::vector<double> zeros(7, 0.0), large{11, 12, kInf};
  CHECK(auc(zeros, 10) == 1.0);
  CHECK(auc(large, 10) == 0.0);
  CHECK(auc(std::vector<double>{5.0}, 10) == doctest::Approx(0.5));
  CHECK(auc(std::vector<double>{kInf}, 10) == 0.0);
}

TEST_CASE("auc matches a trapezoid rule within half a grid step") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> e(1 + uniform_index(rng, 50));
    for (auto& x : e) x = uniform_real(rng) < 0.1 ? kInf : uniform_real(rng, 0, 15);
    const double t = uniform_real(rng, 1, 20);
    const int samples = 2000;
    double trap = 0.0;
    for (int k = 0; k < samples; ++k) {
      trap += 0.5 * (recall_at(e, t * k / samples) + recall_at(e, t * (k + 1) / samples)) / samples;
    }
    REQUIRE(std::abs(auc(e, t) - trap) <= 1.0 / (2.0 * samples) + 1e-12);
    REQUIRE(auc(e, t) == doctest::Approx(reference_auc(e, t)).epsilon(1e-12));
  }
}

TEST_CASE("summary metrics") {
  std::vector<PairResult> perfect(4);
  for (std::size_t i = 0; i < 4; ++i) perfect[i] = {"p" + std::to_string(i), true, 0, 0, 0, false, 10, 100, 0.5};
  auto s = evaluate(perfect);
  for (const auto& [t, v] : s.auc_at) CHECK(v == 1.0);
  CHECK(s.median_error_deg == 0.0);
  CHECK(s.maa == 1.0);
  CHECK(s.mean_runtime_s == doctest::Approx(0.5));

  std::vector<PairResult> half = perfect;
  half[1] = failed_result("p1");
  half[3] = failed_result("p3");
  s = evaluate(half);
  for (const auto& [t, v] : s.auc_at) CHECK(v == 0.5);
  CHECK(s.failures == 2);
  CHECK(std::isinf(s.median_error_deg));

  Rng rng(18);
  std::vector<PairResult> mixed;
  std::vector<double> errors;
  for (int i = 0; i < 31; ++i) {
    PairResult r = uniform_real(rng) < 0.15 ? failed_result("m") : PairResult{"m", true, 0, 0, uniform_real(rng, 0, 25), false, 0, 0, 0};
    mixed.push_back(r);
    errors.push_back(r.ok ? r.pose_deg : kInf);
  }
  s = evaluate(mixed);
  CHECK(s.auc_at.size() == 3);
  for (int t : {5, 10, 20}) CHECK(s.auc_at[t] == doctest::Approx(reference_auc(errors, t)).epsilon(1e-12));
  CHECK(s.auc_at[5] <= s.auc_at[10]);
  CHECK(s.auc_at[10] <= s.auc_at[20]);
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  CHECK(s.median_error_deg == sorted[15]);
  double maa = 0.0;
  for (int t = 1; t <= 10; ++t) maa += static_cast<double>(std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= t; })) / 31.0;
  CHECK(s.maa == doctest::Approx(maa / 10.0));
}

TEST_CASE("the ground truth assesses as error-free") {
  for (ProblemKind kind : kAllKinds) {
    const auto s = generate_scene(kind, 300, 0.5, 0.0, 19);
    EstimationReport r;
    r.model = s.truth.model;
    r.inlier_mask = s.planted;
    const auto a = assess(s, r);
    INFO(to_string(kind));
    CHECK(a.ok);
    CHECK(a.rotation_deg < 1e-5);
    CHECK(a.pose_deg < 1e-5);
    if (kind == ProblemKind::Rigid) CHECK(a.translation_err < 1e-9);
  }
}

TEST_CASE("text formats round-trip losslessly") {
  for (ProblemKind kind : kAllKinds) {
    auto s = generate_scene(kind, 50, 0.6, 1.0, 20);
    for (bool q : {true, false}) {
      s.set.has_quality = q;
      std::stringstream io;
      write_correspondences(io, s.set);
      const auto back = parse_correspondences(io, kind);
      REQUIRE(back.size() == s.set.size());
      CHECK(back.has_quality == q);
      for (std::size_t i = 0; i < back.size(); ++i) {
        REQUIRE((back[i].source - s.set[i].source).norm() <= 1e-12 * (1 + s.set[i].source.norm()));
        REQUIRE((back[i].target - s.set[i].target).norm() <= 1e-12 * (1 + s.set[i].target.norm()));
        if (q) REQUIRE(back[i].quality == s.set[i].quality);
      }
    }
    std::stringstream g;
    write_ground_truth(g, s.truth);
    const auto gt = parse_ground_truth(g, kind);
    CHECK(gt.model.matrix == s.truth.model.matrix);
    CHECK(gt.rotation == s.truth.rotation);
    CHECK(gt.translation == s.truth.translation);
  }
  std::stringstream one("# camera\n800 0 320\n0 800 240\n\n0 0 1\n");
  const auto K = parse_intrinsics(one);
  CHECK(K.first.fx == 800);
  CHECK(K.second.cy == 240);
  std::stringstream two;
  write_intrinsics(two, {{700, 710, 300, 200}, {900, 905, 310, 250}});
  const auto K2 = parse_intrinsics(two);
  CHECK(K2.first.fy == 710);
  CHECK(K2.second.fx == 900);
}

TEST_CASE("malformed text is rejected") {
  auto io_error = [](const std::string& text, ProblemKind kind) {
    std::stringstream in(text);
    try {
      parse_correspondences(in, kind);
    } catch (const Error& e) {
      return e.code() == ErrorCode::Io;
    }
    return false;
  };
  CHECK(io_error("1 2 3\n", ProblemKind::Homography));
  CHECK(io_error("1 2 3 4 0.5\n1 2 3 4\n", ProblemKind::Homography));
  CHECK(io_error("1 2 3 x\n", ProblemKind::Homography));
  CHECK(io_error("1 2 3 4 5 6 7 8\n", ProblemKind::Rigid));
  std::stringstream ok("# header\n\n1 2 3 4 # trailing\n  5 6 7 8\n");
  CHECK(parse_correspondences(ok, ProblemKind::Homography).size() == 2);
  std::stringstream pose("10 20 1 2 3\n");
  const auto p = parse_correspondences(pose, ProblemKind::AbsolutePose);
  CHECK(p[0].source == Vec3(1, 2, 3));
  CHECK(p[0].target == Vec3(10, 20, 1));
  std::stringstream bad_k("1 0 0\n0 1 0\n");
  CHECK_THROWS_AS(parse_intrinsics(bad_k), Error);
  CHECK_THROWS_AS(read_correspondences("/nonexistent/file.txt", ProblemKind::Homography), Error);
}

TEST_CASE("results CSV round-trips, infinities included") {
  std::vector<PairResult> rs{{"a", true, 0.1, 0.25, 0.25, false, 10, 20, 0.125}, failed_result("b")};
  for (bool timings : {false, true}) {
    std::stringstream io;
    write_results_csv(io, rs, timings);
    const auto back = parse_results_csv(io);
    REQUIRE(back.size() == 2);
    CHECK(back[0].name == "a");
    CHECK(back[0].translation_err == 0.25);
    CHECK(back[0].iterations == 20);
    CHECK(back[0].runtime_s == (timings ? 0.125 : 0.0));
    CHECK_FALSE(back[1].ok);
    CHECK(std::isinf(back[1].pose_deg));
  }
}

TEST_CASE("report JSON layout") {
  EstimationReport r;
  r.model = Model::rigid(Mat3::Identity(), Vec3(1, 2, 3));
  r.inlier_mask = {true, false, true};
  r.score = {2.5, 2, 3, false};
  r.iterations_run = 9;
  EstimationConfig c;
  c.problem = ProblemKind::Rigid;
  const auto j = report_json(r, c, false);
  CHECK(j["model"].size() == 12);
  CHECK(j["model"][3] == 1.0);
  CHECK(j["inliers"] == nlohmann::json::array({0, 2}));
  CHECK(j["inlier_count"] == 2);
  CHECK(j["iterations"] == 9);
  CHECK_FALSE(j.contains("timings_ms"));
  CHECK(report_json(r, c, true).contains("timings_ms"));
  CHECK(j["config"]["problem"] == "rigid");
}
