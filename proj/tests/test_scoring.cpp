#include <doctest.h>

#include "rg/geom.hpp"
#include "rg/scoring.hpp"
#include "support/synth.hpp"

#include <cmath>
#include <functional>

using namespace rg;
namespace rt = rg::testing;

namespace {

// Adaptive Simpson quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * eps) return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) + simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), 1e-13, 50);
}

// Marginal chi likelihood of residual r over sigma in (0, sigma_max], integrated in log sigma.
double marginal_likelihood(double r, double sigma_max, int k) {
  auto f = [&](double u) {
    const double s = std::exp(u);
    return std::pow(s, 1.0 - k) * std::pow(r, k - 1) * std::exp(-r * r / (2 * s * s));
  };
  return integrate(f, std::log(1e-12), std::log(sigma_max));
}

std::vector<Correspondence> rigid_points(Rng& rng, std::size_t n) {
  std::vector<Correspondence> c;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 p(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), uniform_real(rng, -1, 1));
    c.push_back({p, p + uniform_real(rng, 0, 3) * rt::random_unit(rng), 0});
  }
  return c;
}

}  // namespace

TEST_CASE("point quality basics") {
  for (ScoringKind k : {ScoringKind::InlierCount, ScoringKind::Msac, ScoringKind::MagsacPP}) {
    const ScoringFn fn{k, 2.0, 2};
    CHECK(fn.quality(0.0) == fn.q_max());
    CHECK(fn.quality(fn.cutoff() * 1.0001) == 0.0);
    CHECK(fn.quality(std::nan("")) == 0.0);
    // Nonincreasing; continuous except for the hard count.
    double prev = fn.quality(0.0);
    for (double r = 0.001; r < 8.0; r += 0.001) {
      const double q = fn.quality(r);
      REQUIRE(q <= prev);
      if (k != ScoringKind::InlierCount) REQUIRE(prev - q < 0.01);
      prev = q;
    }
  }
  CHECK(ScoringFn{ScoringKind::Msac, 3.0, 2}.quality(3.0 / std::sqrt(2.0)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ScoringFn{ScoringKind::InlierCount, 3.0, 2}.quality(2.999) == 1.0);
  CHECK(ScoringFn{ScoringKind::InlierCount, 3.0, 2}.quality(3.0) == 0.0);
}

TEST_CASE("MAGSAC++ quality matches a quadrature of the marginal likelihood") {
  for (int k : {2, 3}) {
    const double tau = 1.5;
    const ScoringFn fn{ScoringKind::MagsacPP, tau, k};
    const double rc = fn.cutoff();
    const double top = marginal_likelihood(1e-7, tau, k);
    const double bottom = marginal_likelihood(rc, tau, k);
    for (int i = 0; i < 20; ++i) {
      const double r = rc * (i + 0.5) / 20.0;
      const double oracle = (marginal_likelihood(r, tau, k) - bottom) / (top - bottom);
      INFO("k=" << k << " r=" << r);
      CHECK(std::abs(fn.quality(r) - oracle) < 1e-4);
    }
  }
}

TEST_CASE("preemption rule arithmetic") {
  CHECK(should_preempt(10.0, 50, 100, 1.0, 70.0));
  CHECK_FALSE(should_preempt(10.0, 50, 100, 1.0, 59.5));
  Rng rng(41);
  const auto pts = rigid_points(rng, 100);
  const ScoringFn fn{ScoringKind::MagsacPP, 0.5, 3};
  const ScoreValue s = score_model(fn, Model::rigid(Mat3::Identity(), Vec3::Zero()), pts, ScoreValue{0.0, 0, 0, false});
  CHECK(s.evaluated == 100);
  CHECK_FALSE(s.preempted);
}

TEST_CASE("preemption soundness against full scoring") {
  Rng rng(42);
  int preempted = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto pts = rigid_points(rng, 20 + uniform_index(rng, 60));
    const Model m = Model::rigid(rt::random_rotation(rng, 0.05), 0.05 * rt::random_unit(rng));
    const ScoringKind kind = static_cast<ScoringKind>(uniform_index(rng, 3));
    const ScoringFn fn{kind, uniform_real(rng, 0.1, 1.5), 3};
    const ScoreValue full = score_model(fn, m, pts);
    const ScoreValue best{uniform_real(rng, 0, static_cast<double>(pts.size())), 0, 0, false};
    const ScoreValue s = score_model(fn, m, pts, best);
    if (s.preempted) {
      ++preempted;
      REQUIRE(full.value <= best.value);
      REQUIRE(s.evaluated < pts.size());
    } else {
      REQUIRE(s.value == full.value);
      REQUIRE(s.evaluated == pts.size());
    }
  }
  CHECK(preempted > 1000);
}

TEST_CASE("unpreempted score equals the brute-force sum; parallel kernel agrees") {
  Rng rng(43);
  const auto pts = rigid_points(rng, 5000);
  const Model m = Model::rigid(Mat3::Identity(), Vec3::Zero());
  for (ScoringKind k : {ScoringKind::InlierCount, ScoringKind::Msac, ScoringKind::MagsacPP}) {
    const ScoringFn fn{k, 0.7, 3};
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& c : pts) {
      const double r = (c.target - c.source).norm();
      sum += fn.quality(r);
      count += r < 0.7;
    }
    const ScoreValue s = score_model(fn, m, pts);
    CHECK(s.value == sum);
    CHECK(s.inlier_count == count);
    CHECK(s.evaluated == pts.size());
    const ScoreValue p = score_model_parallel(fn, m, pts);
    CHECK(p.value == s.value);
    CHECK(p.inlier_count == s.inlier_count);
  }
  CHECK(compute_residuals(m, pts) == compute_residuals_parallel(m, pts));
}

TEST_CASE("score ordering") {
  CHECK(compare({5.0, 7, 0, false}, {4.9, 20, 0, false}) > 0);
  CHECK(compare({5.0, 10, 0, false}, {5.0, 12, 0, false}) < 0);
  CHECK(compare({5.0, 10, 0, false}, {5.0, 10, 0, false}) == 0);
  CHECK_FALSE(improves({5.0, 10, 0, false}, {5.0, 10, 0, false}));
  CHECK(improves({5.0, 12, 0, false}, {5.0, 10, 0, false}));
}

TEST_CASE("inlier selection") {
  Rng rng(44);
  const Mat3 H = rt::random_homography(rng);
  std::vector<Correspondence> pts;
  std::vector<std::size_t> planted;
  for (std::size_t i = 0; i < 200; ++i) {
    const Vec3 x(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), 1);
    if (i % 3 == 0) {
      pts.push_back({x, Vec3(uniform_real(rng, 5, 9), uniform_real(rng, 5, 9), 1), 0});
    } else {
      pts.push_back({x, rt::apply_h(H, x), 0});
      planted.push_back(i);
    }
  }
  const Model m = Model::homography(H);
  CHECK(select_inliers(m, pts, 1e-6) == planted);
  CHECK(select_inliers(m, pts, 1e-300).size() <= planted.size());
  std::vector<std::size_t> all(200);
  for (std::size_t i = 0; i < 200; ++i) all[i] = i;
  CHECK(select_inliers(m, pts, 1e9) == all);
}

TEST_CASE("scoring is consistent across the normalization") {
  Rng rng(45);
  const auto ps = rt::pixel_scene(rng, 300, 1.0);
  std::vector<Vec2> a, b;
  for (const auto& c : ps.pixels) {
    a.push_back(c.source.head<2>());
    b.push_back(c.target.head<2>());
  }
  const auto [T1, T2] = hartley_normalize_pair(a, b);
  std::vector<Correspondence> n;
  for (std::size_t i = 0; i < a.size(); ++i) n.push_back({T1.apply(a[i]).homogeneous(), T2.apply(b[i]).homogeneous(), 0});
  const Model raw = Model::fundamental(ps.F);
  const Model norm = Model::fundamental(T2.inverse_matrix().transpose() * ps.F * T1.inverse_matrix());
  for (ScoringKind k : {ScoringKind::InlierCount, ScoringKind::Msac, ScoringKind::MagsacPP}) {
    const ScoreValue s_raw = score_model({k, 2.0, 2}, raw, ps.pixels);
    const ScoreValue s_norm = score_model({k, 2.0 * T1.scale, 2}, norm, n);
    CHECK(s_raw.value == doctest::Approx(s_norm.value).epsilon(1e-9));
    CHECK(s_raw.inlier_count == s_norm.inlier_count);
  }
}
