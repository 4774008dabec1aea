#include <doctest.h>

#include "rg/geom.hpp"
#include "rg/minimal.hpp"
#include "rg/polynomial.hpp"
#include "support/companion.hpp"
#include "support/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>

using namespace rg;
namespace rt = rg::testing;

namespace {

double max_residual(const Model& m, std::span<const Correspondence> sample) {
  double worst = 0.0;
  for (const auto& c : sample) worst = std::max(worst, residual(m, c));
  return worst;
}

std::vector<Correspondence> homography_sample(Rng& rng, Mat3& H) {
  H = rt::random_homography(rng);
  std::vector<Correspondence> s;
  const Vec2 corners[4] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  for (const auto& c : corners) {
    const Vec3 x = (c + Vec2(uniform_real(rng, -0.3, 0.3), uniform_real(rng, -0.3, 0.3))).homogeneous();
    s.push_back({x, rt::apply_h(H, x), 0});
  }
  return s;
}

}  // namespace

TEST_CASE("canonical_sign") {
  Mat3 M = -2.0 * Mat3::Identity();
  const Mat3 c = canonical_sign(M);
  CHECK(c(0, 0) > 0.0);
  CHECK(c.norm() == doctest::Approx(1.0));
}

TEST_CASE("4-point homography") {
  std::vector<Correspondence> id;
  for (const Vec2& p : {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}) id.push_back({p.homogeneous(), p.homogeneous(), 0});
  const auto I = solve_h_4pt(id);
  REQUIRE(I.size() == 1);
  CHECK((I[0].matrix - Mat3::Identity()).norm() < 1e-10);

  Rng rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    Mat3 H;
    const auto s = homography_sample(rng, H);
    const auto hyp = solve_h_4pt(s);
    REQUIRE(hyp.size() == 1);
    CHECK(max_residual(hyp[0], s) < 1e-8);
    CHECK(rt::distance_up_to_sign(hyp[0].matrix, H) < 1e-8);
  }

  std::vector<Correspondence> collinear;
  for (double x : {0.0, 1.0, 2.0, 3.0}) collinear.push_back({Vec3(x, 0, 1), Vec3(x, 2 * x, 1), 0});
  CHECK(solve_h_4pt(collinear).empty());
}

TEST_CASE("7-point fundamental matrix") {
  Rng rng(2);
  int found = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto scene = rt::two_view_scene(rng, 7);
    const auto hyp = solve_f_7pt(scene.normalized);
    REQUIRE(!hyp.empty());
    REQUIRE(hyp.size() <= 3);
    double best = 1e9;
    for (const auto& m : hyp) {
      CHECK(satisfies_invariants(m));
      for (const auto& c : scene.normalized) CHECK(std::abs(c.target.dot(m.matrix * c.source)) < 1e-8);
      best = std::min(best, rt::distance_up_to_sign(m.matrix, rt::essential_of(scene)));
    }
    found += best < 1e-6;
  }
  CHECK(found >= 999);
}

TEST_CASE("7-point solution count matches the real roots of the oracle cubic") {
  Rng rng(3);
  int three = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Correspondence> s;
    for (int i = 0; i < 7; ++i) {
      s.push_back({Vec3(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), 1),
                   Vec3(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), 1), 0});
    }
    // Oracle: null space by SVD, cubic coefficients by interpolating det at 4 points.
    Eigen::MatrixXd A(7, 9);
    for (int i = 0; i < 7; ++i) {
      const Vec3& a = s[i].source;
      const Vec3& b = s[i].target;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) A(i, r * 3 + c) = b(r) * a(c);
      }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
    auto reshape = [](const Eigen::VectorXd& v) {
      Mat3 M;
      for (int k = 0; k < 9; ++k) M(k / 3, k % 3) = v(k);
      return M;
    };
    const Mat3 F1 = reshape(svd.matrixV().col(7)), F2 = reshape(svd.matrixV().col(8));
    Eigen::Matrix4d V;
    Eigen::Vector4d d;
    for (int k = 0; k < 4; ++k) {
      const double t = k - 1.5;
      V.row(k) << 1, t, t * t, t * t * t;
      d(k) = (F1 + t * F2).determinant();
    }
    const Eigen::Vector4d coef = V.fullPivLu().solve(d);
    const auto oracle = rt::companion_roots(Polynomial({coef(0), coef(1), coef(2), coef(3)}));
    int real = 0;
    for (const auto& z : oracle) real += std::abs(z.imag()) < 1e-9 * std::max(1.0, std::abs(z));
    const auto hyp = solve_f_7pt(s);
    CHECK(static_cast<int>(hyp.size()) == real);
    three += real == 3;
    for (const auto& m : hyp) CHECK(satisfies_invariants(m));
  }
  CHECK(three > 0);
}

TEST_CASE("7-point with duplicated points never returns NaN") {
  Rng rng(4);
  const auto scene = rt::two_view_scene(rng, 7);
  auto s = scene.normalized;
  s[5] = s[0];
  s[6] = s[1];
  for (const auto& m : solve_f_7pt(s)) {
    CHECK(m.matrix.allFinite());
    CHECK(satisfies_invariants(m));
  }
}

TEST_CASE("5-point essential matrix") {
  Rng rng(5);
  int found = 0;
  std::size_t max_count = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto scene = rt::two_view_scene(rng, 5);
    const auto hyp = solve_e_5pt(scene.normalized);
    max_count = std::max(max_count, hyp.size());
    double best = 1e9;
    for (const auto& m : hyp) {
      CHECK(satisfies_invariants(m));
      const Mat3& E = m.matrix;
      CHECK(E.norm() == doctest::Approx(1.0));
      const Mat3 trace_constraint = 2.0 * E * E.transpose() * E - (E * E.transpose()).trace() * E;
      CHECK(trace_constraint.norm() < 1e-6);
      best = std::min(best, rt::distance_up_to_sign(E, rt::essential_of(scene)));
    }
    found += best < 1e-6;
  }
  CHECK(found >= 999);
  CHECK(max_count <= 10);
}

TEST_CASE("5-point solutions satisfy the epipolar constraint on the sample") {
  Rng rng(6);
  int ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto scene = rt::two_view_scene(rng, 5);
    const auto hyp = solve_e_5pt(scene.normalized);
    double best = 1e9;
    for (const auto& m : hyp) best = std::min(best, max_residual(m, scene.normalized));
    ok += best < 1e-8;
  }
  CHECK(ok >= 999);
}

TEST_CASE("5-point pure translation") {
  Rng rng(7);
  const Vec3 t(1, 0, 0);
  std::vector<Correspondence> s;
  for (int i = 0; i < 5; ++i) {
    const Vec3 X(uniform_real(rng, -2, 2), uniform_real(rng, -2, 2), uniform_real(rng, 4, 8));
    const Vec3 Y = X + t;
    s.push_back({X / X.z(), Y / Y.z(), 0});
  }
  const auto hyp = solve_e_5pt(s);
  double best = 1e9;
  for (const auto& m : hyp) best = std::min(best, rt::distance_up_to_sign(m.matrix, rt::cross_matrix(t)));
  CHECK(best < 1e-6);
}

TEST_CASE("5-point solutions are sign-canonical and unique") {
  Rng rng(8);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<Correspondence> s;
    for (int i = 0; i < 5; ++i) {
      s.push_back({Vec3(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), 1),
                   Vec3(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), 1), 0});
    }
    const auto hyp = solve_e_5pt(s);
    REQUIRE(hyp.size() <= 10);
    for (std::size_t a = 0; a < hyp.size(); ++a) {
      REQUIRE(satisfies_invariants(hyp[a]));
      REQUIRE((canonical_sign(hyp[a].matrix) - hyp[a].matrix).norm() < 1e-12);
      for (std::size_t b = a + 1; b < hyp.size(); ++b) REQUIRE(rt::distance_up_to_sign(hyp[a].matrix, hyp[b].matrix) > 1e-9);
    }
  }
}

TEST_CASE("P3P") {
  Rng rng(9);
  int found = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = rt::pnp_sample(rng, 3);
    const auto hyp = solve_p3p(s.corr);
    REQUIRE(hyp.size() <= 4);
    bool hit = false;
    for (const auto& m : hyp) {
      CHECK(satisfies_invariants(m));
      CHECK(max_residual(m, s.corr) < 1e-8);
      hit = hit || (rotation_error_deg(m.rotation(), s.R) < 1e-6 && (m.translation - s.t).norm() < 1e-6);
    }
    found += hit;
  }
  CHECK(found >= 999);
}

TEST_CASE("P3P on a fronto-parallel plane at depth 5") {
  std::vector<Correspondence> s;
  for (const Vec3& X : {Vec3(-1, -1, 5), Vec3(1, -0.5, 5), Vec3(0, 1, 5)}) s.push_back({X, X / X.z(), 0});
  const auto hyp = solve_p3p(s);
  REQUIRE(!hyp.empty());
  double best = 1e9;
  for (const auto& m : hyp) best = std::min(best, (m.rotation() - Mat3::Identity()).norm() + m.translation.norm());
  CHECK(best < 1e-8);
  // The camera centre sits at depth 5 below the plane for the true solution.
  bool depth_ok = false;
  for (const auto& m : hyp) {
    const Vec3 centre = -m.rotation().transpose() * m.translation;
    depth_ok = depth_ok || std::abs((Vec3(0, 0, 5) - centre).z() - 5.0) < 1e-8;
  }
  CHECK(depth_ok);
}

TEST_CASE("rigid 3-point") {
  std::vector<Correspondence> same;
  for (const Vec3& p : {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}) same.push_back({p, p, 0});
  auto hyp = solve_rigid_3pt(same);
  REQUIRE(hyp.size() == 1);
  CHECK((hyp[0].rotation() - Mat3::Identity()).norm() < 1e-12);
  CHECK(hyp[0].translation.norm() < 1e-12);

  const Mat3 Rz = Eigen::AngleAxisd(M_PI / 2, Vec3::UnitZ()).toRotationMatrix();
  std::vector<Correspondence> rotated;
  for (const Vec3& p : {Vec3(1, 0, 0), Vec3(0, 2, 0), Vec3(0, 0, 3)}) rotated.push_back({p, Rz * p, 0});
  hyp = solve_rigid_3pt(rotated);
  REQUIRE(hyp.size() == 1);
  CHECK((hyp[0].rotation() - Rz).norm() < 1e-10);

  // Three points and their mirror image are congruent triangles, so a proper
  // rotation still fits them; only the determinant is informative here.
  std::vector<Correspondence> reflected;
  for (const Vec3& p : {Vec3(1, 0, 0), Vec3(0, 2, 0), Vec3(0, 0, 3)}) reflected.push_back({p, Vec3(p.x(), p.y(), -p.z()), 0});
  hyp = solve_rigid_3pt(reflected);
  REQUIRE(hyp.size() == 1);
  CHECK(hyp[0].rotation().determinant() == doctest::Approx(1.0));

  // Four non-coplanar points cannot be mirrored by a rotation.
  std::vector<Vec3> src{Vec3(1, 0, 0), Vec3(0, 2, 0), Vec3(0, 0, 3), Vec3(1, 1, 1)};
  std::vector<Vec3> dst;
  for (const Vec3& p : src) dst.push_back(Vec3(p.x(), p.y(), -p.z()));
  const RigidTransform fit = procrustes(src, dst);
  CHECK(fit.rotation.determinant() == doctest::Approx(1.0));
  double worst = 0.0;
  for (std::size_t i = 0; i < src.size(); ++i) worst = std::max(worst, (fit.rotation * src[i] + fit.translation - dst[i]).norm());
  CHECK(worst > 1e-3);

  Rng rng(10);
  for (int trial = 0; trial < 1000; ++trial) {
    const Mat3 R = rt::random_rotation(rng);
    const Vec3 t = Vec3::Random() * 5;
    std::vector<Correspondence> s;
    for (int i = 0; i < 3; ++i) {
      const Vec3 p = Vec3::Random();
      s.push_back({p, R * p + t, 0});
    }
    hyp = solve_rigid_3pt(s);
    REQUIRE(hyp.size() == 1);
    CHECK(max_residual(hyp[0], s) < 1e-8);
  }
}
