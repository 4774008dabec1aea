#include "rg/bench/scene.hpp"

#include "rg/geom.hpp"
#include "rg/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rg::bench {

namespace {

// Rejection-sampling budget per requested inlier.
constexpr std::size_t kTriesPerPoint = 1000;

Vec3 random_unit(Rng& rng) {
  Vec3 v(standard_normal(rng), standard_normal(rng), standard_normal(rng));
  while (v.norm() < 1e-9) v = Vec3(standard_normal(rng), standard_normal(rng), standard_normal(rng));
  return v.normalized();
}

Mat3 random_rotation(Rng& rng, double max_angle_deg) {
  return rotation_from_axis_angle(random_unit(rng) * uniform_real(rng, 0.0, max_angle_deg) * std::numbers::pi / 180.0);
}

Vec2 random_pixel(Rng& rng) { return {uniform_real(rng, 0, kImageWidth), uniform_real(rng, 0, kImageHeight)}; }

bool in_image(const Vec2& p) { return p.x() >= 0 && p.x() <= kImageWidth && p.y() >= 0 && p.y() <= kImageHeight; }

Vec2 noise2(Rng& rng, double sigma) { return sigma * Vec2(standard_normal(rng), standard_normal(rng)); }
Vec3 noise3(Rng& rng, double sigma) { return sigma * Vec3(standard_normal(rng), standard_normal(rng), standard_normal(rng)); }

// Second camera of a two-view rig: moderate rotation, baseline 1 to 2 for
// scene depths of 4 to 10.
void random_motion(Rng& rng, Mat3& R, Vec3& t) {
  R = random_rotation(rng, 15.0);
  t = random_unit(rng) * uniform_real(rng, 1.0, 2.0);
}

Vec2 project(const Mat3& K, const Vec3& X) { return (K * X).hnormalized(); }

// Correspondences of one kind, inliers first, with proxy residuals for the quality score.
struct Draft {
  std::vector<Correspondence> items;
  std::vector<double> proxy;
};

void two_view(Rng& rng, ProblemKind kind, std::size_t inliers, std::size_t n, double sigma, ScenePair& s, Draft& d) {
  const Mat3 K = synthetic_camera().matrix();
  const Mat3 Kinv = K.inverse();
  Mat3 R;
  Vec3 t;
  random_motion(rng, R, t);
  // Homographies come from a plane n^T X = depth in the first camera frame.
  const Vec3 normal = (Vec3(0, 0, 1) + 0.4 * Vec3(standard_normal(rng), standard_normal(rng), 0)).normalized();
  const double depth = uniform_real(rng, 4.0, 8.0);
  const Mat3 H = K * (R + t * normal.transpose() / depth) * Kinv;
  const Mat3 E = skew(t) * R;
  const Mat3 F = Kinv.transpose() * E * Kinv;
  s.truth.rotation = R;
  s.truth.translation = t;
  s.truth.model = kind == ProblemKind::Homography    ? Model::homography(H)
                  : kind == ProblemKind::Fundamental ? Model::fundamental(F)
                                                     : Model::essential(E);
  s.intrinsics = ViewIntrinsics{synthetic_camera(), synthetic_camera()};

  std::size_t tries = 0;
  while (d.items.size() < inliers && ++tries < kTriesPerPoint * (inliers + 1)) {
    const Vec2 p1 = random_pixel(rng);
    const Vec3 ray = Kinv * p1.homogeneous();
    const double z = kind == ProblemKind::Homography ? depth / normal.dot(ray) : uniform_real(rng, 4.0, 10.0);
    if (!(z > 0.5)) continue;
    const Vec3 X2 = R * (z * ray) + t;
    if (X2.z() < 0.5) continue;
    const Vec2 exact = project(K, X2);
    if (!in_image(exact)) continue;
    const Vec2 e = noise2(rng, sigma);
    d.items.push_back(Correspondence::image_pair(p1, exact + e));
    d.proxy.push_back(e.norm());
  }
  if (d.items.size() < inliers) throw Error(ErrorCode::DegenerateConfiguration, "scene generation failed");
  const ModelEvaluator gt(kind == ProblemKind::Homography ? Model::homography(H) : Model::fundamental(F));
  while (d.items.size() < n) {
    const auto c = Correspondence::image_pair(random_pixel(rng), random_pixel(rng));
    d.items.push_back(c);
    d.proxy.push_back(gt(c));
  }
}

void absolute_pose(Rng& rng, std::size_t inliers, std::size_t n, double sigma, ScenePair& s, Draft& d) {
  const Mat3 K = synthetic_camera().matrix();
  const Mat3 Kinv = K.inverse();
  const Mat3 R = random_rotation(rng, 180.0);
  const Vec3 t = random_unit(rng) * uniform_real(rng, 1.0, 5.0);
  s.truth = {Model::absolute_pose(R, t), R, t};
  s.intrinsics = ViewIntrinsics{synthetic_camera(), synthetic_camera()};
  auto world_point = [&] {
    const Vec3 C = uniform_real(rng, 4.0, 10.0) * (Kinv * random_pixel(rng).homogeneous());
    return Vec3(R.transpose() * (C - t));
  };
  while (d.items.size() < inliers) {
    const Vec3 X = world_point();
    const Vec2 e = noise2(rng, sigma);
    d.items.push_back(Correspondence::world_to_image(X, project(K, R * X + t) + e));
    d.proxy.push_back(e.norm());
  }
  while (d.items.size() < n) {
    const Vec3 X = world_point();
    const Vec2 u = random_pixel(rng);
    d.items.push_back(Correspondence::world_to_image(X, u));
    d.proxy.push_back((project(K, R * X + t) - u).norm());
  }
}

void rigid(Rng& rng, std::size_t inliers, std::size_t n, double sigma, ScenePair& s, Draft& d) {
  const Mat3 R = random_rotation(rng, 180.0);
  const Vec3 t = random_unit(rng) * uniform_real(rng, 0.0, 2.0);
  s.truth = {Model::rigid(R, t), R, t};
  auto cloud_point = [&] { return Vec3(uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), uniform_real(rng, -1, 1)); };
  while (d.items.size() < inliers) {
    const Vec3 X = cloud_point();
    const Vec3 e = noise3(rng, sigma);
    d.items.push_back(Correspondence::cloud_pair(X, R * X + t + e));
    d.proxy.push_back(e.norm());
  }
  while (d.items.size() < n) {
    const Vec3 X = cloud_point();
    const Vec3 Y = R * cloud_point() + t;
    d.items.push_back(Correspondence::cloud_pair(X, Y));
    d.proxy.push_back((R * X + t - Y).norm());
  }
}

}  // namespace

CameraIntrinsics synthetic_camera() { return {800.0, 800.0, 320.0, 240.0}; }

double default_threshold(ProblemKind kind, double noise_sigma) {
  switch (kind) {
    case ProblemKind::Homography: return std::max(6.0 * noise_sigma, 2.0);
    case ProblemKind::Rigid: return std::max(3.0 * noise_sigma, 0.01);
    default: return std::max(3.0 * noise_sigma, 1.0);
  }
}

ScenePair generate_scene(ProblemKind problem, std::size_t n, double inlier_ratio, double noise_sigma,
                         std::uint64_t seed) {
  if (n < minimal_sample_size(problem)) throw Error(ErrorCode::InvalidConfig, "n is below the minimal sample size");
  if (!(inlier_ratio > 0.0 && inlier_ratio <= 1.0)) throw Error(ErrorCode::InvalidConfig, "inlier ratio must lie in (0, 1]");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidConfig, "noise must be nonnegative");

  Rng rng(seed);
  ScenePair s;
  s.set.kind = problem;
  s.set.has_quality = true;
  s.noise_sigma = noise_sigma;
  s.inlier_ratio = inlier_ratio;
  s.seed = seed;
  const auto inliers = static_cast<std::size_t>(std::lround(static_cast<double>(n) * inlier_ratio));

  Draft d;
  switch (problem) {
    case ProblemKind::Homography:
    case ProblemKind::Fundamental:
    case ProblemKind::Essential: two_view(rng, problem, inliers, n, noise_sigma, s, d); break;
    case ProblemKind::AbsolutePose: absolute_pose(rng, inliers, n, noise_sigma, s, d); break;
    case ProblemKind::Rigid: rigid(rng, inliers, n, noise_sigma, s, d); break;
  }

  // Quality falls with the true residual; the log-normal factor makes the ordering imperfect.
  const double unit = problem == ProblemKind::Rigid ? 0.01 : 1.0;
  const double scale = std::max(noise_sigma, unit);
  for (std::size_t i = 0; i < n; ++i) d.items[i].quality = std::exp(0.5 * standard_normal(rng)) / (1.0 + d.proxy[i] / scale);

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  s.set.items.reserve(n);
  s.planted.reserve(n);
  for (std::size_t i : order) {
    s.set.items.push_back(d.items[i]);
    s.planted.push_back(i < inliers);
  }
  return s;
}

}  // namespace rg::bench
