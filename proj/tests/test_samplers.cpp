#include <doctest.h>

#include "rg/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace rg;

namespace {

CorrespondenceSet random_pairs(std::size_t n, std::uint64_t seed, bool with_quality) {
  Rng rng(seed);
  CorrespondenceSet set;
  set.kind = ProblemKind::Homography;
  set.has_quality = with_quality;
  for (std::size_t i = 0; i < n; ++i) {
    set.items.push_back(Correspondence::image_pair(
        {uniform_real(rng, 0, 640), uniform_real(rng, 0, 480)},
        {uniform_real(rng, 0, 640), uniform_real(rng, 0, 480)}, with_quality ? uniform_real(rng) : 0.0));
  }
  return set;
}

bool distinct(const MinimalSample& s) {
  std::set<std::size_t> u(s.indices.begin(), s.indices.end());
  return u.size() == s.indices.size();
}

}  // namespace

TEST_CASE("uniform sampler draws distinct in-range indices") {
  const auto set = random_pairs(10, 1, false);
  auto sampler = make_sampler(SamplerKind::Uniform, set, 4, 42);
  const auto s = sampler.draw();
  REQUIRE(s.indices.size() == 4);
  CHECK(distinct(s));
  for (auto i : s.indices) CHECK(i < 10);
}

TEST_CASE("samplers are deterministic per seed") {
  const auto set = random_pairs(200, 2, true);
  for (auto kind : {SamplerKind::Uniform, SamplerKind::Prosac, SamplerKind::PNapsac}) {
    auto a = make_sampler(kind, set, 4, 9);
    auto b = make_sampler(kind, set, 4, 9);
    for (int i = 0; i < 500; ++i) CHECK(a.draw().indices == b.draw().indices);
  }
}

TEST_CASE("make_sampler rejects too few points") {
  const auto set = random_pairs(3, 3, true);
  try {
    make_sampler(SamplerKind::Prosac, set, 4, 1);
    FAIL("expected TooFewPoints");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewPoints);
  }
}

TEST_CASE("PROSAC ordering") {
  CorrespondenceSet set;
  set.has_quality = true;
  for (int i = 0; i < 10; ++i) set.items.push_back(Correspondence::image_pair({i, 0}, {0, i}, 0.9 - 0.05 * i));
  auto sorted = make_sampler(SamplerKind::Prosac, set, 4, 0);
  for (std::size_t i = 0; i < 10; ++i) CHECK(sorted.order()[i] == i);

  for (auto& c : set.items) c.quality = 0.5;
  auto ties = make_sampler(SamplerKind::Prosac, set, 4, 0);
  for (std::size_t i = 0; i < 10; ++i) CHECK(ties.order()[i] == i);

  set.items[7].quality = 0.7;
  set.items[3].quality = 0.6;
  auto mixed = make_sampler(SamplerKind::Prosac, set, 4, 0);
  CHECK(mixed.order()[0] == 7);
  CHECK(mixed.order()[1] == 3);
  CHECK(mixed.order()[2] == 0);

  set.has_quality = false;
  auto missing = make_sampler(SamplerKind::Prosac, set, 4, 0);
  CHECK(missing.quality_missing());
  CHECK(missing.order()[0] == 0);
}

TEST_CASE("PROSAC first sample is the top-m set") {
  const auto set = random_pairs(100, 4, true);
  auto sampler = make_sampler(SamplerKind::Prosac, set, 4, 5);
  auto s = sampler.draw();
  std::sort(s.indices.begin(), s.indices.end());
  std::vector<std::size_t> top(sampler.order().begin(), sampler.order().begin() + 4);
  std::sort(top.begin(), top.end());
  CHECK(s.indices == top);
}

TEST_CASE("every drawn sample is distinct and the PROSAC pool grows monotonically") {
  const auto set = random_pairs(60, 6, true);
  for (auto kind : {SamplerKind::Uniform, SamplerKind::Prosac, SamplerKind::PNapsac}) {
    for (std::size_t m : {3u, 4u, 5u, 7u}) {
      auto sampler = make_sampler(kind, set, m, 77, {.prosac_budget = 5000.0});
      std::size_t pool = sampler.prosac_pool_size();
      for (int i = 0; i < 10000; ++i) {
        const auto s = sampler.draw();
        REQUIRE(s.indices.size() == m);
        REQUIRE(distinct(s));
        for (auto idx : s.indices) REQUIRE(idx < set.size());
        REQUIRE(sampler.prosac_pool_size() >= pool);
        REQUIRE(sampler.prosac_pool_size() <= set.size());
        pool = sampler.prosac_pool_size();
      }
    }
  }
}

TEST_CASE("PROSAC sampling becomes uniform once the pool is exhausted") {
  const std::size_t n = 20, m = 4;
  const auto set = random_pairs(n, 8, true);
  auto sampler = make_sampler(SamplerKind::Prosac, set, m, 99, {.prosac_budget = 2000.0});
  while (sampler.prosac_pool_size() < n) sampler.draw();
  const int draws = 100000;
  std::vector<int> counts(n, 0);
  for (int i = 0; i < draws; ++i) {
    for (auto idx : sampler.draw().indices) ++counts[idx];
  }
  const double p = static_cast<double>(m) / n;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (auto c : counts) CHECK(std::abs(c - mean) <= 3.0 * sigma);
}

TEST_CASE("PROSAC early draws favour high-quality points") {
  CorrespondenceSet set;
  set.has_quality = true;
  const std::size_t n = 500;
  for (std::size_t i = 0; i < n; ++i) {
    set.items.push_back(Correspondence::image_pair({double(i), 0}, {0, double(i)}, 1.0 - double(i) / n));
  }
  double dataset_mean = 0.0;
  for (const auto& c : set.items) dataset_mean += c.quality / n;
  auto sampler = make_sampler(SamplerKind::Prosac, set, 4, 1);
  double sampled = 0.0;
  for (int i = 0; i < 100; ++i) {
    for (auto idx : sampler.draw().indices) sampled += set[idx].quality / 400.0;
  }
  CHECK(sampled > dataset_mean);
}

TEST_CASE("grid layers partition the points") {
  Rng rng(10);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 300; ++i) pts.push_back(Eigen::Vector4d::Random());
  const auto grid = pnapsac_build_grids(pts, 4);
  REQUIRE(grid.layers.size() == 8);
  for (const auto& layer : grid.layers) {
    std::size_t total = 0;
    for (const auto& [key, members] : layer.cells) {
      total += members.size();
      for (auto i : members) {
        CHECK(i < pts.size());
        CHECK(layer.cell_of_point[i] == key);
      }
    }
    CHECK(total == pts.size());
  }
  CHECK(grid.layers.front().level == 4);
  CHECK(grid.layers.back().level == 1);
}

TEST_CASE("grid with a single point") {
  std::vector<Eigen::VectorXd> pts{Eigen::Vector2d(3, 4)};
  const auto grid = pnapsac_build_grids(pts, 3);
  for (const auto& layer : grid.layers) CHECK(layer.cells.size() == 1);
}

TEST_CASE("corner points occupy distinct cells of the finest grid") {
  std::vector<Eigen::VectorXd> pts{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1),
                                   Eigen::Vector2d(1, 1)};
  const auto grid = pnapsac_build_grids(pts, 2);
  const auto& finest = grid.layers.front();
  CHECK(finest.level == 2);
  CHECK_FALSE(finest.offset);
  CHECK(finest.cells.size() == 4);
}

TEST_CASE("P-NAPSAC falls back to the global pool for sparse cells") {
  CorrespondenceSet set;
  set.kind = ProblemKind::Rigid;
  set.has_quality = true;
  // Two points near the origin, the rest in a far cluster.
  set.items.push_back(Correspondence::cloud_pair({0, 0, 0}, {0, 0, 0}, 1.0));
  set.items.push_back(Correspondence::cloud_pair({0.01, 0, 0}, {0, 0, 0}, 0.99));
  Rng rng(12);
  for (int i = 0; i < 40; ++i) {
    set.items.push_back(Correspondence::cloud_pair(
        {10 + uniform_real(rng), 10 + uniform_real(rng), 10 + uniform_real(rng)}, {0, 0, 0}, 0.5 * uniform_real(rng)));
  }
  auto sampler = make_sampler(SamplerKind::PNapsac, set, 4, 3, {.prosac_budget = 100.0, .grid_levels = 1});
  const auto& layer = sampler.grid().layers.front();
  CHECK(layer.members_of(0).size() == 2);
  int seen = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto s = sampler.draw();
    REQUIRE(distinct(s));
    if (s.indices.front() == 0 || s.indices.front() == 1) {
      ++seen;
      const auto outside = std::count_if(s.indices.begin(), s.indices.end(), [](auto k) { return k >= 2; });
      CHECK(outside >= 2);
    }
  }
  CHECK(seen > 0);
}

TEST_CASE("P-NAPSAC keeps later points near the first") {
  CorrespondenceSet set;
  set.kind = ProblemKind::Rigid;
  set.has_quality = true;
  Rng rng(14);
  // Four tight, well separated clusters of 25 points.
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < 25; ++i) {
      const Vec3 p(10.0 * (c & 1) + 0.5 * uniform_real(rng), 10.0 * (c >> 1) + 0.5 * uniform_real(rng),
                   0.5 * uniform_real(rng));
      set.items.push_back(Correspondence::cloud_pair(p, p, uniform_real(rng)));
    }
  }
  auto sampler = make_sampler(SamplerKind::PNapsac, set, 3, 4);
  int local = 0;
  const int draws = 200;
  for (int i = 0; i < draws; ++i) {
    const auto s = sampler.draw();
    const auto cluster = s.indices[0] / 25;
    local += std::all_of(s.indices.begin(), s.indices.end(), [&](auto k) { return k / 25 == cluster; });
  }
  CHECK(local > draws / 2);
}
