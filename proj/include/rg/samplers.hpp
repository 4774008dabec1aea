#pragma once

#include "rg/random.hpp"
#include "rg/types.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace rg {

enum class SamplerKind { Uniform, Prosac, PNapsac };

std::string_view to_string(SamplerKind kind);
SamplerKind sampler_from_string(std::string_view name);

struct MinimalSample {
  std::vector<std::size_t> indices;
};

/// One uniform grid over the point coordinates. Layer `level` has 2^level
/// cells per axis; the offset variant is shifted by half a cell and has one
/// more cell per axis so that every point still falls in exactly one cell.
struct GridLayer {
  int level = 1;
  bool offset = false;
  std::vector<std::uint64_t> cell_of_point;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells;

  const std::vector<std::size_t>& members_of(std::size_t point) const {
    return cells.at(cell_of_point[point]);
  }
};

/// Layers ordered finest first; each level contributes a base and an offset grid.
struct GridIndex {
  int levels = 0;
  std::vector<GridLayer> layers;
};

GridIndex pnapsac_build_grids(std::span<const Eigen::VectorXd> points, int levels);

/// Coordinates used for spatial locality: the joint (x1, y1, x2, y2) for
/// image pairs, the image point for absolute pose, the source point for rigid.
std::vector<Eigen::VectorXd> locality_coordinates(const CorrespondenceSet& set);

struct SamplerOptions {
  /// Sample budget T_N of the PROSAC growth schedule.
  double prosac_budget = 200000.0;
  int grid_levels = 4;
};

class Sampler {
 public:
  Sampler(SamplerKind kind, const CorrespondenceSet& set, std::size_t m, std::uint64_t seed,
          SamplerOptions options = {});

  MinimalSample draw();

  SamplerKind kind() const { return kind_; }
  std::size_t sample_size() const { return m_; }
  std::size_t iteration() const { return iteration_; }
  std::size_t prosac_pool_size() const { return pool_; }
  /// Correspondence indices sorted by descending quality, ties by index.
  const std::vector<std::size_t>& order() const { return order_; }
  const GridIndex& grid() const { return grid_; }
  /// True when guided sampling was requested on data without quality scores.
  bool quality_missing() const { return quality_missing_; }

 private:
  void prosac_advance();
  void draw_prosac(std::vector<std::size_t>& out);
  void draw_uniform(std::vector<std::size_t>& out, std::size_t n);
  void fill_from(std::vector<std::size_t>& out, const std::vector<std::size_t>& members,
                 std::size_t pool);

  SamplerKind kind_;
  std::size_t n_;
  std::size_t m_;
  Rng rng_;
  SamplerOptions options_;
  std::size_t iteration_ = 0;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> rank_;

  std::size_t pool_ = 0;
  double t_n_ = 0.0;
  double t_n_prime_ = 1.0;

  GridIndex grid_;
  std::vector<std::size_t> hits_;
  // Per layer and cell: members sorted by quality rank.
  std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> ranked_cells_;
  bool quality_missing_ = false;
};

/// Throws TooFewPoints when the set has fewer than m correspondences.
Sampler make_sampler(SamplerKind kind, const CorrespondenceSet& set, std::size_t m,
                     std::uint64_t seed, SamplerOptions options = {});

}  // namespace rg
