#include "rg/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rg {

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Uniform: return "uniform";
    case SamplerKind::Prosac: return "prosac";
    case SamplerKind::PNapsac: return "pnapsac";
  }
  return "unknown";
}

SamplerKind sampler_from_string(std::string_view name) {
  if (name == "uniform") return SamplerKind::Uniform;
  if (name == "prosac") return SamplerKind::Prosac;
  if (name == "pnapsac" || name == "p-napsac") return SamplerKind::PNapsac;
  throw Error(ErrorCode::InvalidConfig, "unknown sampler '" + std::string(name) + "'");
}

GridIndex pnapsac_build_grids(std::span<const Eigen::VectorXd> points, int levels) {
  GridIndex index;
  index.levels = levels;
  if (points.empty() || levels < 1) return index;
  const Eigen::Index dim = points.front().size();
  Eigen::VectorXd lo = points.front(), hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Eigen::VectorXd extent = hi - lo;
  for (Eigen::Index d = 0; d < dim; ++d) {
    if (!(extent(d) > 0.0)) extent(d) = 1.0;
  }

  for (int level = levels; level >= 1; --level) {
    const std::int64_t cells_per_axis = std::int64_t{1} << level;
    for (bool offset : {false, true}) {
      GridLayer layer;
      layer.level = level;
      layer.offset = offset;
      layer.cell_of_point.resize(points.size());
      const std::int64_t max_cell = offset ? cells_per_axis : cells_per_axis - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        std::uint64_t key = 0;
        for (Eigen::Index d = 0; d < dim; ++d) {
          const double u = (points[i](d) - lo(d)) / extent(d) * static_cast<double>(cells_per_axis);
          auto c = static_cast<std::int64_t>(std::floor(offset ? u + 0.5 : u));
          c = std::clamp<std::int64_t>(c, 0, max_cell);
          key = key * static_cast<std::uint64_t>(cells_per_axis + 1) + static_cast<std::uint64_t>(c);
        }
        layer.cell_of_point[i] = key;
        layer.cells[key].push_back(i);
      }
      index.layers.push_back(std::move(layer));
    }
  }
  return index;
}

std::vector<Eigen::VectorXd> locality_coordinates(const CorrespondenceSet& set) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(set.size());
  for (const auto& c : set.items) {
    switch (set.kind) {
      case ProblemKind::AbsolutePose:
        out.emplace_back(c.target.head<2>());
        break;
      case ProblemKind::Rigid:
        out.emplace_back(c.source);
        break;
      default: {
        Eigen::VectorXd v(4);
        v << c.source.x(), c.source.y(), c.target.x(), c.target.y();
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

Sampler::Sampler(SamplerKind kind, const CorrespondenceSet& set, std::size_t m, std::uint64_t seed,
                 SamplerOptions options)
    : kind_(kind), n_(set.size()), m_(m), rng_(seed), options_(options) {
  if (m_ == 0 || n_ < m_) throw Error(ErrorCode::TooFewPoints);

  order_.resize(n_);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (kind_ != SamplerKind::Uniform) {
    if (set.has_quality) {
      std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
        return set.items[a].quality > set.items[b].quality;
      });
    } else {
      quality_missing_ = true;
    }
  }
  rank_.resize(n_);
  for (std::size_t r = 0; r < n_; ++r) rank_[order_[r]] = r;

  if (kind_ == SamplerKind::Uniform) {
    pool_ = n_;
  } else {
    pool_ = m_;
    t_n_ = options_.prosac_budget;
    for (std::size_t i = 0; i < m_; ++i) {
      t_n_ *= static_cast<double>(m_ - i) / static_cast<double>(n_ - i);
    }
    t_n_prime_ = 1.0;
  }

  if (kind_ == SamplerKind::PNapsac) {
    const auto coords = locality_coordinates(set);
    grid_ = pnapsac_build_grids(coords, std::max(1, options_.grid_levels));
    hits_.assign(n_, 0);
    ranked_cells_.resize(grid_.layers.size());
    for (std::size_t l = 0; l < grid_.layers.size(); ++l) {
      for (const auto& [key, members] : grid_.layers[l].cells) {
        auto ranked = members;
        std::sort(ranked.begin(), ranked.end(),
                  [&](std::size_t a, std::size_t b) { return rank_[a] < rank_[b]; });
        ranked_cells_[l].emplace(key, std::move(ranked));
      }
    }
  }
}

void Sampler::prosac_advance() {
  const double t = static_cast<double>(iteration_);
  while (t > t_n_prime_ && pool_ < n_) {
    const double next = t_n_ * static_cast<double>(pool_ + 1) / static_cast<double>(pool_ + 1 - m_);
    t_n_prime_ += std::ceil(next - t_n_);
    t_n_ = next;
    ++pool_;
  }
}

void Sampler::draw_uniform(std::vector<std::size_t>& out, std::size_t n) {
  // m is tiny, so rejection of repeats beats a shuffle.
  while (out.size() < m_) {
    const std::size_t r = uniform_index(rng_, n);
    const std::size_t idx = order_[r];
    if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  }
}

void Sampler::draw_prosac(std::vector<std::size_t>& out) {
  prosac_advance();
  if (t_n_prime_ < static_cast<double>(iteration_)) {
    draw_uniform(out, pool_);
  } else {
    out.push_back(order_[pool_ - 1]);
    // The newest point joins m-1 points drawn from the previous pool.
    while (out.size() < m_) {
      const std::size_t idx = order_[uniform_index(rng_, pool_ - 1)];
      if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
    }
    std::rotate(out.begin(), out.begin() + 1, out.end());
  }
}

void Sampler::fill_from(std::vector<std::size_t>& out, const std::vector<std::size_t>& members,
                        std::size_t pool) {
  while (out.size() < m_) {
    const std::size_t idx = members[uniform_index(rng_, pool)];
    if (std::find(out.begin(), out.end(), idx) == out.end()) out.push_back(idx);
  }
}

MinimalSample Sampler::draw() {
  ++iteration_;
  MinimalSample sample;
  sample.indices.reserve(m_);
  switch (kind_) {
    case SamplerKind::Uniform:
      draw_uniform(sample.indices, n_);
      break;
    case SamplerKind::Prosac:
      draw_prosac(sample.indices);
      break;
    case SamplerKind::PNapsac: {
      prosac_advance();
      const std::size_t first = t_n_prime_ < static_cast<double>(iteration_)
                                    ? order_[uniform_index(rng_, pool_)]
                                    : order_[pool_ - 1];
      sample.indices.push_back(first);
      // Each time a point seeds a sample its neighbourhood grows by one,
      // walking finest to coarsest layer and finally to the whole set.
      std::size_t h = hits_[first]++;
      bool done = false;
      for (std::size_t l = 0; l < grid_.layers.size() && !done; ++l) {
        const auto& members = ranked_cells_[l].at(grid_.layers[l].cell_of_point[first]);
        if (members.size() < m_) continue;
        const std::size_t capacity = members.size() - m_ + 1;
        if (h < capacity) {
          fill_from(sample.indices, members, m_ + h);
          done = true;
        } else {
          h -= capacity;
        }
      }
      if (!done) draw_uniform(sample.indices, n_);
      break;
    }
  }
  return sample;
}

Sampler make_sampler(SamplerKind kind, const CorrespondenceSet& set, std::size_t m,
                     std::uint64_t seed, SamplerOptions options) {
  return Sampler(kind, set, m, seed, options);
}

}  // namespace rg
