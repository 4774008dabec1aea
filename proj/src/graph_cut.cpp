#include "rg/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

namespace rg {

std::vector<Eigen::VectorXd> joint_coordinates(ProblemKind kind, std::span<const Correspondence> points) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(points.size());
  for (const auto& c : points) {
    Eigen::VectorXd v;
    switch (kind) {
      case ProblemKind::Homography:
      case ProblemKind::Fundamental:
      case ProblemKind::Essential:
        v.resize(4);
        v << c.source.x() / c.source.z(), c.source.y() / c.source.z(), c.target.x() / c.target.z(),
            c.target.y() / c.target.z();
        break;
      case ProblemKind::AbsolutePose:
        v.resize(5);
        v << c.source, c.target.x() / c.target.z(), c.target.y() / c.target.z();
        break;
      case ProblemKind::Rigid:
        v.resize(6);
        v << c.source, c.target;
        break;
    }
    out.push_back(std::move(v));
  }
  return out;
}

NeighborGraph build_neighbor_graph(std::span<const Eigen::VectorXd> coords, double cell_size) {
  NeighborGraph g;
  g.adjacency.resize(coords.size());
  if (!(cell_size > 0.0)) return g;
  std::map<std::vector<std::int64_t>, std::vector<std::uint32_t>> cells;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    std::vector<std::int64_t> key(static_cast<std::size_t>(coords[i].size()));
    for (Eigen::Index d = 0; d < coords[i].size(); ++d) {
      key[static_cast<std::size_t>(d)] = static_cast<std::int64_t>(std::floor(coords[i](d) / cell_size));
    }
    cells[key].push_back(static_cast<std::uint32_t>(i));
  }
  for (const auto& [key, members] : cells) {
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        g.adjacency[members[a]].push_back(members[b]);
        g.adjacency[members[b]].push_back(members[a]);
        ++g.edge_count;
      }
    }
  }
  for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
  return g;
}

NeighborGraph build_neighbor_graph(ProblemKind kind, std::span<const Correspondence> points, double cell_size) {
  const auto coords = joint_coordinates(kind, points);
  return build_neighbor_graph(coords, cell_size);
}

double labeling_energy(std::span<const double> quality, const NeighborGraph& graph, double lambda,
                       std::span<const bool> inlier) {
  double e = 0.0;
  for (std::size_t i = 0; i < quality.size(); ++i) e += inlier[i] ? 1.0 - quality[i] : quality[i];
  std::size_t cut = 0;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    for (std::uint32_t j : graph.adjacency[i]) cut += j > i && inlier[i] != inlier[j];
  }
  return e + lambda * static_cast<double>(cut);
}

namespace {

// Dinic's max flow on real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : head_(nodes, -1), level_(nodes), next_(nodes) {}

  // Arc u -> v with capacity c and its reverse with capacity c_rev.
  void add(std::size_t u, std::size_t v, double c, double c_rev) {
    arcs_.push_back({v, c, head_[u]});
    head_[u] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({u, c_rev, head_[v]});
    head_[v] = static_cast<int>(arcs_.size()) - 1;
  }

  void run(std::size_t s, std::size_t t) {
    while (bfs(s, t)) {
      next_ = head_;
      while (dfs(s, t, std::numeric_limits<double>::infinity()) > kEps) {
      }
    }
  }

  // Nodes reachable from s in the residual graph after run().
  std::vector<bool> source_side(std::size_t s) const {
    std::vector<bool> seen(head_.size(), false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (int a = head_[u]; a >= 0; a = arcs_[static_cast<std::size_t>(a)].next) {
        const Arc& arc = arcs_[static_cast<std::size_t>(a)];
        if (arc.cap > kEps && !seen[arc.to]) {
          seen[arc.to] = true;
          stack.push_back(arc.to);
        }
      }
    }
    return seen;
  }

 private:
  static constexpr double kEps = 1e-12;

  struct Arc {
    std::size_t to;
    double cap;
    int next;
  };

  bool bfs(std::size_t s, std::size_t t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<std::size_t> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const std::size_t u = q.front();
      q.pop();
      for (int a = head_[u]; a >= 0; a = arcs_[static_cast<std::size_t>(a)].next) {
        const Arc& arc = arcs_[static_cast<std::size_t>(a)];
        if (arc.cap > kEps && level_[arc.to] < 0) {
          level_[arc.to] = level_[u] + 1;
          q.push(arc.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(std::size_t u, std::size_t t, double pushed) {
    if (u == t) return pushed;
    for (int& a = next_[u]; a >= 0; a = arcs_[static_cast<std::size_t>(a)].next) {
      Arc& arc = arcs_[static_cast<std::size_t>(a)];
      if (arc.cap <= kEps || level_[arc.to] != level_[u] + 1) continue;
      const double f = dfs(arc.to, t, std::min(pushed, arc.cap));
      if (f > kEps) {
        arc.cap -= f;
        arcs_[static_cast<std::size_t>(a ^ 1)].cap += f;
        return f;
      }
    }
    return 0.0;
  }

  std::vector<Arc> arcs_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> next_;
};

}  // namespace

std::vector<std::size_t> graph_cut_labeling(std::span<const double> quality, const NeighborGraph& graph,
                                            double lambda) {
  const std::size_t n = quality.size();
  const std::size_t s = n, t = n + 1;
  MaxFlow flow(n + 2);
  // Source side = inlier. Cutting s->i labels i an outlier (cost q), cutting
  // i->t labels it an inlier (cost 1 - q); the common part is a constant.
  for (std::size_t i = 0; i < n; ++i) {
    const double out_cost = quality[i];
    const double in_cost = 1.0 - quality[i];
    const double common = std::min(out_cost, in_cost);
    if (out_cost > common) flow.add(s, i, out_cost - common, 0.0);
    if (in_cost > common) flow.add(i, t, in_cost - common, 0.0);
  }
  if (lambda > 0.0) {
    for (std::size_t i = 0; i < graph.size(); ++i) {
      for (std::uint32_t j : graph.adjacency[i]) {
        if (j > i) flow.add(i, j, lambda, lambda);
      }
    }
  }
  flow.run(s, t);
  const auto side = flow.source_side(s);
  std::vector<std::size_t> inliers;
  for (std::size_t i = 0; i < n; ++i) {
    if (side[i]) inliers.push_back(i);
  }
  return inliers;
}

}  // namespace rg
