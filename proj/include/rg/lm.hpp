#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace rg {

struct LMSettings {
  int max_iterations = 25;
  double initial_damping = 1e-3;
  double damping_up = 10.0;
  double damping_down = 1.0 / 3.0;
  /// Relative to the current cost, so that scaling all weights is harmless.
  double gradient_tol = 1e-14;
  double step_tol = 1e-14;
  /// Relative cost decrease below which an accepted step ends the run.
  double cost_tol = 1e-10;
  /// Central-difference step, multiplied by max(1, coordinate scale).
  double fd_step = 1e-6;
};

/// A least-squares problem over a manifold-valued state. `residuals` returns
/// unweighted residuals; `retract` applies a local update of size `dof`;
/// `scales` (optional) gives the magnitude of each local coordinate for the
/// finite-difference step.
template <class State>
struct LMProblem {
  int dof = 0;
  std::function<Eigen::VectorXd(const State&)> residuals;
  std::function<State(const State&, const Eigen::VectorXd&)> retract;
  std::function<Eigen::VectorXd(const State&)> scales;
};

template <class State>
struct LMResult {
  State state;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  int iterations = 0;
  /// Cost after each accepted step, starting with the initial cost.
  std::vector<double> accepted_costs;
};

inline double weighted_cost(const Eigen::VectorXd& r, std::span<const double> weights) {
  if (weights.empty()) return r.squaredNorm();
  double c = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) c += weights[static_cast<std::size_t>(i)] * r(i) * r(i);
  return c;
}

/// Central-difference Jacobian of the residuals with respect to the local coordinates.
template <class State>
Eigen::MatrixXd numeric_jacobian(const LMProblem<State>& problem, const State& x, Eigen::Index rows,
                                 double fd_step) {
  Eigen::MatrixXd J(rows, problem.dof);
  const Eigen::VectorXd scale =
      problem.scales ? problem.scales(x) : Eigen::VectorXd::Ones(problem.dof).eval();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(problem.dof);
  for (int k = 0; k < problem.dof; ++k) {
    const double h = fd_step * std::max(1.0, std::abs(scale(k)));
    d(k) = h;
    const Eigen::VectorXd rp = problem.residuals(problem.retract(x, d));
    d(k) = -h;
    const Eigen::VectorXd rm = problem.residuals(problem.retract(x, d));
    d(k) = 0.0;
    J.col(k) = (rp - rm) / (2.0 * h);
  }
  return J;
}

/// Levenberg-Marquardt with multiplicative (Marquardt) damping. Only steps
/// that lower the weighted cost are accepted, so the returned cost never
/// exceeds the initial one. `weights` is empty or one weight per residual.
template <class State>
LMResult<State> lm_minimize(const State& x0, const LMProblem<State>& problem,
                            std::span<const double> weights, const LMSettings& settings) {
  LMResult<State> out;
  out.state = x0;
  Eigen::VectorXd r = problem.residuals(x0);
  double cost = weighted_cost(r, weights);
  out.initial_cost = out.final_cost = cost;
  out.accepted_costs.push_back(cost);
  if (!std::isfinite(cost) || cost == 0.0) return out;

  Eigen::VectorXd w = Eigen::VectorXd::Ones(r.size());
  if (!weights.empty()) {
    for (Eigen::Index i = 0; i < r.size(); ++i) w(i) = weights[static_cast<std::size_t>(i)];
  }
  double lambda = settings.initial_damping;
  State x = x0;
  for (int it = 0; it < settings.max_iterations; ++it) {
    out.iterations = it + 1;
    const Eigen::MatrixXd J = numeric_jacobian(problem, x, r.size(), settings.fd_step);
    const Eigen::MatrixXd JtW = J.transpose() * w.asDiagonal();
    const Eigen::MatrixXd H = JtW * J;
    const Eigen::VectorXd g = JtW * r;
    if (g.lpNorm<Eigen::Infinity>() <= settings.gradient_tol * cost) break;

    bool accepted = false;
    bool converged = false;
    while (!accepted) {
      Eigen::MatrixXd A = H;
      for (int k = 0; k < problem.dof; ++k) A(k, k) += lambda * std::max(H(k, k), 1e-12 * H.diagonal().maxCoeff());
      const Eigen::VectorXd delta = -A.ldlt().solve(g);
      if (!delta.allFinite() || delta.norm() <= settings.step_tol) {
        converged = true;
        break;
      }
      const State candidate = problem.retract(x, delta);
      const Eigen::VectorXd rc = problem.residuals(candidate);
      const double c = weighted_cost(rc, weights);
      if (std::isfinite(c) && c < cost) {
        const double decrease = (cost - c) / cost;
        x = candidate;
        r = rc;
        cost = c;
        out.accepted_costs.push_back(cost);
        lambda *= settings.damping_down;
        accepted = true;
        converged = decrease < settings.cost_tol || cost == 0.0;
      } else {
        lambda *= settings.damping_up;
        if (lambda > 1e16) {
          converged = true;
          break;
        }
      }
    }
    if (converged) break;
  }
  out.state = x;
  out.final_cost = cost;
  return out;
}

}  // namespace rg
