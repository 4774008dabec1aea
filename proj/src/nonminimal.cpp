#include "rg/nonminimal.hpp"

#include "rg/geom.hpp"
#include "rg/minimal.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

namespace rg {

namespace {

using Vec9 = Eigen::Matrix<double, 9, 1>;
using RowMat3 = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;

// Residual for a point behind the camera or a degenerate Sampson gradient.
constexpr double kFar = 1e6;

struct Subset {
  std::vector<Correspondence> points;
  std::vector<double> weights;
};

// Positively weighted points, in input order.
Subset positive(std::span<const Correspondence> points, std::span<const double> weights) {
  Subset s;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w > 0.0) {
      s.points.push_back(points[i]);
      s.weights.push_back(w);
    }
  }
  return s;
}

Mat3 rotation_update(const Mat3& R, const Vec3& delta) {
  return rotation_from_axis_angle(delta) * R;
}

Eigen::Quaterniond quaternion_update(const Eigen::Quaterniond& q, const Vec3& delta) {
  const double angle = delta.norm();
  const Eigen::Quaterniond dq =
      angle > 0.0 ? Eigen::Quaterniond(Eigen::AngleAxisd(angle, delta / angle)) : Eigen::Quaterniond::Identity();
  return (dq * q).normalized();
}

// Orthonormal basis of the plane orthogonal to the unit vector t.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& t) {
  Vec3 a = Vec3::UnitX();
  if (std::abs(t.y()) < std::abs(t(0)) && std::abs(t.y()) <= std::abs(t.z())) a = Vec3::UnitY();
  else if (std::abs(t.z()) < std::abs(t(0))) a = Vec3::UnitZ();
  const Vec3 b1 = t.cross(a).normalized();
  return {b1, t.cross(b1)};
}

Mat3 from_row_major(const Vec9& v) { return Eigen::Map<const RowMat3>(v.data()); }

Eigen::Matrix<double, 1, 9> epipolar_row(const Vec3& x1, const Vec3& x2) {
  Eigen::Matrix<double, 1, 9> r;
  r << x2(0) * x1(0), x2(0) * x1(1), x2(0), x2(1) * x1(0), x2(1) * x1(1), x2(1), x1(0), x1(1), 1.0;
  return r;
}

// Smallest right singular vector with the two smallest singular values.
struct NullVector {
  Vec9 v;
  double smallest;
  double second;
  double largest;
};

NullVector smallest_singular(const Eigen::MatrixXd& A) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  NullVector out;
  out.v = svd.matrixV().col(8);
  out.largest = s(0);
  out.smallest = s.size() >= 9 ? s(8) : 0.0;
  out.second = s.size() >= 8 ? s(7) : 0.0;
  return out;
}

std::pair<NormalizationTransform, NormalizationTransform> normalize_pair(std::span<const Correspondence> pts) {
  std::vector<Vec2> a, b;
  for (const auto& c : pts) {
    a.push_back(c.source.head<2>() / c.source.z());
    b.push_back(c.target.head<2>() / c.target.z());
  }
  return hartley_normalize_pair(a, b);
}

Vec3 apply_h(const NormalizationTransform& T, const Vec3& x) {
  return T.apply(Vec2(x.head<2>() / x.z())).homogeneous();
}

Mat3 rank2(const Mat3& F) {
  const Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vec3 s = svd.singularValues();
  s(2) = 0.0;
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

Model fit_f_linear(const Subset& s) {
  const auto [T1, T2] = normalize_pair(s.points);
  Eigen::MatrixXd A(s.points.size(), 9);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    A.row(static_cast<Eigen::Index>(i)) =
        std::sqrt(s.weights[i]) * epipolar_row(apply_h(T1, s.points[i].source), apply_h(T2, s.points[i].target));
  }
  const NullVector nv = smallest_singular(A);
  if (!(nv.second > 1e-10 * nv.largest)) throw Error(ErrorCode::RankDeficient, "fit_f_nonminimal: rank < 8");
  const Mat3 Fn = rank2(from_row_major(nv.v));
  return Model::fundamental(canonical_sign(T2.matrix().transpose() * Fn * T1.matrix()));
}

// The minimal solution with the lowest weighted cost over all points.
Model best_minimal(ProblemKind kind, const Subset& s) {
  std::vector<std::size_t> order(s.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return s.weights[a] > s.weights[b]; });
  std::vector<Correspondence> sample;
  for (std::size_t i = 0; i < minimal_sample_size(kind); ++i) sample.push_back(s.points[order[i]]);
  double best = std::numeric_limits<double>::infinity();
  std::optional<Model> out;
  for (const Model& m : solve_minimal(kind, sample)) {
    const double c = weighted_model_cost(m, s.points, s.weights);
    if (c < best) {
      best = c;
      out = m;
    }
  }
  if (!out) throw Error(ErrorCode::RankDeficient, "minimal solver returned no model");
  return *out;
}

std::vector<double> per_residual(std::span<const double> weights, int block) {
  std::vector<double> w;
  w.reserve(weights.size() * static_cast<std::size_t>(block));
  for (double v : weights) {
    for (int k = 0; k < block; ++k) w.push_back(v);
  }
  return w;
}

}  // namespace

std::vector<Correspondence> gather(const CorrespondenceSet& set, std::span<const std::size_t> indices) {
  std::vector<Correspondence> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(set.items.at(i));
  return out;
}

Mat3 FParams::matrix() const {
  return qu.toRotationMatrix() * Vec3(1.0, sigma, 0.0).asDiagonal() * qv.toRotationMatrix().transpose();
}

FParams FParams::from_matrix(const Mat3& F) {
  const Eigen::JacobiSVD<Mat3> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 U = svd.matrixU();
  Mat3 V = svd.matrixV();
  // The third singular vectors only meet the zero singular value, so their signs are free.
  if (U.determinant() < 0.0) U.col(2) *= -1.0;
  if (V.determinant() < 0.0) V.col(2) *= -1.0;
  const Vec3 s = svd.singularValues();
  FParams p;
  p.qu = Eigen::Quaterniond(U).normalized();
  p.qv = Eigen::Quaterniond(V).normalized();
  p.sigma = s(0) > 0.0 ? s(1) / s(0) : 0.0;
  return p;
}

double signed_sampson(const Mat3& F, const Vec3& x1, const Vec3& x2) {
  const Vec3 Fx1 = F * x1;
  const Vec3 Ftx2 = F.transpose() * x2;
  const double num = x2.dot(Fx1);
  const double den = Fx1.x() * Fx1.x() + Fx1.y() * Fx1.y() + Ftx2.x() * Ftx2.x() + Ftx2.y() * Ftx2.y();
  if (!(den > 0.0)) return num == 0.0 ? 0.0 : kFar;
  return num / std::sqrt(den);
}

double weighted_model_cost(const Model& model, std::span<const Correspondence> points,
                           std::span<const double> weights) {
  const ModelEvaluator eval(model);
  double c = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w == 0.0) continue;
    const double r = eval(points[i]);
    c += w * r * r;
  }
  return c;
}

LMProblem<FParams> fundamental_problem(std::span<const Correspondence> points) {
  LMProblem<FParams> p;
  p.dof = 7;
  p.residuals = [points](const FParams& x) {
    const Mat3 F = x.matrix();
    Eigen::VectorXd r(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = signed_sampson(F, points[i].source, points[i].target);
    }
    return r;
  };
  p.retract = [](const FParams& x, const Eigen::VectorXd& d) {
    FParams y;
    y.qu = quaternion_update(x.qu, d.segment<3>(0));
    y.qv = quaternion_update(x.qv, d.segment<3>(3));
    y.sigma = std::abs(x.sigma + d(6));
    return y;
  };
  return p;
}

LMProblem<RelativePoseParams> relative_pose_problem(std::span<const Correspondence> points) {
  LMProblem<RelativePoseParams> p;
  p.dof = 5;
  p.residuals = [points](const RelativePoseParams& x) {
    const Mat3 E = essential_from_pose(x.rotation, x.translation);
    Eigen::VectorXd r(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      r(static_cast<Eigen::Index>(i)) = signed_sampson(E, points[i].source, points[i].target);
    }
    return r;
  };
  p.retract = [](const RelativePoseParams& x, const Eigen::VectorXd& d) {
    const auto [b1, b2] = tangent_basis(x.translation);
    return RelativePoseParams{rotation_update(x.rotation, d.head<3>()),
                              (x.translation + d(3) * b1 + d(4) * b2).normalized()};
  };
  return p;
}

LMProblem<AbsolutePoseParams> absolute_pose_problem(std::span<const Correspondence> points) {
  LMProblem<AbsolutePoseParams> p;
  p.dof = 6;
  p.residuals = [points](const AbsolutePoseParams& x) {
    Eigen::VectorXd r(2 * points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Vec3 P = x.rotation * points[i].source + x.translation;
      const auto k = static_cast<Eigen::Index>(2 * i);
      if (P.z() <= 1e-12) {
        r(k) = r(k + 1) = kFar;
        continue;
      }
      r(k) = P.x() / P.z() - points[i].target.x() / points[i].target.z();
      r(k + 1) = P.y() / P.z() - points[i].target.y() / points[i].target.z();
    }
    return r;
  };
  p.retract = [](const AbsolutePoseParams& x, const Eigen::VectorXd& d) {
    return AbsolutePoseParams{rotation_update(x.rotation, d.head<3>()), x.translation + d.tail<3>()};
  };
  p.scales = [](const AbsolutePoseParams& x) {
    Eigen::VectorXd s = Eigen::VectorXd::Ones(6);
    s.tail<3>().setConstant(x.translation.norm());
    return s;
  };
  return p;
}

Model fit_h_dlt(std::span<const Correspondence> points, std::span<const double> weights) {
  const Subset s = positive(points, weights);
  if (s.points.size() < 4) throw Error(ErrorCode::RankDeficient, "fit_h_dlt: fewer than 4 weighted points");
  const auto [T1, T2] = normalize_pair(s.points);
  Eigen::MatrixXd A(2 * s.points.size(), 9);
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const Vec3 x = apply_h(T1, s.points[i].source);
    const Vec3 y = apply_h(T2, s.points[i].target);
    const double w = std::sqrt(s.weights[i]);
    const auto k = static_cast<Eigen::Index>(2 * i);
    A.row(k) << 0, 0, 0, -x(0), -x(1), -1, y(1) * x(0), y(1) * x(1), y(1);
    A.row(k + 1) << x(0), x(1), 1, 0, 0, 0, -y(0) * x(0), -y(0) * x(1), -y(0);
    A.row(k) *= w;
    A.row(k + 1) *= w;
  }
  const NullVector nv = smallest_singular(A);
  if (!(nv.second > 1e-10 * nv.largest)) throw Error(ErrorCode::RankDeficient, "fit_h_dlt: rank < 8");
  Mat3 H = T2.inverse_matrix() * from_row_major(nv.v) * T1.matrix();
  if (std::abs(H(2, 2)) > 1e-12 * H.norm()) H /= H(2, 2);
  else H /= H.norm();
  return Model::homography(H);
}

Model fit_f_nonminimal(std::span<const Correspondence> points, std::span<const double> weights,
                       const LMSettings& settings, const Model* initial) {
  const Subset s = positive(points, weights);
  if (s.points.size() < 7) throw Error(ErrorCode::RankDeficient, "fit_f_nonminimal: fewer than 7 weighted points");
  Model start = s.points.size() >= 8 ? fit_f_linear(s) : best_minimal(ProblemKind::Fundamental, s);
  if (initial != nullptr && initial->kind == ProblemKind::Fundamental &&
      weighted_model_cost(*initial, s.points, s.weights) < weighted_model_cost(start, s.points, s.weights)) {
    start = Model::fundamental(canonical_sign(rank2(initial->matrix)));
  }
  // The shared-scale normalization multiplies every Sampson residual by the
  // same factor, so the minimizer is unchanged while the problem becomes well
  // conditioned.
  const auto [T1, T2] = normalize_pair(s.points);
  std::vector<Correspondence> normalized;
  for (const auto& c : s.points) normalized.push_back({apply_h(T1, c.source), apply_h(T2, c.target), c.quality});
  const Mat3 Fn = T2.inverse_matrix().transpose() * start.matrix * T1.inverse_matrix();
  const auto problem = fundamental_problem(normalized);
  const auto result = lm_minimize(FParams::from_matrix(Fn), problem, s.weights, settings);
  return Model::fundamental(canonical_sign(T2.matrix().transpose() * result.state.matrix() * T1.matrix()));
}

Model fit_e_nonminimal(std::span<const Correspondence> points, std::span<const double> weights,
                       const LMSettings& settings, const Model* initial) {
  const Subset s = positive(points, weights);
  if (s.points.size() < 5) throw Error(ErrorCode::RankDeficient, "fit_e_nonminimal: fewer than 5 weighted points");
  std::vector<Model> candidates;
  if (s.points.size() >= 8) {
    Eigen::MatrixXd A(s.points.size(), 9);
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      A.row(static_cast<Eigen::Index>(i)) = std::sqrt(s.weights[i]) * epipolar_row(s.points[i].source, s.points[i].target);
    }
    const NullVector nv = smallest_singular(A);
    if (nv.second > 1e-10 * nv.largest) {
      candidates.push_back(Model::essential(project_to_essential(from_row_major(nv.v))));
    }
  }
  if (candidates.empty()) candidates.push_back(best_minimal(ProblemKind::Essential, s));
  if (initial != nullptr && initial->kind == ProblemKind::Essential) candidates.push_back(*initial);

  std::optional<RelativePoseParams> start;
  double best = std::numeric_limits<double>::infinity();
  for (const Model& m : candidates) {
    RelativePose pose;
    try {
      pose = decompose_essential(m, s.points);
    } catch (const Error&) {
      continue;
    }
    const RelativePoseParams x{pose.rotation, pose.translation.normalized()};
    const double c = weighted_model_cost(Model::essential(essential_from_pose(x.rotation, x.translation)),
                                         s.points, s.weights);
    if (c < best) {
      best = c;
      start = x;
    }
  }
  if (!start) throw Error(ErrorCode::NoCheiralSolution, "fit_e_nonminimal: no cheiral decomposition");
  const auto problem = relative_pose_problem(s.points);
  const auto result = lm_minimize(*start, problem, s.weights, settings);
  return Model::essential(canonical_sign(essential_from_pose(result.state.rotation, result.state.translation)));
}

namespace {

// Gauss-Newton on the control-point distance equations ||sum_k b_k dv_k||^2 = rho.
Eigen::VectorXd refine_betas(Eigen::VectorXd beta, const std::vector<std::vector<Vec3>>& dv,
                             const std::vector<double>& rho) {
  const auto n = beta.size();
  const auto pairs = static_cast<Eigen::Index>(rho.size());
  auto residual = [&](const Eigen::VectorXd& b, Eigen::MatrixXd* J) {
    Eigen::VectorXd r(pairs);
    for (Eigen::Index p = 0; p < pairs; ++p) {
      Vec3 d = Vec3::Zero();
      for (Eigen::Index k = 0; k < n; ++k) d += b(k) * dv[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)];
      r(p) = d.squaredNorm() - rho[static_cast<std::size_t>(p)];
      if (J != nullptr) {
        for (Eigen::Index k = 0; k < n; ++k) {
          (*J)(p, k) = 2.0 * d.dot(dv[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)]);
        }
      }
    }
    return r;
  };
  Eigen::MatrixXd J(pairs, n);
  Eigen::VectorXd r = residual(beta, &J);
  for (int it = 0; it < 10; ++it) {
    const Eigen::VectorXd step = J.colPivHouseholderQr().solve(r);
    if (!step.allFinite()) break;
    const Eigen::VectorXd next = beta - step;
    Eigen::MatrixXd Jn(pairs, n);
    const Eigen::VectorXd rn = residual(next, &Jn);
    if (!(rn.norm() < r.norm())) break;
    beta = next;
    r = rn;
    J = Jn;
  }
  return beta;
}

}  // namespace

Model epnp(std::span<const Correspondence> points, std::span<const double> weights) {
  const Subset s = positive(points, weights);
  const std::size_t n = s.points.size();
  if (n < 4) throw Error(ErrorCode::DegenerateControlPoints, "epnp: fewer than 4 weighted points");
  const double wsum = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
  Vec3 c0 = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) c0 += s.weights[i] * s.points[i].source;
  c0 /= wsum;
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 d = s.points[i].source - c0;
    cov += s.weights[i] * d * d.transpose();
  }
  cov /= wsum;
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 lam = eig.eigenvalues();
  if (!(lam(1) > 1e-12 * lam(2)) || !(lam(2) > 0.0)) {
    throw Error(ErrorCode::DegenerateControlPoints, "epnp: world points are collinear");
  }
  const bool planar = !(lam(0) > 1e-10 * lam(2));
  const int nc = planar ? 3 : 4;

  // Control points: centroid plus principal directions scaled by their spread.
  std::vector<Vec3> ctrl{c0};
  for (int k = 2; k >= (planar ? 1 : 0); --k) ctrl.push_back(c0 + std::sqrt(lam(k)) * eig.eigenvectors().col(k));
  Eigen::MatrixXd basis(3, nc - 1);
  for (int k = 1; k < nc; ++k) basis.col(k - 1) = ctrl[static_cast<std::size_t>(k)] - c0;
  const auto basis_qr = basis.colPivHouseholderQr();

  std::vector<Eigen::VectorXd> alphas(n);
  Eigen::MatrixXd M(2 * n, 3 * nc);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd a = basis_qr.solve(Eigen::Vector3d(s.points[i].source - c0));
    Eigen::VectorXd alpha(nc);
    alpha(0) = 1.0 - a.sum();
    alpha.tail(nc - 1) = a;
    alphas[i] = alpha;
    const double u = s.points[i].target.x() / s.points[i].target.z();
    const double v = s.points[i].target.y() / s.points[i].target.z();
    const double w = std::sqrt(s.weights[i]);
    const auto r = static_cast<Eigen::Index>(2 * i);
    for (int j = 0; j < nc; ++j) {
      M.block<2, 3>(r, 3 * j) << alpha(j), 0.0, -alpha(j) * u, 0.0, alpha(j), -alpha(j) * v;
    }
    M.row(r) *= w;
    M.row(r + 1) *= w;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> kernel(M.transpose() * M);

  std::vector<std::pair<int, int>> pairs;
  std::vector<double> rho;
  for (int a = 0; a < nc; ++a) {
    for (int b = a + 1; b < nc; ++b) {
      pairs.emplace_back(a, b);
      rho.push_back((ctrl[static_cast<std::size_t>(a)] - ctrl[static_cast<std::size_t>(b)]).squaredNorm());
    }
  }
  auto ctrl_of = [&](int k, int a) { return Vec3(kernel.eigenvectors().col(k).segment<3>(3 * a)); };
  std::vector<std::vector<Vec3>> dv(pairs.size(), std::vector<Vec3>(static_cast<std::size_t>(nc)));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (int k = 0; k < nc; ++k) dv[p][static_cast<std::size_t>(k)] = ctrl_of(k, pairs[p].first) - ctrl_of(k, pairs[p].second);
  }

  std::optional<Model> best;
  double best_cost = std::numeric_limits<double>::infinity();
  std::vector<Vec3> world(n);
  for (std::size_t i = 0; i < n; ++i) world[i] = s.points[i].source;
  for (int N = 1; N <= nc; ++N) {
    const int unknowns = N * (N + 1) / 2;
    if (unknowns > static_cast<int>(pairs.size())) break;
    // Linearized distance constraints in the products b_k b_l.
    Eigen::MatrixXd L(static_cast<Eigen::Index>(pairs.size()), unknowns);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      int col = 0;
      for (int k = 0; k < N; ++k) {
        for (int l = k; l < N; ++l) {
          const double f = k == l ? 1.0 : 2.0;
          L(static_cast<Eigen::Index>(p), col++) = f * dv[p][static_cast<std::size_t>(k)].dot(dv[p][static_cast<std::size_t>(l)]);
        }
      }
    }
    const Eigen::VectorXd B =
        L.colPivHouseholderQr().solve(Eigen::Map<const Eigen::VectorXd>(rho.data(), static_cast<Eigen::Index>(rho.size())));
    if (!B.allFinite() || B(0) == 0.0) continue;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(nc);
    beta(0) = std::sqrt(std::abs(B(0)));
    for (int l = 1; l < N; ++l) beta(l) = B(l) / beta(0);
    beta = refine_betas(beta, dv, rho);

    std::vector<Vec3> cam_ctrl(static_cast<std::size_t>(nc), Vec3::Zero());
    for (int a = 0; a < nc; ++a) {
      for (int k = 0; k < nc; ++k) cam_ctrl[static_cast<std::size_t>(a)] += beta(k) * ctrl_of(k, a);
    }
    std::vector<Vec3> cam(n, Vec3::Zero());
    double depth = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (int a = 0; a < nc; ++a) cam[i] += alphas[i](a) * cam_ctrl[static_cast<std::size_t>(a)];
      depth += cam[i].z();
    }
    if (depth < 0.0) {
      for (auto& c : cam) c = -c;
    }
    const RigidTransform T = procrustes(world, cam, s.weights);
    const Model m = Model::absolute_pose(T.rotation, T.translation);
    const double c = weighted_model_cost(m, s.points, s.weights);
    if (c < best_cost) {
      best_cost = c;
      best = m;
    }
  }
  if (!best) throw Error(ErrorCode::DegenerateControlPoints, "epnp: no solution");
  return *best;
}

Model fit_pnp_nonminimal(std::span<const Correspondence> points, std::span<const double> weights,
                         const LMSettings& settings, const Model* initial) {
  const Subset s = positive(points, weights);
  if (s.points.size() < 3) throw Error(ErrorCode::DegenerateControlPoints, "fit_pnp_nonminimal: fewer than 3 points");
  Model start = s.points.size() >= 4 ? epnp(s.points, s.weights) : best_minimal(ProblemKind::AbsolutePose, s);
  if (initial != nullptr && initial->kind == ProblemKind::AbsolutePose &&
      weighted_model_cost(*initial, s.points, s.weights) < weighted_model_cost(start, s.points, s.weights)) {
    start = *initial;
  }
  const auto problem = absolute_pose_problem(s.points);
  const auto result = lm_minimize(AbsolutePoseParams{start.matrix, start.translation}, problem,
                                  per_residual(s.weights, 2), settings);
  return Model::absolute_pose(result.state.rotation, result.state.translation);
}

Model fit_rigid_nonminimal(std::span<const Correspondence> points, std::span<const double> weights) {
  const Subset s = positive(points, weights);
  if (s.points.size() < 3) throw Error(ErrorCode::DegenerateConfiguration, "fit_rigid_nonminimal: fewer than 3 points");
  std::vector<Vec3> src, dst;
  for (const auto& c : s.points) {
    src.push_back(c.source);
    dst.push_back(c.target);
  }
  const double wsum = std::accumulate(s.weights.begin(), s.weights.end(), 0.0);
  Vec3 mean = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) mean += s.weights[i] * src[i];
  mean /= wsum;
  Mat3 cov = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) cov += s.weights[i] * (src[i] - mean) * (src[i] - mean).transpose();
  const Vec3 lam = Eigen::SelfAdjointEigenSolver<Mat3>(cov).eigenvalues();
  if (!(lam(1) > 1e-12 * lam(2))) throw Error(ErrorCode::DegenerateConfiguration, "fit_rigid_nonminimal: collinear points");
  const RigidTransform T = procrustes(src, dst, s.weights);
  return Model::rigid(T.rotation, T.translation);
}

Model fit_nonminimal(ProblemKind kind, std::span<const Correspondence> points, std::span<const double> weights,
                     const LMSettings& settings, const Model* initial) {
  switch (kind) {
    case ProblemKind::Homography: return fit_h_dlt(points, weights);
    case ProblemKind::Fundamental: return fit_f_nonminimal(points, weights, settings, initial);
    case ProblemKind::Essential: return fit_e_nonminimal(points, weights, settings, initial);
    case ProblemKind::AbsolutePose: return fit_pnp_nonminimal(points, weights, settings, initial);
    case ProblemKind::Rigid: return fit_rigid_nonminimal(points, weights);
  }
  throw Error(ErrorCode::KindMismatch);
}

}  // namespace rg
