#include "rg/minimal.hpp"

#include "rg/geom.hpp"
#include "rg/polynomial.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace rg {

namespace {

using Vec9 = Eigen::Matrix<double, 9, 1>;
using RowMat3 = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;

Mat3 from_row_major(const Vec9& v) { return Eigen::Map<const RowMat3>(v.data()); }

// Row of the epipolar constraint x2^T M x1 = 0 for row-major vec(M).
Eigen::Matrix<double, 1, 9> epipolar_row(const Vec3& x1, const Vec3& x2) {
  Eigen::Matrix<double, 1, 9> r;
  r << x2.x() * x1.x(), x2.x() * x1.y(), x2.x(), x2.y() * x1.x(), x2.y() * x1.y(), x2.y(), x1.x(),
      x1.y(), 1.0;
  return r;
}

// Fixed orthogonal mixing matrix. The LU kernel is aligned with coordinate
// axes, so a structured model (say a skew-symmetric E with zero diagonal) can
// have an exactly zero coefficient on one basis vector; mixing by a generic
// rotation makes that a measure-zero event again.
Eigen::MatrixXd generic_rotation(int dim) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = 0.3 + 0.17 * i + 0.05 * i * i;
  v.normalize();
  return Eigen::MatrixXd::Identity(dim, dim) - 2.0 * v * v.transpose();
}

// Orthonormal basis of the right null space of A, or no columns when its
// dimension differs from `dim`. LU first; SVD when the pivots are too small
// to trust the LU rank decision.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& A, int dim) {
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  const int expected_rank = static_cast<int>(A.cols()) - dim;
  if (lu.rank() < expected_rank) return {};
  double min_pivot = std::numeric_limits<double>::infinity();
  for (int i = 0; i < expected_rank; ++i) min_pivot = std::min(min_pivot, std::abs(lu.matrixLU()(i, i)));
  if (min_pivot >= 1e-12 * lu.maxPivot() && lu.rank() == expected_rank) {
    const Eigen::MatrixXd K = lu.kernel();
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(K);
    return qr.householderQ() * Eigen::MatrixXd::Identity(A.cols(), dim) * generic_rotation(dim);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (s.size() >= expected_rank && s(expected_rank - 1) <= 1e-12 * s(0)) return {};
  return svd.matrixV().rightCols(dim);
}

Mat3 adjugate(const Mat3& M) {
  Mat3 adj;
  adj(0, 0) = M(1, 1) * M(2, 2) - M(1, 2) * M(2, 1);
  adj(0, 1) = M(0, 2) * M(2, 1) - M(0, 1) * M(2, 2);
  adj(0, 2) = M(0, 1) * M(1, 2) - M(0, 2) * M(1, 1);
  adj(1, 0) = M(1, 2) * M(2, 0) - M(1, 0) * M(2, 2);
  adj(1, 1) = M(0, 0) * M(2, 2) - M(0, 2) * M(2, 0);
  adj(1, 2) = M(0, 2) * M(1, 0) - M(0, 0) * M(1, 2);
  adj(2, 0) = M(1, 0) * M(2, 1) - M(1, 1) * M(2, 0);
  adj(2, 1) = M(0, 1) * M(2, 0) - M(0, 0) * M(2, 1);
  adj(2, 2) = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  return adj;
}

// det(A + t B) as ascending coefficients.
Polynomial det_pencil(const Mat3& A, const Mat3& B) {
  return Polynomial({A.determinant(), (adjugate(A) * B).trace(), (A * adjugate(B)).trace(),
                     B.determinant()});
}

}  // namespace

Mat3 canonical_sign(const Mat3& M) {
  const double n = M.norm();
  if (!(n > 0.0)) return M;
  Mat3 out = M / n;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      if (std::abs(out(r, c)) > 1e-12) return out(r, c) < 0.0 ? Mat3(-out) : out;
    }
  }
  return out;
}

RigidTransform procrustes(std::span<const Vec3> source, std::span<const Vec3> target,
                          std::span<const double> weights) {
  const std::size_t n = source.size();
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };
  double total = 0.0;
  Vec3 cs = Vec3::Zero(), ct = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    total += w(i);
    cs += w(i) * source[i];
    ct += w(i) * target[i];
  }
  RigidTransform out;
  if (!(total > 0.0)) return out;
  cs /= total;
  ct /= total;
  Mat3 S = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) S += w(i) * (source[i] - cs) * (target[i] - ct).transpose();
  const Eigen::JacobiSVD<Mat3> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 D = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) D(2, 2) = -1.0;
  out.rotation = svd.matrixV() * D * svd.matrixU().transpose();
  out.translation = ct - out.rotation * cs;
  return out;
}

HypothesisList solve_h_4pt(std::span<const Correspondence> sample) {
  if (sample.size() != 4) return {};
  Eigen::Matrix<double, 8, 8> A;
  Eigen::Matrix<double, 8, 1> b;
  for (int i = 0; i < 4; ++i) {
    const double x = sample[i].source.x(), y = sample[i].source.y();
    const double u = sample[i].target.x(), v = sample[i].target.y();
    A.row(2 * i) << x, y, 1.0, 0.0, 0.0, 0.0, -x * u, -y * u;
    A.row(2 * i + 1) << 0.0, 0.0, 0.0, x, y, 1.0, -x * v, -y * v;
    b(2 * i) = u;
    b(2 * i + 1) = v;
  }
  const Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(A);
  if (lu.rank() < 8) return {};
  const Eigen::Matrix<double, 8, 1> h = lu.solve(b);
  Mat3 H;
  H << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  const Model model = Model::homography(H);
  if (!satisfies_invariants(model)) return {};
  return {model};
}

HypothesisList solve_f_7pt(std::span<const Correspondence> sample) {
  if (sample.size() != 7) return {};
  Eigen::MatrixXd A(7, 9);
  for (int i = 0; i < 7; ++i) A.row(i) = epipolar_row(sample[i].source, sample[i].target);
  const Eigen::MatrixXd N = null_space(A, 2);
  if (N.cols() != 2) return {};
  const Mat3 F1 = from_row_major(N.col(0));
  const Mat3 F2 = from_row_major(N.col(1));

  // det(F1 + t F2) = 0; the t -> infinity end of the pencil is F2 itself.
  const Polynomial cubic = det_pencil(F1, F2);
  std::vector<Mat3> candidates;
  if (std::abs(cubic.coeffs[3]) <= 1e-12 * cubic.max_abs_coeff()) {
    candidates.push_back(F2);
    Polynomial quad({cubic.coeffs[0], cubic.coeffs[1], cubic.coeffs[2]});
    for (double t : roots_cubic(quad)) candidates.push_back(F1 + t * F2);
  } else {
    for (double t : roots_cubic(cubic)) candidates.push_back(F1 + t * F2);
  }

  HypothesisList out;
  for (const Mat3& F : candidates) {
    Model m = Model::fundamental(canonical_sign(F));
    if (!satisfies_invariants(m)) {
      // Polish a root that is only nearly singular onto the rank-2 set.
      Eigen::JacobiSVD<Mat3> svd(m.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Vec3 s = svd.singularValues();
      s(2) = 0.0;
      m.matrix = canonical_sign(svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose());
      if (!satisfies_invariants(m)) continue;
    }
    out.push_back(m);
  }
  return out;
}

namespace {

// Polynomial in x, y, z with every exponent at most 3; index a*16 + b*4 + c
// holds the coefficient of x^a y^b z^c.
struct Poly3 {
  std::array<double, 64> c{};

  Poly3 operator+(const Poly3& o) const {
    Poly3 r;
    for (int i = 0; i < 64; ++i) r.c[i] = c[i] + o.c[i];
    return r;
  }
  Poly3 operator-(const Poly3& o) const {
    Poly3 r;
    for (int i = 0; i < 64; ++i) r.c[i] = c[i] - o.c[i];
    return r;
  }
  Poly3 operator*(double s) const {
    Poly3 r;
    for (int i = 0; i < 64; ++i) r.c[i] = c[i] * s;
    return r;
  }
  Poly3 operator*(const Poly3& o) const {
    std::array<int, 64> ia{}, ib{};
    int na = 0, nb = 0;
    for (int i = 0; i < 64; ++i) {
      if (c[i] != 0.0) ia[na++] = i;
      if (o.c[i] != 0.0) ib[nb++] = i;
    }
    Poly3 r;
    for (int p = 0; p < na; ++p) {
      const int i = ia[p];
      for (int q = 0; q < nb; ++q) {
        const int j = ib[q];
        // Exponents add per variable; inputs never exceed total degree 3.
        r.c[i + j] += c[i] * o.c[j];
      }
    }
    return r;
  }
};

constexpr int mono(int a, int b, int c) { return a * 16 + b * 4 + c; }

// Monomial order of the constraint matrix; the first ten are eliminated.
constexpr std::array<int, 20> kMonomials{
    mono(3, 0, 0), mono(0, 3, 0), mono(2, 1, 0), mono(1, 2, 0), mono(2, 0, 1),
    mono(2, 0, 0), mono(0, 2, 1), mono(0, 2, 0), mono(1, 1, 1), mono(1, 1, 0),
    mono(1, 0, 2), mono(1, 0, 1), mono(1, 0, 0), mono(0, 1, 2), mono(0, 1, 1),
    mono(0, 1, 0), mono(0, 0, 3), mono(0, 0, 2), mono(0, 0, 1), mono(0, 0, 0)};

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

std::vector<double> poly_sub(std::vector<double> a, const std::vector<double>& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return a;
}

std::vector<double> poly_add(std::vector<double> a, const std::vector<double>& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

double eval(const std::vector<double>& p, double z) {
  double v = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * z + *it;
  return v;
}

}  // namespace

namespace {

// det(E) and 2 E E^T E - tr(E E^T) E stacked into ten residuals.
Eigen::Matrix<double, 10, 1> essential_constraints(const Mat3& E) {
  Eigen::Matrix<double, 10, 1> r;
  r(0) = E.determinant();
  const Mat3 T = 2.0 * E * E.transpose() * E - (E * E.transpose()).trace() * E;
  for (int k = 0; k < 9; ++k) r(1 + k) = T(k / 3, k % 3);
  return r;
}

// Directional derivative of essential_constraints at E along D.
Eigen::Matrix<double, 10, 1> essential_constraints_dir(const Mat3& E, const Mat3& D) {
  Eigen::Matrix<double, 10, 1> r;
  Mat3 cof;
  cof.row(0) = E.row(1).cross(E.row(2));
  cof.row(1) = E.row(2).cross(E.row(0));
  cof.row(2) = E.row(0).cross(E.row(1));
  r(0) = cof.cwiseProduct(D).sum();
  const Mat3 T = 2.0 * (D * E.transpose() * E + E * D.transpose() * E + E * E.transpose() * D) -
                 2.0 * (D * E.transpose()).trace() * E - (E * E.transpose()).trace() * D;
  for (int k = 0; k < 9; ++k) r(1 + k) = T(k / 3, k % 3);
  return r;
}

// The degree-10 polynomial loses precision when roots cluster; a few
// Gauss-Newton steps on the original cubic system recover full accuracy.
void polish_essential(const Eigen::MatrixXd& N, Vec3& xyz) {
  auto matrix_of = [&](const Vec3& p) {
    return from_row_major(Vec9(p(0) * N.col(0) + p(1) * N.col(1) + p(2) * N.col(2) + N.col(3)));
  };
  std::array<Mat3, 3> dirs;
  for (int k = 0; k < 3; ++k) dirs[k] = from_row_major(Vec9(N.col(k)));
  Mat3 E = matrix_of(xyz);
  Eigen::Matrix<double, 10, 1> r = essential_constraints(E);
  for (int it = 0; it < 4; ++it) {
    Eigen::Matrix<double, 10, 3> J;
    for (int k = 0; k < 3; ++k) J.col(k) = essential_constraints_dir(E, dirs[k]);
    const Vec3 step = J.colPivHouseholderQr().solve(r);
    if (!step.allFinite()) return;
    const Vec3 next = xyz - step;
    const Mat3 En = matrix_of(next);
    const auto rn = essential_constraints(En);
    if (!(rn.norm() < r.norm())) return;
    xyz = next;
    E = En;
    r = rn;
  }
}

}  // namespace

HypothesisList solve_e_5pt(std::span<const Correspondence> sample) {
  if (sample.size() != 5) return {};
  Eigen::MatrixXd Q(5, 9);
  for (int i = 0; i < 5; ++i) Q.row(i) = epipolar_row(sample[i].source, sample[i].target);
  const Eigen::MatrixXd N = null_space(Q, 4);
  if (N.cols() != 4) return {};

  // E = x X + y Y + z Z + W.
  std::array<std::array<Poly3, 3>, 3> E;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int k = r * 3 + c;
      E[r][c].c[mono(1, 0, 0)] = N(k, 0);
      E[r][c].c[mono(0, 1, 0)] = N(k, 1);
      E[r][c].c[mono(0, 0, 1)] = N(k, 2);
      E[r][c].c[mono(0, 0, 0)] = N(k, 3);
    }
  }

  std::array<Poly3, 10> eqs;
  eqs[0] = E[0][0] * (E[1][1] * E[2][2] - E[1][2] * E[2][1]) -
           E[0][1] * (E[1][0] * E[2][2] - E[1][2] * E[2][0]) +
           E[0][2] * (E[1][0] * E[2][1] - E[1][1] * E[2][0]);
  std::array<std::array<Poly3, 3>, 3> EEt;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      EEt[r][c] = E[r][0] * E[c][0] + E[r][1] * E[c][1] + E[r][2] * E[c][2];
    }
  }
  const Poly3 half_trace = (EEt[0][0] + EEt[1][1] + EEt[2][2]) * 0.5;
  for (int r = 0; r < 3; ++r) EEt[r][r] = EEt[r][r] - half_trace;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      eqs[1 + r * 3 + c] = EEt[r][0] * E[0][c] + EEt[r][1] * E[1][c] + EEt[r][2] * E[2][c];
    }
  }

  Eigen::Matrix<double, 10, 20> M;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 20; ++j) M(i, j) = eqs[i].c[kMonomials[j]];
  }
  const Eigen::Matrix<double, 10, 10> A = M.leftCols<10>();
  const Eigen::FullPivLU<Eigen::Matrix<double, 10, 10>> lu(A);
  if (!lu.isInvertible()) return {};
  const Eigen::Matrix<double, 10, 10> C = lu.solve(M.rightCols<10>());

  // Rows 4..9 of the reduced system read
  //   [x^2 z | x^2 | y^2 z | y^2 | xyz | xy] + C * [xz^2 xz x yz^2 yz y z^3 z^2 z 1]^T = 0.
  // Subtracting z times the next row cancels the leading monomial and leaves
  // three equations linear in (x, y, 1) with coefficients polynomial in z.
  std::array<std::array<std::vector<double>, 3>, 3> B;
  for (int r = 0; r < 3; ++r) {
    const auto e = C.row(4 + 2 * r);
    const auto f = C.row(5 + 2 * r);
    B[r][0] = {e(2), e(1) - f(2), e(0) - f(1), -f(0)};
    B[r][1] = {e(5), e(4) - f(5), e(3) - f(4), -f(3)};
    B[r][2] = {e(9), e(8) - f(9), e(7) - f(8), e(6) - f(7), -f(6)};
  }
  auto minor = [&](int r0, int r1, int c0, int c1) {
    return poly_sub(poly_mul(B[r0][c0], B[r1][c1]), poly_mul(B[r0][c1], B[r1][c0]));
  };
  const std::vector<double> det =
      poly_add(poly_sub(poly_mul(B[0][0], minor(1, 2, 1, 2)), poly_mul(B[0][1], minor(1, 2, 0, 2))),
               poly_mul(B[0][2], minor(1, 2, 0, 1)));

  HypothesisList out;
  const Polynomial p(det);
  if (p.degree() < 1) return {};
  for (double z : roots_sturm(p)) {
    Mat3 Bz;
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) Bz(r, c) = eval(B[r][c], z);
    }
    Vec3 v = Bz.row(0).cross(Bz.row(1));
    for (const auto& cand : {Vec3(Bz.row(0).cross(Bz.row(2))), Vec3(Bz.row(1).cross(Bz.row(2)))}) {
      if (cand.norm() > v.norm()) v = cand;
    }
    if (!(std::abs(v.z()) > 1e-12 * v.norm())) continue;
    Vec3 xyz(v.x() / v.z(), v.y() / v.z(), z);
    polish_essential(N, xyz);
    const Vec9 e = xyz(0) * N.col(0) + xyz(1) * N.col(1) + xyz(2) * N.col(2) + N.col(3);
    if (!e.allFinite()) continue;
    const Mat3 Ec = canonical_sign(project_to_essential(from_row_major(e)));
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const Model& m) {
      return (m.matrix - Ec).norm() < 1e-9;
    });
    if (!duplicate) out.push_back(Model::essential(Ec));
  }
  return out;
}

namespace {

// Gauss-Newton on the three distance equations lambda^T M_ij lambda = a_ij.
Vec3 refine_depths(const Vec3& lambda0, const std::array<Mat3, 3>& M, const Vec3& a) {
  Vec3 lambda = lambda0;
  auto residuals = [&](const Vec3& l) {
    return Vec3(l.dot(M[0] * l) - a(0), l.dot(M[1] * l) - a(1), l.dot(M[2] * l) - a(2));
  };
  Vec3 r = residuals(lambda);
  for (int it = 0; it < 5; ++it) {
    Mat3 J;
    for (int k = 0; k < 3; ++k) J.row(k) = 2.0 * (M[k] * lambda).transpose();
    const Eigen::FullPivLU<Mat3> lu(J);
    if (!lu.isInvertible()) break;
    const Vec3 next = lambda - lu.solve(r);
    const Vec3 rn = residuals(next);
    if (!(rn.norm() < r.norm())) break;
    lambda = next;
    r = rn;
  }
  return lambda;
}

}  // namespace

HypothesisList solve_p3p(std::span<const Correspondence> sample) {
  if (sample.size() != 3) return {};
  std::array<Vec3, 3> X, y;
  for (int i = 0; i < 3; ++i) {
    X[i] = sample[i].source;
    y[i] = Vec3(sample[i].target.x(), sample[i].target.y(), 1.0).normalized();
  }
  const double a12 = (X[0] - X[1]).squaredNorm();
  const double a13 = (X[0] - X[2]).squaredNorm();
  const double a23 = (X[1] - X[2]).squaredNorm();
  if (!(a12 > 0.0 && a13 > 0.0 && a23 > 0.0)) return {};
  const double b12 = y[0].dot(y[1]), b13 = y[0].dot(y[2]), b23 = y[1].dot(y[2]);

  std::array<Mat3, 3> M;
  M[0] << 1.0, -b12, 0.0, -b12, 1.0, 0.0, 0.0, 0.0, 0.0;
  M[1] << 1.0, 0.0, -b13, 0.0, 0.0, 0.0, -b13, 0.0, 1.0;
  M[2] << 0.0, 0.0, 0.0, 0.0, 1.0, -b23, 0.0, -b23, 1.0;
  const Vec3 a(a12, a13, a23);

  // Both forms vanish on every solution; a singular member of their pencil
  // is a pair of planes through the solutions.
  const Mat3 D1 = M[0] * a23 - M[2] * a12;
  const Mat3 D2 = M[1] * a23 - M[2] * a13;
  const Polynomial cubic = det_pencil(D1, D2);
  double best_gamma = 0.0, best_quality = -1.0;
  Eigen::SelfAdjointEigenSolver<Mat3> best_eig;
  for (double gamma : roots_cubic(cubic)) {
    const Mat3 D0 = D1 + gamma * D2;
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(D0);
    // Ascending eigenvalues; the one closest to zero is the null direction.
    const Vec3 ev = eig.eigenvalues();
    int zero = 0;
    for (int k = 1; k < 3; ++k) {
      if (std::abs(ev(k)) < std::abs(ev(zero))) zero = k;
    }
    const int i1 = (zero + 1) % 3, i2 = (zero + 2) % 3;
    if (ev(i1) * ev(i2) >= 0.0) continue;
    const double quality = std::min(std::abs(ev(i1)), std::abs(ev(i2))) /
                           std::max(std::abs(ev(i1)), std::abs(ev(i2)));
    if (quality > best_quality) {
      best_quality = quality;
      best_gamma = gamma;
      best_eig = eig;
    }
  }
  if (best_quality < 0.0) return {};

  const Vec3 ev = best_eig.eigenvalues();
  int zero = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(ev(k)) < std::abs(ev(zero))) zero = k;
  }
  const int i1 = (zero + 1) % 3, i2 = (zero + 2) % 3;
  const Vec3 e1 = best_eig.eigenvectors().col(i1);
  const Vec3 e2 = best_eig.eigenvectors().col(i2);
  const double s = std::sqrt(-ev(i2) / ev(i1));
  // On the plane pair the form restricted from D1 equals -gamma times that of D2.
  const Mat3& G = std::abs(best_gamma) >= 1.0 ? D1 : D2;

  HypothesisList out;
  std::vector<Vec3> seen;
  for (double sign : {1.0, -1.0}) {
    // sigma1 (e1.l)^2 + sigma2 (e2.l)^2 = 0  <=>  e1.l = +-s e2.l
    const Vec3 normal = (e1 - sign * s * e2).normalized();
    Vec3 p = normal.unitOrthogonal();
    Vec3 q = normal.cross(p);
    const double g00 = p.dot(G * p), g01 = p.dot(G * q), g11 = q.dot(G * q);
    std::vector<Vec3> rays;
    if (std::abs(g00) >= std::abs(g11)) {
      for (double r : roots_quadratic(g00, 2.0 * g01, g11)) rays.push_back(r * p + q);
    } else {
      for (double r : roots_quadratic(g11, 2.0 * g01, g00)) rays.push_back(p + r * q);
    }
    for (const Vec3& ray : rays) {
      const double den = ray.dot(M[2] * ray);
      if (!(den > 0.0)) continue;
      Vec3 lambda = ray * std::sqrt(a23 / den);
      if (lambda.sum() < 0.0) lambda = -lambda;
      if (!(lambda.minCoeff() > 0.0)) continue;
      lambda = refine_depths(lambda, M, a);
      if (!(lambda.minCoeff() > 0.0) || !lambda.allFinite()) continue;
      const bool duplicate = std::any_of(seen.begin(), seen.end(), [&](const Vec3& l) {
        return (l - lambda).norm() <= 1e-10 * lambda.norm();
      });
      if (duplicate) continue;
      seen.push_back(lambda);

      std::array<Vec3, 3> P;
      for (int i = 0; i < 3; ++i) P[i] = lambda(i) * y[i];
      const RigidTransform T = procrustes(X, P);
      const Model m = Model::absolute_pose(T.rotation, T.translation);
      if (satisfies_invariants(m)) out.push_back(m);
    }
  }
  return out;
}

HypothesisList solve_rigid_3pt(std::span<const Correspondence> sample) {
  if (sample.size() != 3) return {};
  std::array<Vec3, 3> src, dst;
  for (int i = 0; i < 3; ++i) {
    src[i] = sample[i].source;
    dst[i] = sample[i].target;
  }
  const RigidTransform T = procrustes(src, dst);
  Model m = Model::rigid(T.rotation, T.translation);
  if (!satisfies_invariants(m)) return {};
  return {m};
}

HypothesisList solve_minimal(ProblemKind kind, std::span<const Correspondence> sample) {
  switch (kind) {
    case ProblemKind::Homography: return solve_h_4pt(sample);
    case ProblemKind::Fundamental: return solve_f_7pt(sample);
    case ProblemKind::Essential: return solve_e_5pt(sample);
    case ProblemKind::AbsolutePose: return solve_p3p(sample);
    case ProblemKind::Rigid: return solve_rigid_3pt(sample);
  }
  return {};
}

}  // namespace rg
