#include "rg/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rg {

int Polynomial::degree() const {
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i) {
    if (coeffs[i] != 0.0) return i;
  }
  return -1;
}

double Polynomial::operator()(double x) const {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

Polynomial Polynomial::derivative() const {
  Polynomial d;
  for (std::size_t i = 1; i < coeffs.size(); ++i) d.coeffs.push_back(static_cast<double>(i) * coeffs[i]);
  return d;
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs) m = std::max(m, std::abs(c));
  return m;
}

std::vector<double> roots_quadratic(double a, double b, double c) {
  if (a == 0.0) {
    if (b == 0.0) return {};
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  if (disc == 0.0) return {-b / (2.0 * a)};
  // Avoids cancellation between -b and the square root.
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  std::vector<double> r{q / a};
  if (q != 0.0) r.push_back(c / q);
  std::sort(r.begin(), r.end());
  return r;
}

namespace {

double newton_polish(const Polynomial& p, const Polynomial& dp, double x, int steps) {
  double fx = p(x);
  for (int i = 0; i < steps && fx != 0.0; ++i) {
    const double d = dp(x);
    if (d == 0.0) break;
    const double nx = x - fx / d;
    const double nf = p(nx);
    if (!(std::abs(nf) < std::abs(fx))) break;
    x = nx;
    fx = nf;
  }
  return x;
}

}  // namespace

std::vector<double> roots_cubic(const Polynomial& p) {
  const int deg = p.degree();
  if (deg < 3) {
    auto c = p.coeffs;
    c.resize(3, 0.0);
    return roots_quadratic(c[2], c[1], c[0]);
  }
  const double a = p.coeffs[2] / p.coeffs[3];
  const double b = p.coeffs[1] / p.coeffs[3];
  const double c = p.coeffs[0] / p.coeffs[3];

  const double Q = (a * a - 3.0 * b) / 9.0;
  const double R = (2.0 * a * a * a - 9.0 * a * b + 27.0 * c) / 54.0;
  const double Q3 = Q * Q * Q;
  std::vector<double> roots;
  if (R * R < Q3) {
    const double theta = std::acos(std::clamp(R / std::sqrt(Q3), -1.0, 1.0));
    const double s = -2.0 * std::sqrt(Q);
    for (double shift : {0.0, 2.0 * std::numbers::pi, -2.0 * std::numbers::pi}) {
      roots.push_back(s * std::cos((theta + shift) / 3.0) - a / 3.0);
    }
  } else {
    const double A = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(R * R - Q3)), R);
    const double B = A != 0.0 ? Q / A : 0.0;
    const double x0 = A + B - a / 3.0;
    roots.push_back(x0);
    // A near-double root hides in the deflated quadratic x^2 + e x + f.
    const double e = a + x0;
    const double f = b + e * x0;
    const double disc = e * e - 4.0 * f;
    const double scale = std::max({e * e, std::abs(f), 1e-300});
    if (disc >= -1e-14 * scale) {
      const double h = std::sqrt(std::max(0.0, disc));
      roots.push_back((-e + h) / 2.0);
      if (h > 0.0) roots.push_back((-e - h) / 2.0);
    }
  }
  const Polynomial dp = p.derivative();
  for (double& r : roots) r = newton_polish(p, dp, r, 4);
  std::sort(roots.begin(), roots.end());
  // The deflated branch can duplicate x0 when the cubic has a triple root.
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double u, double v) { return std::abs(u - v) <= 1e-12 * (1.0 + std::abs(u)); }),
              roots.end());
  return roots;
}

double cauchy_bound(const Polynomial& p) {
  const int deg = p.degree();
  if (deg <= 0) return 1.0;
  const double lead = std::abs(p.coeffs[deg]);
  double m = 0.0;
  for (int i = 0; i < deg; ++i) m = std::max(m, std::abs(p.coeffs[i]) / lead);
  return 1.0 + m;
}

double root_bound(const Polynomial& p) {
  const int deg = p.degree();
  if (deg <= 0) return 1.0;
  const double lead = std::abs(p.coeffs[deg]);
  // Fujiwara: 2 max |c_{n-k} / c_n|^(1/k), with the constant term halved.
  double f = 0.0;
  for (int k = 1; k <= deg; ++k) {
    double ratio = std::abs(p.coeffs[deg - k]) / lead;
    if (k == deg) ratio *= 0.5;
    f = std::max(f, std::pow(ratio, 1.0 / k));
  }
  return std::min(cauchy_bound(p), 2.0 * f);
}

namespace {

Polynomial trimmed(const Polynomial& p) {
  Polynomial q = p;
  q.coeffs.resize(static_cast<std::size_t>(std::max(0, p.degree() + 1)));
  return q;
}

// Negated remainder of a / b; b must have a nonzero leading coefficient.
Polynomial negated_remainder(Polynomial a, const Polynomial& b) {
  const int db = b.degree();
  const double lead = b.coeffs[db];
  for (int i = a.degree(); i >= db; --i) {
    const double f = a.coeffs[i] / lead;
    for (int j = 0; j <= db; ++j) a.coeffs[i - db + j] -= f * b.coeffs[j];
    a.coeffs[i] = 0.0;
  }
  Polynomial r = trimmed(a);
  // Coefficients far below the dividend's scale are cancellation noise.
  const double noise = 1e-14 * std::max(a.max_abs_coeff(), b.max_abs_coeff());
  while (!r.coeffs.empty() && std::abs(r.coeffs.back()) <= noise) r.coeffs.pop_back();
  for (double& c : r.coeffs) c = -c;
  // Rescaling keeps sign patterns and prevents overflow down the chain.
  const double m = r.max_abs_coeff();
  if (m > 0.0) {
    for (double& c : r.coeffs) c /= m;
  }
  return r;
}

class SturmChain {
 public:
  explicit SturmChain(const Polynomial& p) {
    chain_.push_back(trimmed(p));
    chain_.push_back(trimmed(p.derivative()));
    while (chain_.back().degree() > 0) {
      Polynomial r = negated_remainder(chain_[chain_.size() - 2], chain_.back());
      if (r.degree() < 0) break;
      chain_.push_back(std::move(r));
    }
  }

  int sign_changes(double x) const {
    int changes = 0;
    double prev = 0.0;
    for (const auto& q : chain_) {
      const double v = q(x);
      if (v == 0.0) continue;
      if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++changes;
      prev = v;
    }
    return changes;
  }

 private:
  std::vector<Polynomial> chain_;
};

double refine_bracketed(const Polynomial& p, const Polynomial& dp, double a, double b) {
  double fa = p(a);
  if (fa == 0.0) return a;
  if (p(b) == 0.0) return b;
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double fx = p(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double d = dp(x);
    double next = d != 0.0 ? x - fx / d : 0.5 * (a + b);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x)) || b - a <= 4e-16 * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

struct Isolator {
  const Polynomial& p;
  const Polynomial& dp;
  const SturmChain& chain;
  double min_width;
  std::vector<double>& out;

  void run(double a, double b, int va, int vb, int depth) {
    const int count = va - vb;
    if (count <= 0) return;
    if (count == 1 && (p(a) > 0.0) != (p(b) > 0.0)) {
      out.push_back(refine_bracketed(p, dp, a, b));
      return;
    }
    if (b - a <= min_width || depth > 200) {
      // A cluster of roots (or a multiple root) narrower than the merge tolerance.
      out.push_back(newton_polish_mid(a, b));
      return;
    }
    const double mid = 0.5 * (a + b);
    const int vm = chain.sign_changes(mid);
    run(a, mid, va, vm, depth + 1);
    run(mid, b, vm, vb, depth + 1);
  }

  double newton_polish_mid(double a, double b) const {
    double x = 0.5 * (a + b);
    for (int i = 0; i < 8; ++i) {
      const double d = dp(x);
      if (d == 0.0) break;
      const double nx = x - p(x) / d;
      if (!(nx >= a && nx <= b) || !(std::abs(p(nx)) < std::abs(p(x)))) break;
      x = nx;
    }
    return x;
  }
};

}  // namespace

std::vector<double> roots_sturm(const Polynomial& input, double lo, double hi) {
  const Polynomial p = trimmed(input);
  const int deg = p.degree();
  if (deg <= 0 || !(hi > lo)) return {};
  const double bound = root_bound(p);
  const SturmChain chain(p);
  const Polynomial dp = p.derivative();
  std::vector<double> roots;
  // Sturm counts are for the half-open interval (lo, hi]; a root exactly at lo is added here.
  if (p(lo) == 0.0) roots.push_back(lo);
  Isolator iso{p, dp, chain, 1e-9 * bound, roots};
  iso.run(lo, hi, chain.sign_changes(lo), chain.sign_changes(hi), 0);
  std::sort(roots.begin(), roots.end());
  std::vector<double> merged;
  for (double r : roots) {
    if (!merged.empty() && r - merged.back() < 1e-9 * bound) continue;
    merged.push_back(r);
  }
  return merged;
}

std::vector<double> roots_sturm(const Polynomial& p) {
  // Nudged outward so that a root exactly on the bound is strictly inside.
  const double bound = root_bound(p) * (1.0 + 1e-12) + 1e-300;
  return roots_sturm(p, -bound, bound);
}

}  // namespace rg
