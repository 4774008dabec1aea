#pragma once

#include <vector>

namespace rg {

/// Real polynomial with coefficients in ascending powers: c0 + c1 x + c2 x^2 + ...
struct Polynomial {
  std::vector<double> coeffs;

  Polynomial() = default;
  explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}

  /// Degree after dropping exactly-zero leading coefficients; -1 for the zero polynomial.
  int degree() const;
  double operator()(double x) const;
  Polynomial derivative() const;
  double max_abs_coeff() const;
};

/// Real roots of a x^2 + b x + c (any of a, b may vanish).
std::vector<double> roots_quadratic(double a, double b, double c);

/// Real roots of a cubic in closed form, polished by Newton steps. Lower-degree
/// input is solved by the quadratic/linear path.
std::vector<double> roots_cubic(const Polynomial& p);

/// 1 + max |c_i / c_lead|; every root lies in [-bound, bound].
double cauchy_bound(const Polynomial& p);

/// The smaller of the Cauchy and Fujiwara bounds. The Cauchy bound alone can
/// exceed the largest root by many orders of magnitude when the leading
/// coefficient is small, which would coarsen the merge tolerance below.
double root_bound(const Polynomial& p);

/// Real roots in [lo, hi], isolated with a Sturm sequence and refined by
/// safeguarded Newton iteration. Sorted ascending; roots closer than
/// 1e-9 * root_bound are merged, so multiple roots appear once.
std::vector<double> roots_sturm(const Polynomial& p, double lo, double hi);

/// All real roots, searched over [-root_bound, root_bound].
std::vector<double> roots_sturm(const Polynomial& p);

}  // namespace rg
