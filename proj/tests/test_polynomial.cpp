#include <doctest.h>

#include "rg/polynomial.hpp"
#include "rg/random.hpp"
#include "support/companion.hpp"

#include <cmath>

using namespace rg;

namespace {

Polynomial from_roots(const std::vector<double>& roots) {
  Polynomial p({1.0});
  for (double r : roots) {
    std::vector<double> next(p.coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
      next[i + 1] += p.coeffs[i];
      next[i] -= r * p.coeffs[i];
    }
    p.coeffs = next;
  }
  return p;
}

Polynomial times(const Polynomial& a, const Polynomial& b) {
  std::vector<double> r(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) r[i + j] += a.coeffs[i] * b.coeffs[j];
  }
  return Polynomial(r);
}

}  // namespace

TEST_CASE("polynomial basics") {
  const Polynomial p({1, -3, 0, 2});
  CHECK(p.degree() == 3);
  CHECK(p(2.0) == 1 - 6 + 16);
  CHECK(p.derivative().coeffs == std::vector<double>{-3, 0, 6});
  CHECK(Polynomial({0, 0}).degree() == -1);
  CHECK(cauchy_bound(Polynomial({-6, 1})) == 7.0);
}

TEST_CASE("quadratic roots") {
  CHECK(roots_quadratic(1, -3, 2) == std::vector<double>{1, 2});
  CHECK(roots_quadratic(1, 0, 1).empty());
  CHECK(roots_quadratic(0, 2, -4) == std::vector<double>{2});
  CHECK(roots_quadratic(1, -2, 1) == std::vector<double>{1});
}

TEST_CASE("cubic roots of simple cubics") {
  const auto a = roots_cubic(Polynomial({0, -1, 0, 1}));
  REQUIRE(a.size() == 3);
  CHECK(a[0] == doctest::Approx(-1.0));
  CHECK(std::abs(a[1]) < 1e-15);
  CHECK(a[2] == doctest::Approx(1.0));
  const auto b = roots_cubic(Polynomial({0, 1, 0, 1}));
  REQUIRE(b.size() == 1);
  CHECK(std::abs(b[0]) < 1e-15);
  const auto c = roots_cubic(Polynomial({-1, 3, -3, 1}));  // (x-1)^3
  REQUIRE(!c.empty());
  for (double r : c) CHECK(r == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("cubic roots agree with the companion-matrix oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 10000; ++trial) {
    Polynomial p({uniform_real(rng, -1, 1), uniform_real(rng, -1, 1), uniform_real(rng, -1, 1),
                  uniform_real(rng, -1, 1)});
    const auto roots = roots_cubic(p);
    const auto m = rg::testing::match_roots(roots, rg::testing::companion_roots(p), 1e-7, 1e-7);
    INFO("trial " << trial << " worst " << m.worst);
    REQUIRE(m.ok);
    for (double r : roots) REQUIRE(std::abs(p(r)) < 1e-9 * p.max_abs_coeff() * std::max(1.0, std::pow(std::abs(r), 3)));
  }
}

TEST_CASE("Sturm roots of constructed polynomials") {
  const Polynomial p = times(from_roots({1, 2, 3}), Polynomial({1, 0, 1}));
  const auto r = roots_sturm(p, 0, 10);
  REQUIRE(r.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(r[i] == doctest::Approx(i + 1.0).epsilon(1e-12));

  Polynomial none({1.0});
  for (double a : {0.5, 1.0, 2.0, 3.0, 4.0}) none = times(none, Polynomial({a * a + 1.0, -2.0 * a, 1.0}));
  CHECK(none.degree() == 10);
  CHECK(roots_sturm(none).empty());

  // Interval restriction.
  const auto inner = roots_sturm(from_roots({-5, 0.5, 7}), 0, 1);
  REQUIRE(inner.size() == 1);
  CHECK(inner[0] == doctest::Approx(0.5));

  // Double root reported once.
  const auto dbl = roots_sturm(from_roots({2, 2, -1}));
  REQUIRE(dbl.size() == 2);
  CHECK(dbl[0] == doctest::Approx(-1.0));
  CHECK(dbl[1] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("Sturm roots agree with the companion-matrix oracle on degree 10") {
  Rng rng(2);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> c(11);
    for (double& v : c) v = uniform_real(rng, -1, 1);
    const Polynomial p(c);
    const auto roots = roots_sturm(p);
    const auto m = rg::testing::match_roots(roots, rg::testing::companion_roots(p), 1e-7, 1e-7);
    INFO("trial " << trial << " worst " << m.worst);
    REQUIRE(m.ok);
    for (double r : roots) {
      double scale = 0.0;
      for (std::size_t i = 0; i < c.size(); ++i) scale += std::abs(c[i]) * std::pow(std::abs(r), double(i));
      REQUIRE(std::abs(p(r)) < 1e-9 * std::max(p.max_abs_coeff(), scale));
    }
  }
}

TEST_CASE("Sturm roots of polynomials with planted real roots") {
  Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> planted;
    for (int i = 0; i < 6; ++i) planted.push_back(uniform_real(rng, -5, 5));
    Polynomial p = from_roots(planted);
    p = times(p, Polynomial({uniform_real(rng, 1, 2), 0.0, 1.0}));
    p = times(p, Polynomial({uniform_real(rng, 1, 2), uniform_real(rng, -0.5, 0.5), 1.0}));
    const auto roots = roots_sturm(p);
    const auto m = rg::testing::match_roots(roots, rg::testing::companion_roots(p), 1e-7, 1e-7);
    INFO("trial " << trial << " worst " << m.worst);
    REQUIRE(m.ok);
  }
}
