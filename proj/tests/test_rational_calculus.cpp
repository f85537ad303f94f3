#include <doctest.h>

#include <cmath>
#include <memory>

#include "kerrlab/rational_calculus.hpp"

using namespace kerrlab;

namespace {

FactoredRational::Basis schwarzschild_basis() {
  auto b = std::make_shared<FactorBasis>();
  b->factors = {Polynomial::identity(), Polynomial({0, -2, 1})};
  b->names = {"r", "r^2-2r"};
  return b;
}

}  // namespace

TEST_SUITE("rational_calculus") {
  TEST_CASE("polynomial arithmetic") {
    const Polynomial p({1, 2, 3});  // 1 + 2x + 3x^2
    const Polynomial q({-1, 1});    // x - 1
    CHECK(p.degree() == 2);
    CHECK((p * q).coeffs() == std::vector<mpq_class>{-1, -1, -1, 3});
    CHECK((p - p).is_zero());
    CHECK(p.derivative() == Polynomial({2, 6}));
    CHECK(p.evaluate(2) == 17);
    CHECK(p.shifted(1) == Polynomial({6, 8, 3}));
    const auto [quo, rem] = Polynomial::divmod(p * q + Polynomial::constant(5), q);
    CHECK(quo == p);
    CHECK(rem == Polynomial::constant(5));
    CHECK(exact(0.25) == mpq_class(1, 4));
  }

  TEST_CASE("factored derivative matches finite differences") {
    const auto B = schwarzschild_basis();
    // sqrt(r^2 - 2r) * r^-3 * (r + 1)
    const FactoredRational f(B, Polynomial({1, 1}), {-6, 1});
    const FactoredRational df = f.derivative();
    for (double r : {2.5, 3.0, 7.0}) {
      const double h = 1e-5;
      const double fd = (f.evaluate(r + h) - f.evaluate(r - h)) / (2 * h);
      CHECK(df.evaluate(r) == doctest::Approx(fd).epsilon(1e-8));
    }
  }

  TEST_CASE("sqrt, products and quotients") {
    const auto B = schwarzschild_basis();
    const FactoredRational g = FactoredRational::factor_power(B, 1, 2) * FactoredRational::factor_power(B, 0, -4);
    const FactoredRational s = g.sqrt();
    CHECK((s * s).same_function(g));
    const FactoredRational q = g / s;
    CHECK(q.same_function(s));
    CHECK(s.evaluate(4.0) == doctest::Approx(std::sqrt(8.0) / 4.0).epsilon(1e-15));
  }

  TEST_CASE("sums need matching half-integer parity") {
    const auto B = schwarzschild_basis();
    const FactoredRational a = FactoredRational::factor_power(B, 1, 1);
    const FactoredRational b = FactoredRational::factor_power(B, 1, 2);
    CHECK_THROWS(a + b);
    const FactoredRational c = FactoredRational::factor_power(B, 1, 3);
    CHECK((a + c).evaluate(5.0) == doctest::Approx(std::sqrt(15.0) + std::pow(15.0, 1.5)).epsilon(1e-14));
  }

  TEST_CASE("exact evaluation and fractions") {
    const auto B = schwarzschild_basis();
    const FactoredRational f(B, Polynomial({1}), {-2, -2});  // 1 / (r (r^2 - 2r))
    CHECK(f.evaluate_exact(3) == mpq_class(1, 9));
    const auto [n, d] = f.as_fraction();
    CHECK(n == Polynomial::constant(1));
    CHECK(d == Polynomial({0, 0, -2, 1}));
    const FactoredRational g(B, Polynomial({1}), {1, 0});
    CHECK_THROWS(g.evaluate_exact(3));
  }
}
