#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <random>

#include "kerrlab/error.hpp"
#include "kerrlab/hardy_verifier.hpp"

using namespace kerrlab;
using HP = boost::multiprecision::cpp_dec_float_50;

namespace {

// Power series of 2F1 in 50 digits; needs |z| < 1.
HP series_F(HP a, HP b, HP c, HP z) {
  HP term = 1, sum = 1;
  for (int n = 0; n < 1000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z;
    sum += term;
    if (abs(term) < HP("1e-45") * abs(sum)) break;
  }
  return sum;
}

// Pfaff transform for moderate |z|, the 1/z connection formula beyond.
double oracle_F(double a_, double b_, double c_, double z_) {
  const HP a(a_), b(b_), c(c_), z(z_);
  if (z_ >= -1.5) return static_cast<double>(pow(1 - z, -a) * series_F(a, c - b, c, z / (z - 1)));
  using boost::math::tgamma;
  const HP t1 = tgamma(c) * tgamma(b - a) / (tgamma(b) * tgamma(c - a)) * pow(-z, -a) *
                series_F(a, a - c + 1, a - b + 1, 1 / z);
  const HP t2 = tgamma(c) * tgamma(a - b) / (tgamma(a) * tgamma(c - b)) * pow(-z, -b) *
                series_F(b, b - c + 1, b - a + 1, 1 / z);
  return static_cast<double>(t1 + t2);
}

}  // namespace

TEST_SUITE("hardy_verifier") {
  TEST_CASE("normal form at a = 0") {
    const FactoredRational W = normal_form({1.0, 0.0});
    CHECK(W.same_function(schwarzschild_normal_form_reference(1.0)));
    CHECK(W.evaluate_exact(3) == mpq_class(-1, 2));
    CHECK(W.evaluate(2.0 + 1e4) * 1e8 == doctest::Approx(1.5).epsilon(1e-3));
    CHECK(W.evaluate(2.0 + 1e-4) * 1e-8 == doctest::Approx(-1.0 / 12.0).epsilon(1e-3));
    CHECK_FALSE(W.same_function(schwarzschild_normal_form_reference(1.5)));
    CHECK(normal_form({2.0, 0.0}).same_function(schwarzschild_normal_form_reference(2.0)));
  }

  TEST_CASE("hypergeometric parameters") {
    const HypergeometricParams h = solve_hypergeometric_params(1.0);
    const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0), s6 = std::sqrt(6.0), s7 = std::sqrt(7.0);
    CHECK(h.c_h == doctest::Approx(1.0 + s6 / 3.0).epsilon(1e-14));
    CHECK(h.a_h == doctest::Approx(0.5 - 1.5 * s2 + s6 / 6.0 - s7 / 2.0).epsilon(1e-14));
    CHECK(h.b_h == doctest::Approx(0.5 - 1.5 * s2 + s6 / 6.0 + s7 / 2.0).epsilon(1e-13));
    CHECK(std::abs(h.c_h - 1.8164966) < 1e-6);
    CHECK(std::abs(h.a_h + 2.5359477) < 1e-6);
    CHECK(std::abs(h.b_h - 0.1098036) < 1e-6);
    CHECK(h.alpha == doctest::Approx(0.5 + s6 / 6.0).epsilon(1e-15));
    CHECK(std::abs(-h.a_h * h.b_h - (-19.0 / 6.0 + 1.5 * s2 + s3 - s6 / 6.0)) < 1e-14);
    CHECK(h.schwarzschild_ordering());
    CHECK(h.integral_ordering());
    // mass only rescales x
    const HypergeometricParams h2 = solve_hypergeometric_params(3.0);
    CHECK(h2.a_h == doctest::Approx(h.a_h).epsilon(1e-14));
    CHECK(h2.d == 6.0);
  }

  TEST_CASE("perturbed model") {
    const ModelPotential m0 = perturbed_model({1.0, 0.0}, 0.0);
    CHECK(m0.C1 == 9.0);
    CHECK(m0.C2 == -34.0);
    CHECK(m0.C3 == -2.0);
    CHECK(m0.d == 2.0);
    CHECK(m0(1.0) == doctest::Approx(-0.5).epsilon(1e-15));
    const ModelPotential m1 = perturbed_model({1.0, 0.1}, 0.02);
    const HypergeometricParams h = hypergeometric_params_from_model(m1);
    CHECK(h.integral_ordering());
    // eps lowers the potential by eps (M + x)^2 / (x^2 (x+d)^2)
    for (double x : {0.3, 1.0, 7.0}) {
      const double base = perturbed_model({1.0, 0.1}, 0.0)(x);
      CHECK(base - m1(x) == doctest::Approx(0.02 * (1 + x) * (1 + x) / (x * x * (x + m1.d) * (x + m1.d))).epsilon(1e-12));
    }
  }

  TEST_CASE("hypergeometric function") {
    const HypergeometricParams h = solve_hypergeometric_params(1.0);
    CHECK(hypergeometric_F(h.a_h, h.b_h, h.c_h, 0.0) == 1.0);
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 10; ++k) {
      const double b = 0.05 + u(gen), c = b + 0.1 + u(gen), z = -5.0 * u(gen);
      CHECK(hypergeometric_F(-1.0, b, c, z) == doctest::Approx(1.0 - b / c * z).epsilon(1e-12));
    }
    for (double z : {-0.1, -1.0, -3.0, -20.0, -500.0}) {
      const double want = oracle_F(h.a_h, h.b_h, h.c_h, z);
      CHECK(hypergeometric_F(h.a_h, h.b_h, h.c_h, z) == doctest::Approx(want).epsilon(1e-12));
    }
    // symmetry in the first two arguments, the swapped order through the series
    CHECK(static_cast<double>(pow(1 - HP(-3.0), -HP(h.b_h)) *
                              series_F(h.b_h, h.c_h - h.a_h, h.c_h, HP(-3.0) / HP(-4.0))) ==
          doctest::Approx(hypergeometric_F(h.a_h, h.b_h, h.c_h, -3.0)).epsilon(1e-10));
    CHECK_THROWS_AS(hypergeometric_F(0.5, 0.2, 1.0, -1.0), ValidationError);
    CHECK_THROWS_AS(hypergeometric_F(h.a_h, h.b_h, h.c_h, 0.5), ValidationError);
  }

  TEST_CASE("positive solution") {
    std::vector<double> xs;
    for (int k = 0; k <= 200; ++k) xs.push_back(1e-3 * std::pow(1e5, k / 200.0));
    const HardySolution s = positive_solution(1.0, xs);
    CHECK(s.positive);
    CHECK(s.max_residual < 1e-6);
    for (double u : s.u) CHECK(u > 0.0);
    // log-slope of v at small x
    const double x1 = 1e-7, x2 = 2e-7;
    const double slope = std::log(hardy_v(s.hyper, x2) / hardy_v(s.hyper, x1)) / std::log(2.0);
    CHECK(slope == doctest::Approx(0.9082483).epsilon(1e-6));
  }

  TEST_CASE("weighted Hardy inequality") {
    for (double a : {0.0, 0.1}) {
      const KerrParams p{1.0, a};
      const auto tests = random_hardy_test_functions(p, 200, 99);
      const WeightedHardyReport rep = verify_weighted_hardy(p, tests, 0.01);
      CHECK(rep.holds);
      CHECK(rep.tested == 200);
      CHECK(rep.max_epsilon > 0.01);
    }
    RadialTestFunction zero{[](double) { return 0.0; }, [](double) { return 0.0; }, 30.0};
    const WeightedHardyReport z = verify_weighted_hardy({1.0, 0.0}, {zero}, 0.01);
    CHECK(z.holds);
    CHECK(z.skipped_zero == 1);
    CHECK(z.tested == 0);
  }

  TEST_CASE("the cut-off positive solution") {
    const KerrParams p{1.0, 0.0};
    const RadialTestFunction u = cutoff_positive_solution(1.0, 30.0);
    for (double r : {2.01, 2.5, 3.0, 10.0, 35.0, 50.0}) {
      const double h = 1e-5 * (r - 2.0);
      CHECK(u.df(r) == doctest::Approx((u.f(r + h) - u.f(r - h)) / (2 * h)).epsilon(1e-6));
    }
    CHECK(u.f(60.0) == 0.0);
    const WeightedHardyReport rep = verify_weighted_hardy(p, {u}, 0.01);
    CHECK(rep.holds);
    CHECK(rep.tested == 1);
  }

  TEST_CASE("basic Hardy inequality") {
    RadialTestFunction psi{[](double x) { return x * std::exp(-x); },
                           [](double x) { return (1 - x) * std::exp(-x); }, 60.0};
    const BasicHardyReport r = verify_basic_hardy(psi);
    CHECK(r.holds);
    CHECK(r.lhs == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(r.rhs == doctest::Approx(0.25).epsilon(1e-10));
    RadialTestFunction flat{[](double) { return 1.0; }, [](double) { return 0.0; }, 60.0};
    CHECK_THROWS_AS(verify_basic_hardy(flat), ValidationError);
    RadialTestFunction g{[](double x) { return std::exp(-0.5 * x * x); },
                         [](double x) { return -x * std::exp(-0.5 * x * x); }, 10.0};
    const BasicHardyReport s = verify_sterbenz_hardy(g, -10.0, 10.0);
    CHECK(s.holds);
    CHECK(s.constant < 10.0);
    CHECK(s.constant > 0.0);
  }
}
