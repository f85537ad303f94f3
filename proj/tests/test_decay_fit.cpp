#include <doctest.h>

#include <cmath>

#include "kerrlab/decay_fit.hpp"
#include "kerrlab/error.hpp"

using namespace kerrlab;

namespace {

ObserverSeries power_law(double p, double shift = 0.0, double t_end = 300.0, double dt = 0.5) {
  ObserverSeries s;
  s.r_star = shift;
  for (double t = 0.0; t <= t_end + 1e-9; t += dt) {
    const double y = std::pow(t + shift + 1.0, -p);
    s.t.push_back(t);
    s.re_u.push_back(y);
    s.im_u.push_back(0.0);
    s.abs_u.push_back(y);
    s.abs_psi.push_back(y);
  }
  return s;
}

}  // namespace

TEST_SUITE("decay_fit") {
  TEST_CASE("synthetic power laws") {
    for (double p : {0.5, 1.5, 3.0}) {
      ObserverSeries s;
      for (double t = 1.0; t <= 300.0; t += 0.5) {
        s.t.push_back(t);
        s.abs_psi.push_back(std::pow(t, -p));
      }
      s.re_u = s.im_u = s.abs_u = s.abs_psi;
      const DecayFit f = fit_decay(s, Region::Stationary, 0.0);
      REQUIRE_FALSE(f.windows.empty());
      for (const auto& w : f.windows) CHECK(std::abs(w.p - p) < 1e-6);
      CHECK(std::abs(f.plateau_p - p) < 1e-6);
      CHECK(f.theorem_consistent == (p >= 1.0));
    }
  }

  TEST_CASE("near region uses t + r*") {
    // |psi| = (u_plus + 1)^-2 with r* = -0.5; the plateau approaches 2
    const ObserverSeries s = power_law(2.0, -0.5);
    const DecayFit f = fit_decay(s, Region::Near, 0.2);
    CHECK(f.region == Region::Near);
    CHECK(std::abs(f.plateau_p - 2.0) < 0.02);
    CHECK(f.lower_bound == 1.0);
    CHECK(f.slack == 0.5);
  }

  TEST_CASE("far region bound and slack") {
    const ObserverSeries s = power_law(0.6, 0.0);
    const DecayFit f = fit_decay(s, Region::Far, 0.0);
    CHECK(f.lower_bound == 0.5);
    CHECK(f.theorem_consistent);
    FitOptions o;
    o.slack = 0.0;
    CHECK_FALSE(fit_decay(power_law(0.4, 0.0), Region::Far, 0.0, o).theorem_consistent);
  }

  TEST_CASE("noise floor truncates the fit") {
    ObserverSeries s;
    for (double t = 0.0; t <= 300.0; t += 0.5) {
      s.t.push_back(t);
      s.abs_psi.push_back(t < 120.0 ? std::exp(-0.3 * t) : 0.0);
    }
    s.re_u = s.im_u = s.abs_u = s.abs_psi;
    const DecayFit f = fit_decay(s, Region::Stationary, 0.0);
    CHECK(f.truncated);
    CHECK_FALSE(f.warnings.empty());
    for (const auto& w : f.windows) CHECK(w.t2 < 120.0);
  }

  TEST_CASE("region resolution") {
    CHECK(resolve_region({2.5, 1.0, Region::Auto}, 1.0) == Region::Near);
    CHECK(resolve_region({10.0, 1.0, Region::Auto}, 1.0) == Region::Stationary);
    CHECK(resolve_region({10.0, 1.0, Region::Far}, 1.0) == Region::Far);
    CHECK(parse_region(region_name(Region::Near)) == Region::Near);
    CHECK_THROWS_AS(parse_region("middle"), ValidationError);
  }

  TEST_CASE("series too short") {
    CHECK_THROWS_AS(fit_decay(power_law(1.0, 0.0, 60.0), Region::Stationary, 0.0), ValidationError);
  }

  TEST_CASE("growth exponents") {
    EnergyLedger L;
    for (int k = 0; k <= 200; ++k) {
      L.t.push_back(k);
      L.E3_Tchi.push_back(2.5);
      L.E3_K.push_back(std::pow(1.0 + k, 0.1));
    }
    CHECK(std::abs(growth_exponent(L, LedgerSeries::E3_Tchi)) < 1e-14);
    CHECK(growth_exponent(L, LedgerSeries::E3_K) == doctest::Approx(0.1).epsilon(1e-12));
    L.E3_K[120] = 0.0;
    CHECK_THROWS_AS(growth_exponent(L, LedgerSeries::E3_K), ValidationError);
    CHECK_THROWS_AS(growth_exponent(L, LedgerSeries::E_K), ValidationError);
  }
}
