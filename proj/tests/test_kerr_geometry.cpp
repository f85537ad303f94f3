#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>
#include <numbers>

#include "kerrlab/error.hpp"
#include "kerrlab/kerr_geometry.hpp"

using namespace kerrlab;
using HP = boost::multiprecision::cpp_dec_float_50;

namespace {

// 50-digit tortoise coordinate with r*(3M) = 0, from the closed-form antiderivative
// of (r^2+a^2)/Delta written with the two horizon roots.
HP tortoise_oracle(double M_, double a_, double r_) {
  const HP M(M_), a(a_), r(r_);
  const HP disc = sqrt(M * M - a * a);
  const HP rp = M + disc, rm = M - disc;
  if (a_ == 0.0) return r - 3 * M + 2 * M * log((r - 2 * M) / M);
  const HP cp = 2 * M * rp / (rp - rm), cm = 2 * M * rm / (rp - rm);
  auto raw = [&](const HP& x) { return x + cp * log(x - rp) - cm * log(x - rm); };
  return raw(r) - raw(HP(3) * M);
}

}  // namespace

TEST_SUITE("kerr_geometry") {
  TEST_CASE("horizon radii") {
    auto h = horizon_radii({1.0, 0.0});
    CHECK(h.r_minus == 0.0);
    CHECK(h.r_plus == 2.0);
    h = horizon_radii({1.0, 0.5});
    CHECK(h.r_minus == doctest::Approx(0.1339746).epsilon(1e-7));
    CHECK(h.r_plus == doctest::Approx(1.8660254).epsilon(1e-7));
    const HP s = sqrt(HP(1) - HP(0.999) * HP(0.999));
    CHECK(horizon_radii({1.0, 0.999}).r_plus == doctest::Approx(static_cast<double>(1 + s)).epsilon(1e-15));
    CHECK(horizon_radii({1.0, 0.999}).r_plus == doctest::Approx(1.0447102).epsilon(1e-7));
    CHECK(horizon_radii({1.0, 0.999}).r_minus == doctest::Approx(static_cast<double>(1 - s)).epsilon(1e-13));
  }

  TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(KerrParams({1.0, 1.0}).validate(), ValidationError);
    CHECK_THROWS_AS(KerrParams({-1.0, 0.0}).validate(), ValidationError);
    CHECK_THROWS_AS(KerrParams({1.0, std::nan("")}).validate(), ValidationError);
    CHECK_NOTHROW(KerrParams({1.0, -0.9}).validate());
  }

  TEST_CASE("metric scalars") {
    auto s = metric_scalars({1.0, 0.0}, 3.0, 0.7);
    CHECK(s.delta == 3.0);
    CHECK(s.sigma == 9.0);
    CHECK(s.pi == 81.0);
    s = metric_scalars({1.0, 0.5}, 3.0, std::numbers::pi / 2);
    CHECK(s.delta == doctest::Approx(3.25).epsilon(1e-15));
    CHECK(s.sigma == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(s.pi == doctest::Approx(84.75).epsilon(1e-15));
    CHECK_THROWS_AS(metric_scalars({1.0, 0.0}, 2.0, 1.0), ValidationError);
    // the excluded boundary value is the root of Delta
    const double r = 2.0 + 1e-9;
    CHECK(metric_scalars({1.0, 0.0}, r, 1.0).delta == doctest::Approx(r * (r - 2.0)).epsilon(1e-6));
  }

  TEST_CASE("horizon angular velocity") {
    CHECK(omega_h({1.0, 0.0}) == 0.0);
    CHECK(omega_h({1.0, 0.5}) == doctest::Approx((2.0 - std::sqrt(3.0)) / 2.0).epsilon(1e-14));
    CHECK(omega_h({1.0, -0.5}) == doctest::Approx(-(2.0 - std::sqrt(3.0)) / 2.0).epsilon(1e-14));
  }

  TEST_CASE("omega_perp") {
    CHECK(omega_perp({1.0, 0.0}, 5.0, 1.0) == 0.0);
    CHECK(omega_perp({1.0, 0.5}, 3.0, std::numbers::pi / 2) == doctest::Approx(3.0 / 84.75).epsilon(1e-14));
    const KerrParams p{1.0, 0.5};
    for (double th : {0.3, 1.0, 2.0})
      CHECK(std::abs(omega_perp(p, p.r_plus() + 1e-9, th) - omega_h(p)) < 1e-8);
  }

  TEST_CASE("tortoise values") {
    for (double a : {0.0, 0.3, 0.9}) {
      const RadialMap map({1.0, a});
      CHECK(map.tortoise(3.0) == 0.0);
    }
    const RadialMap s({1.0, 0.0});
    CHECK(s.tortoise(4.0) == doctest::Approx(1.0 + 2.0 * std::log(2.0)).epsilon(1e-15));
    CHECK(tortoise(s, 4.0) == s.tortoise(4.0));
  }

  TEST_CASE("tortoise against 50-digit closed form") {
    for (double a : {0.0, 0.3, 0.9}) {
      const RadialMap map({1.0, a});
      const double rp = horizon_radii({1.0, a}).r_plus;
      for (double r : {rp + 1e-6, rp + 1e-3, 2.5, 3.0, 3.7, 10.0, 123.4, 1e4}) {
        if (r <= rp) continue;
        const double ref = static_cast<double>(tortoise_oracle(1.0, a, r));
        CHECK(std::abs(map.tortoise(r) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
      }
    }
  }

  TEST_CASE("tortoise round trip and monotonicity") {
    for (double a : {0.0, 0.3, 0.9}) {
      const RadialMap map({1.0, a});
      const double rp = map.params().r_plus();
      double prev = -1e300;
      for (int k = 0; k <= 400; ++k) {
        const double rr = std::min(rp + 1e-6 * std::pow(1e10, k / 400.0), 1e4);
        const double rs = map.tortoise(rr);
        CHECK(rs > prev);
        prev = rs;
        CHECK(std::abs(map.inverse(rs) - rr) < 1e-12);
        CHECK(inverse_tortoise(map, rs) == map.inverse(rs));
      }
    }
  }

  TEST_CASE("tortoise table and offset inverse") {
    const RadialMap map({1.0, 0.3});
    const auto tab = map.table({-200.0, -10.0, 0.0, 50.0});
    REQUIRE(tab.size() == 4);
    CHECK(tab[2].r == doctest::Approx(3.0).epsilon(1e-15));
    for (const auto& s : tab)
    if (s.r > map.params().r_plus()) CHECK(map.tortoise(s.r) == doctest::Approx(s.r_star).epsilon(1e-12));
    // deep in the near zone the offset keeps precision where r itself cannot
    const long double x = map.inverse_offset(-200.0L);
    CHECK(x > 0.0L);
    CHECK(static_cast<double>(map.tortoise_offset(x)) == doctest::Approx(-200.0).epsilon(1e-13));
  }

  TEST_CASE("blend cutoff") {
    CHECK(blend_chi(5.0).chi == 1.0);
    CHECK(blend_chi(5.0).dchi_dr == 0.0);
    CHECK(blend_chi(12.0).chi == 0.0);
    const Blend b = blend_chi(10.5);
    CHECK(b.chi > 0.0);
    CHECK(b.chi < 1.0);
    CHECK(b.dchi_dr < 0.0);
    const double h = 1e-6;
    CHECK(b.dchi_dr == doctest::Approx((blend_chi(10.5 + h).chi - blend_chi(10.5 - h).chi) / (2 * h)).epsilon(1e-6));
    CHECK(smooth_step(-1.0) == 0.0);
    CHECK(smooth_step(2.0) == 1.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  }

  TEST_CASE("potentials at a = 0") {
    const Potentials p = potentials({1.0, 0.0}, 3.0, 0.4);
    CHECK(p.V == doctest::Approx(2.0 / 81.0).epsilon(1e-15));
    CHECK(p.V_Q == doctest::Approx(1.0 / 27.0).epsilon(1e-15));
    CHECK(p.N_inv_sq == 1.0);
    CHECK(p.h == 1.0);
  }

  TEST_CASE("potentials vanish linearly at the horizon") {
    const KerrParams par{1.0, 0.4};
    const double v1 = potentials_from_offset(par, 1e-6, 1.0).V;
    const double v2 = potentials_from_offset(par, 2e-6, 1.0).V;
    CHECK(v1 > 0.0);
    CHECK(v2 / v1 == doctest::Approx(2.0).epsilon(1e-5));
    CHECK_THROWS_AS(potentials(par, par.r_plus() * 0.99, 1.0), ValidationError);
  }

  TEST_CASE("potentials against 50-digit evaluation") {
    const HP M(1), a(0.3), r(4), th = boost::math::constants::pi<HP>() / 2;
    const HP delta = r * r - 2 * M * r + a * a;
    const HP rho2 = r * r + a * a;
    const HP VQ = delta / (rho2 * rho2);
    const HP V = delta * (2 * M * r * r * r + r * r * a * a - 4 * M * r * a * a + a * a * a * a) / pow(rho2, 4);
    const HP N = 1 - a * a * sin(th) * sin(th) * VQ;
    const HP h = sqrt(1 - 2 * a * a * VQ);
    const Potentials p = potentials({1.0, 0.3}, 4.0, std::numbers::pi / 2);
    CHECK(std::abs(p.V - static_cast<double>(V)) < 1e-12 * static_cast<double>(V));
    CHECK(std::abs(p.V_Q - static_cast<double>(VQ)) < 1e-12 * static_cast<double>(VQ));
    CHECK(std::abs(p.N_inv_sq - static_cast<double>(N)) < 1e-12);
    CHECK(std::abs(p.h - static_cast<double>(h)) < 1e-12);
  }
}
