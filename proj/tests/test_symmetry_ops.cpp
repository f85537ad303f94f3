#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kerrlab/null_geodesics.hpp"
#include "kerrlab/symmetry_ops.hpp"
#include "kerrlab/wave_evolver.hpp"

using namespace kerrlab;

namespace {

GridPtr small_grid(double a, int m, int nth = 64) {
  return make_mode_grid({1.0, a}, m, {-20.0, 40.0, 61, nth});
}

ModeField profile(GridPtr g, const std::function<double(double)>& f) {
  ModeField out = ModeField::zeros(g);
  for (int i = 0; i < g->nr; ++i)
    for (int j = 0; j < g->nth; ++j) out.u[g->index(i, j)] = f(g->theta[static_cast<std::size_t>(j)]);
  return out;
}

double max_error(const ModeGrid& g, const CArray& got, const std::function<double(double)>& want) {
  double e = 0.0;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nth; ++j)
      e = std::max(e, std::abs(got[g.index(i, j)] - want(g.theta[static_cast<std::size_t>(j)])));
  return e;
}

double max_abs(const CArray& x) {
  double e = 0.0;
  for (const auto& v : x) e = std::max(e, std::abs(v));
  return e;
}

}  // namespace

TEST_SUITE("symmetry_ops") {
  TEST_CASE("grid invariants") {
    const GridPtr g = make_mode_grid({1.0, 0.4}, 1, {-50.0, 80.0, 261, 16});
    CHECK(g->drs > 0.0);
    CHECK(g->theta.front() > 0.0);
    CHECK(g->theta.back() < std::numbers::pi);
    CHECK(g->sin_face.front() == 0.0);
    CHECK(g->sin_face.back() == 0.0);
    const RadialMap map({1.0, 0.4});
    for (int i = 0; i < g->nr; ++i)
      CHECK(std::abs(static_cast<double>(map.tortoise_offset(g->x[static_cast<std::size_t>(i)])) -
                     g->rs[static_cast<std::size_t>(i)]) < 1e-10);
    CHECK_THROWS_AS(make_mode_grid({1.0, 0.4}, 0, {-50.0, 80.0, 261, 4}), ValidationError);
  }

  TEST_CASE("angular operator on harmonics") {
    const GridPtr g = small_grid(0.0, 0);
    const CArray c = angular_operator(profile(g, [](double t) { return std::cos(t); }), 0);
    CHECK(max_error(*g, c, [](double t) { return -2.0 * std::cos(t); }) < 2e-3);
    const CArray one = angular_operator(profile(g, [](double) { return 1.0; }), 0);
    CHECK(max_abs(one) < 1e-12);
    // m = 1, u = sin: (1/s)(s cos)' - cot^2 sin = (cos(2 theta) - cos^2)/sin = -sin
    const GridPtr g1 = small_grid(0.0, 1);
    const CArray s = angular_operator(profile(g1, [](double t) { return std::sin(t); }), 1);
    const int jq = g1->nth / 4;
    const double th = g1->theta[static_cast<std::size_t>(jq)];
    const double oracle = (std::cos(2 * th) - std::cos(th) * std::cos(th)) / std::sin(th);
    CHECK(std::abs(s[g1->index(5, jq)].real() - oracle) < 2e-3);
  }

  TEST_CASE("angular operator converges at second order") {
    auto err = [](int nth) {
      const GridPtr g = make_mode_grid({1.0, 0.0}, 0, {-20.0, 40.0, 7, nth});
      const CArray c = angular_operator(profile(g, [](double t) { return 0.5 * (3 * std::cos(t) * std::cos(t) - 1); }), 0);
      return max_error(*g, c, [](double t) { return -3.0 * (3 * std::cos(t) * std::cos(t) - 1); });
    };
    const double order = std::log2(err(32) / err(64));
    CHECK(order > 1.8);
    CHECK(order < 2.2);
  }

  TEST_CASE("angular operator is symmetric for sin-weighted inner product") {
    const GridPtr g = small_grid(0.0, 2, 24);
    std::mt19937_64 gen(3);
    std::normal_distribution<double> n;
    CArray x(g->size()), y(g->size());
    for (auto& e : x) e = {n(gen), n(gen)};
    for (auto& e : y) e = {n(gen), n(gen)};
    const CArray lx = angular_operator(*g, 2, x), ly = angular_operator(*g, 2, y);
    cplx a = 0, b = 0;
    for (int i = 0; i < g->nr; ++i)
      for (int j = 0; j < g->nth; ++j) {
        const std::size_t k = g->index(i, j);
        const double w = g->sin_th[static_cast<std::size_t>(j)];
        a += w * std::conj(y[k]) * lx[k];
        b += w * std::conj(ly[k]) * x[k];
      }
    CHECK(std::abs(a - b) < 1e-9 * std::abs(a));
  }

  TEST_CASE("carter operator") {
    const GridPtr g0 = small_grid(0.0, 0);
    ModeField f = profile(g0, [](double t) { return std::cos(t); });
    const CArray dtt(f.u.size(), cplx(0.7, 0.0));
    const CArray q = carter_apply(f, dtt);
    const CArray l = angular_operator(f, 0);
    for (std::size_t k = 0; k < q.size(); ++k) CHECK(q[k] == l[k]);

    // u = e^{-i t} cos(theta): Q u = Lambda cos - a^2 sin^2 cos at a = 0.3, near theta = pi/3
    const GridPtr g = make_mode_grid({1.0, 0.3}, 0, {-20.0, 40.0, 7, 96});
    ModeField h = profile(g, [](double t) { return std::cos(t); });
    CArray htt(h.u.size());
    for (std::size_t k = 0; k < h.u.size(); ++k) htt[k] = -h.u[k];
    const CArray qh = carter_apply(h, htt);
    const int j = 31;
    const double th = g->theta[static_cast<std::size_t>(j)];
    CHECK(th == doctest::Approx(31.5 * std::numbers::pi / 96).epsilon(1e-14));
    const double oracle = -2.0 * std::cos(th) - 0.09 * std::sin(th) * std::sin(th) * std::cos(th);
    CHECK(std::abs(qh[g->index(3, j)].real() - oracle) < 1e-3);
    CHECK(max_abs(carter_apply(ModeField::zeros(g), CArray(g->size()))) == 0.0);
  }

  TEST_CASE("curly R coefficients") {
    const auto c = curlyR_coefficients({1.0, 0.0}, 3.0);
    CHECK(c.c_tt == -81.0);
    CHECK(c.c_tphi == 0.0);
    CHECK(c.c_phiphi == 3.0);
    CHECK(c.c_Q == 3.0);
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
      const double a = 0.9 * u(gen), r = 2.0 + 20.0 * u(gen);
      const auto p = curlyR_coefficients({1.0, a}, r), n = curlyR_coefficients({1.0, -a}, r);
      CHECK(p.c_tphi == -n.c_tphi);
      CHECK(p.c_phiphi == n.c_phiphi);
      CHECK(p.c_Q == n.c_Q);
      CHECK(p.c_tt == n.c_tt);
    }
  }

  TEST_CASE("curly R matches the radial potential on conserved quantities") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const KerrParams p{1.0, 0.9 * u(gen)};
      const double r = p.r_plus() + 0.1 + 10.0 * std::abs(u(gen));
      const ConservedSet cs{u(gen), 4.0 * u(gen), 20.0 * std::abs(u(gen))};
      const auto c = curlyR_coefficients(p, r);
      const double R = c.c_tt * cs.E * cs.E + c.c_tphi * cs.E * cs.Lz + c.c_phiphi * cs.Lz * cs.Lz + c.c_Q * cs.Q;
      CHECK(R == doctest::Approx(radial_potential(p, cs, r).R).epsilon(1e-10).scale(1.0));
    }
  }

  TEST_CASE("commutator of f = t vanishes") {
    const SpacetimePoint x{0.0L, 5.0L, 1.0L, 0.0L};
    const TestFunction f = [](long double t, long double, long double, long double) { return t; };
    for (double a : {0.0, 0.4, 0.7})
      for (double h : {0.1, 0.01}) CHECK(commutator_residual({1.0, a}, f, x, h) == 0.0L);
  }

  TEST_CASE("commutator for an axisymmetric l = 1 profile is at rounding level") {
    // r^2 cos(theta) is an eigenfunction of both discrete theta operators, so the
    // truncation errors cancel identically.
    const SpacetimePoint x{0.0L, 5.0L, 1.0L, 0.0L};
    const TestFunction f = [](long double, long double r, long double th, long double) { return r * r * cosl(th); };
    for (double h : {0.1, 0.05, 0.025}) CHECK(std::abs(static_cast<double>(commutator_residual({1.0, 0.4}, f, x, h))) < 1e-9);
  }

  TEST_CASE("commutator residual converges at second order") {
    const SpacetimePoint x{0.0L, 5.0L, 1.0L, 0.3L};
    for (const auto& nf : standard_test_functions()) {
      for (double a : {0.0, 0.4, 0.7}) {
        const CommutatorStudy st = commutator_convergence({1.0, a}, nf.f, x, 0.1, 4);
        CHECK_FALSE(st.cancellation_suspected);
        const double order = st.rows.back().observed_order;
        CHECK(order > 1.8);
        CHECK(order < 2.2);
      }
    }
  }

  TEST_CASE("exponential test function at a = 0.7") {
    const TestFunction f = [](long double t, long double r, long double th, long double ph) {
      return expl(-t) * sinl(r) * cosl(th) * cosl(ph);
    };
    const SpacetimePoint x{0.0L, 5.0L, 1.0L, 0.3L};
    CHECK(std::abs(static_cast<double>(commutator_residual({1.0, 0.7}, f, x, 1e-3))) < 1e-4);
  }

  TEST_CASE("matched stencils commute to rounding") {
    const SpacetimePoint x{0.0L, 5.0L, 1.0L, 0.3L};
    for (const auto& nf : standard_test_functions()) {
      const long double res = commutator_residual({1.0, 0.4}, nf.f, x, 0.05, StencilPairing::Matched);
      CHECK(std::abs(static_cast<double>(res)) < 1e-8);
    }
  }

  TEST_CASE("family of the zero field") {
    const GridPtr g = small_grid(0.3, 1, 16);
    const SymmetryFamily fam = build_symmetry_family(ModeField::zeros(g));
    CHECK(fam.members.size() == 7);
    CHECK(fam.generated().size() == 6);
    CHECK(fam.max_order() == 2);
    for (const auto* f : fam.generated()) {
      CHECK(max_abs(f->u) == 0.0);
      CHECK(max_abs(f->v) == 0.0);
    }
  }

  TEST_CASE("axisymmetric static data") {
    const GridPtr g = make_mode_grid({1.0, 0.3}, 0, {-60.0, 60.0, 601, 16});
    const ModeField u0 = gaussian_initial_data(g, 20.0, 3.0, 1.0, 2);
    const SymmetryFamily fam = build_symmetry_family(u0);
    for (const auto& m : fam.members)
      if (m.label == "dphi" || m.label == "dtdphi" || m.label == "dphiphi") {
        CHECK(max_abs(m.field.u) == 0.0);
        CHECK(max_abs(m.field.v) == 0.0);
      }
    const ModeField L = apply_L(fam, 1.0);
    CHECK(max_abs(L.u) > 0.0);
  }

  TEST_CASE("Q commutes with the discrete evolution") {
    auto mismatch = [](int nr, int nth) {
      EvolutionConfig cfg;
      cfg.params = {1.0, 0.3};
      cfg.m = 1;
      cfg.grid = {-60.0, 60.0, nr, nth};
      cfg.t_end = 10.0;
      cfg.sample_dt = 1.0;
      cfg.diagnostics.energies = false;
      const GridPtr g = make_grid(cfg);
      const ModeField u0 = gaussian_initial_data(g, 10.0, 3.0, 1.0, 1);
      auto q_of = [](const ModeField& f) {
        for (const auto& m : build_symmetry_family(f).members)
          if (m.label == "Q") return m.field;
        throw std::logic_error("no Q member");
      };
      const ModeField path_a = q_of(evolve(cfg, u0).final_field);
      const ModeField path_b = evolve(cfg, q_of(u0)).final_field;
      double num = 0.0, den = 0.0;
      for (std::size_t k = 0; k < path_a.u.size(); ++k) {
        num = std::max(num, std::abs(path_a.u[k] - path_b.u[k]));
        den = std::max(den, std::abs(path_a.u[k]));
      }
      return num / den;
    };
    // Q is assembled from the same discrete operator that drives the evolution
    CHECK(mismatch(301, 12) < 1e-11);
    CHECK(mismatch(601, 24) < 1e-11);
  }
}
