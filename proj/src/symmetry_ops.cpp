#include "kerrlab/symmetry_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kerrlab/error.hpp"
#include "kerrlab/parallel.hpp"
#include "kerrlab/wave_evolver.hpp"

namespace kerrlab {

GridPtr make_mode_grid(const KerrParams& params, int m, const GridSpec& spec, double blend_start,
                       double blend_width) {
  params.validate();
  require(spec.n_r >= 3, "grid needs at least 3 radial nodes");
  require(spec.n_theta >= 8, "grid needs at least 8 theta cells");
  require(std::isfinite(spec.r_star_min) && std::isfinite(spec.r_star_max) &&
              spec.r_star_max > spec.r_star_min,
          "grid r* range must be finite and increasing");
  require(blend_width > 0.0, "blend width must be positive");

  auto g = std::make_shared<ModeGrid>();
  g->params = params;
  g->m = m;
  g->nr = spec.n_r;
  g->nth = spec.n_theta;
  g->rs_min = spec.r_star_min;
  g->drs = (spec.r_star_max - spec.r_star_min) / (spec.n_r - 1);
  g->dth = std::numbers::pi / spec.n_theta;
  g->blend_start = blend_start;
  g->blend_width = blend_width;

  const double M = params.mass, a = params.spin, a2 = a * a;
  const double rp = params.r_plus(), d = rp - params.r_minus();
  const RadialMap map(params);

  const auto nr = static_cast<std::size_t>(g->nr);
  for (auto* v : {&g->rs, &g->r, &g->x, &g->delta, &g->rho2, &g->vq, &g->V, &g->gyro, &g->phi_pot, &g->chi})
    v->resize(nr);
  parallel_for(nr, [&](std::size_t i) {
    const double rs = g->rs_min + static_cast<double>(i) * g->drs;
    const double x = static_cast<double>(map.inverse_offset(rs));
    const double r = rp + x;
    const double delta = x * (x + d);
    const double rho2 = r * r + a2;
    const double rho4 = rho2 * rho2;
    g->rs[i] = rs;
    g->x[i] = x;
    g->r[i] = r;
    g->delta[i] = delta;
    g->rho2[i] = rho2;
    g->vq[i] = delta / rho4;
    g->V[i] = potentials_from_offset(params, x, std::numbers::pi / 2).V;
    g->gyro[i] = 4.0 * a * M * r / rho4;
    g->phi_pot[i] = (delta - a2) / rho4;
    g->chi[i] = blend_chi(r, M, blend_start, blend_width).chi;
  });

  const auto nth = static_cast<std::size_t>(g->nth);
  g->theta.resize(nth);
  g->sin_th.resize(nth);
  g->cot2.resize(nth);
  g->sin_face.resize(nth + 1);
  g->ang_plus.resize(nth);
  g->ang_minus.resize(nth);
  for (std::size_t j = 0; j <= nth; ++j)
    g->sin_face[j] = (j == 0 || j == nth) ? 0.0 : std::sin(static_cast<double>(j) * g->dth);
  const double inv_dth2 = 1.0 / (g->dth * g->dth);
  for (std::size_t j = 0; j < nth; ++j) {
    const double th = (static_cast<double>(j) + 0.5) * g->dth;
    const double s = std::sin(th), c = std::cos(th);
    g->theta[j] = th;
    g->sin_th[j] = s;
    g->cot2[j] = (c * c) / (s * s);
    g->ang_plus[j] = g->sin_face[j + 1] * inv_dth2 / s;
    g->ang_minus[j] = g->sin_face[j] * inv_dth2 / s;
  }

  const std::size_t n = g->size();
  for (auto* v : {&g->n_inv_sq, &g->n_sq, &g->omega_perp, &g->h_phiphi}) v->resize(n);
  parallel_for(nr, [&](std::size_t i) {
    for (std::size_t j = 0; j < nth; ++j) {
      const std::size_t k = i * nth + j;
      const double s2 = g->sin_th[j] * g->sin_th[j];
      const double ninv = 1.0 - a2 * s2 * g->vq[i];
      g->n_inv_sq[k] = ninv;
      g->n_sq[k] = 1.0 / ninv;
      g->omega_perp[k] = 2.0 * a * M * g->r[i] / (g->rho2[i] * g->rho2[i] * ninv);
      g->h_phiphi[k] = h_phiphi_from_offset(params, g->x[i], g->theta[j]);
    }
  });
  return g;
}

ModeField ModeField::zeros(GridPtr g) {
  ModeField f;
  f.u.assign(g->size(), cplx{});
  f.v.assign(g->size(), cplx{});
  f.grid = std::move(g);
  return f;
}

void ModeField::validate() const {
  require(grid != nullptr, "mode field has no grid");
  require(u.size() == grid->size() && v.size() == grid->size(), "mode field shape does not match its grid");
}

CArray angular_operator(const ModeGrid& g, int m, const CArray& u) {
  require(u.size() == g.size(), "angular operator: shape mismatch");
  CArray out(u.size());
  const double m2 = static_cast<double>(m) * m;
  const int nth = g.nth;
  parallel_for(static_cast<std::size_t>(g.nr), [&](std::size_t i) {
    const cplx* ur = u.data() + i * static_cast<std::size_t>(nth);
    cplx* o = out.data() + i * static_cast<std::size_t>(nth);
    for (int j = 0; j < nth; ++j) {
      cplx acc = -m2 * g.cot2[static_cast<std::size_t>(j)] * ur[j];
      if (j + 1 < nth) acc += g.ang_plus[static_cast<std::size_t>(j)] * (ur[j + 1] - ur[j]);
      if (j > 0) acc -= g.ang_minus[static_cast<std::size_t>(j)] * (ur[j] - ur[j - 1]);
      o[j] = acc;
    }
  });
  return out;
}

CArray angular_operator(const ModeField& field, int m) {
  field.validate();
  return angular_operator(*field.grid, m, field.u);
}

CArray carter_apply(const ModeField& field, const CArray& dtt) {
  field.validate();
  require(dtt.size() == field.u.size(), "carter_apply: shape mismatch");
  const ModeGrid& g = *field.grid;
  CArray out = angular_operator(g, g.m, field.u);
  const double a2 = g.params.spin * g.params.spin;
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nth; ++j) {
      const std::size_t k = g.index(i, j);
      const double s = g.sin_th[static_cast<std::size_t>(j)];
      out[k] += a2 * s * s * dtt[k];
    }
  return out;
}

CurlyRCoefficients curlyR_coefficients(const KerrParams& p, double r) {
  p.validate();
  const double M = p.mass, a = p.spin, a2 = a * a;
  const double delta = r * r - 2.0 * M * r + a2;
  const double rho2 = r * r + a2;
  return {-rho2 * rho2, -4.0 * a * M * r, delta - a2, delta};
}

// ------------------------------------------------------------ commutator

namespace {

using LD = long double;
using Fn = std::function<LD(const SpacetimePoint&)>;

SpacetimePoint shift(SpacetimePoint x, int axis, LD h) {
  switch (axis) {
    case 0: x.t += h; break;
    case 1: x.r += h; break;
    case 2: x.theta += h; break;
    default: x.phi += h; break;
  }
  return x;
}

LD d2(const Fn& f, const SpacetimePoint& x, int axis, LD h) {
  return (f(shift(x, axis, h)) - 2.0L * f(x) + f(shift(x, axis, -h))) / (h * h);
}

LD d1(const Fn& f, const SpacetimePoint& x, int axis, LD h) {
  return (f(shift(x, axis, h)) - f(shift(x, axis, -h))) / (2.0L * h);
}

LD d_tphi(const Fn& f, const SpacetimePoint& x, LD h) {
  auto at = [&](LD st, LD sp) { return f(shift(shift(x, 0, st), 3, sp)); };
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0L * h * h);
}

// (1/sin) d_theta(sin d_theta f), flux form
LD theta_flux(const Fn& f, const SpacetimePoint& x, LD h) {
  const LD sp = std::sin(x.theta + 0.5L * h), sm = std::sin(x.theta - 0.5L * h);
  const LD f0 = f(x);
  return (sp * (f(shift(x, 2, h)) - f0) - sm * (f0 - f(shift(x, 2, -h)))) / (h * h * std::sin(x.theta));
}

// f_thth + cot f_th, expanded form
LD theta_expanded(const Fn& f, const SpacetimePoint& x, LD h) {
  return d2(f, x, 2, h) + std::cos(x.theta) / std::sin(x.theta) * d1(f, x, 2, h);
}

LD carter_h(const KerrParams& p, const Fn& f, const SpacetimePoint& x, LD h) {
  const LD a = p.spin, s = std::sin(x.theta), c = std::cos(x.theta);
  return theta_flux(f, x, h) + (c * c) / (s * s) * d2(f, x, 3, h) + a * a * s * s * d2(f, x, 0, h);
}

LD sigma_box_h(const KerrParams& p, const Fn& f, const SpacetimePoint& x, LD h, StencilPairing pairing) {
  const LD M = p.mass, a = p.spin, a2 = a * a, r = x.r;
  const LD s = std::sin(x.theta), s2 = s * s;
  const LD delta = r * r - 2.0L * M * r + a2;
  const LD rho2 = r * r + a2;
  const LD pi = rho2 * rho2 - a2 * s2 * delta;
  const LD ang = pairing == StencilPairing::Mixed ? theta_expanded(f, x, h) : theta_flux(f, x, h);
  return delta * d2(f, x, 1, h) + 2.0L * (r - M) * d1(f, x, 1, h) + ang - pi / delta * d2(f, x, 0, h) -
         4.0L * M * a * r / delta * d_tphi(f, x, h) + (delta - a2 * s2) / (delta * s2) * d2(f, x, 3, h);
}

}  // namespace

long double commutator_residual(const KerrParams& p, const TestFunction& f, const SpacetimePoint& x,
                                long double h, StencilPairing pairing) {
  p.validate();
  require(h > 0.0L, "commutator step must be positive");
  require(x.r - 2.0L * h > p.r_plus(), "commutator stencil reaches the horizon");
  require(x.theta - 2.0L * h > 0.0L && x.theta + 2.0L * h < std::numbers::pi_v<long double>,
          "commutator stencil reaches a pole");
  const Fn F = [&](const SpacetimePoint& y) { return f(y.t, y.r, y.theta, y.phi); };
  const Fn boxF = [&](const SpacetimePoint& y) { return sigma_box_h(p, F, y, h, pairing); };
  const Fn qF = [&](const SpacetimePoint& y) { return carter_h(p, F, y, h); };
  return carter_h(p, boxF, x, h) - sigma_box_h(p, qF, x, h, pairing);
}

CommutatorStudy commutator_convergence(const KerrParams& p, const TestFunction& f, const SpacetimePoint& x,
                                       double h0, int levels, StencilPairing pairing) {
  require(levels >= 1, "need at least one refinement level");
  CommutatorStudy out;
  double h = h0;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int l = 0; l < levels; ++l, h *= 0.5) {
    const double res = static_cast<double>(std::abs(commutator_residual(p, f, x, h, pairing)));
    double order = std::numeric_limits<double>::quiet_NaN();
    if (l > 0) {
      order = std::log2(prev / res);
      if (!(res < prev)) out.cancellation_suspected = true;
    }
    out.rows.push_back({h, res, order});
    prev = res;
  }
  return out;
}

std::vector<NamedTestFunction> standard_test_functions() {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  return {
      {"cos(t/3) exp(-r/4) cos(theta) cos(phi)",
       [](LD t, LD r, LD th, LD ph) { return cos(t / 3.0L) * exp(-0.25L * r) * cos(th) * cos(ph); }},
      {"exp(-t) sin(r) cos(theta) cos(phi)",
       [](LD t, LD r, LD th, LD ph) { return exp(-t) * sin(r) * cos(th) * cos(ph); }},
      {"cos(t/2) exp(-(r-5)^2/8) sin^2(theta) cos(2 phi)",
       [](LD t, LD r, LD th, LD ph) {
         return cos(0.5L * t) * exp(-(r - 5.0L) * (r - 5.0L) / 8.0L) * sin(th) * sin(th) * cos(2.0L * ph);
       }},
      {"(1+t^2) log(r) cos^3(theta) sin(phi)",
       [](LD t, LD r, LD th, LD ph) { return (1.0L + t * t) * log(r) * cos(th) * cos(th) * cos(th) * sin(ph); }},
      {"sin(t-r) sin(theta) cos(theta) cos(phi) / r",
       [](LD t, LD r, LD th, LD ph) { return sin(t - r) * sin(th) * cos(th) * cos(ph) / r; }},
  };
}

// ---------------------------------------------------------------- family

std::vector<const ModeField*> SymmetryFamily::generated() const {
  std::vector<const ModeField*> out;
  for (const auto& m : members)
    if (m.order >= 1) out.push_back(&m.field);
  return out;
}

int SymmetryFamily::max_order() const {
  int o = -1;
  for (const auto& m : members) o = std::max(o, m.order);
  return o;
}

SymmetryFamily build_symmetry_family(const ModeField& field) {
  field.validate();
  const ModeGrid& g = *field.grid;
  const GridPtr& gp = field.grid;
  const cplx im(0.0, static_cast<double>(g.m));
  const double a2 = g.params.spin * g.params.spin;

  // time derivatives of u up to third order from the mode equation
  const CArray& u = field.u;
  const CArray& u1 = field.v;
  const CArray u2 = rhs(field).dv_dt;
  ModeField shifted{gp, u1, u2};
  const CArray u3 = rhs(shifted).dv_dt;

  auto scaled = [](const CArray& x, cplx s) {
    CArray y(x);
    for (auto& e : y) e *= s;
    return y;
  };
  auto carter = [&](const CArray& w, const CArray& wtt) {
    CArray out = angular_operator(g, g.m, w);
    for (int i = 0; i < g.nr; ++i)
      for (int j = 0; j < g.nth; ++j) {
        const std::size_t k = g.index(i, j);
        const double s = g.sin_th[static_cast<std::size_t>(j)];
        out[k] += a2 * s * s * wtt[k];
      }
    return out;
  };
  const double m2 = static_cast<double>(g.m) * g.m;

  SymmetryFamily fam;
  fam.members.push_back({0, "id", ModeField{gp, u, u1}});
  fam.members.push_back({1, "dt", ModeField{gp, u1, u2}});
  fam.members.push_back({1, "dphi", ModeField{gp, scaled(u, im), scaled(u1, im)}});
  fam.members.push_back({2, "dtt", ModeField{gp, u2, u3}});
  fam.members.push_back({2, "dtdphi", ModeField{gp, scaled(u1, im), scaled(u2, im)}});
  fam.members.push_back({2, "dphiphi", ModeField{gp, scaled(u, -m2), scaled(u1, -m2)}});
  fam.members.push_back({2, "Q", ModeField{gp, carter(u, u2), carter(u1, u3)}});
  return fam;
}

ModeField apply_L(const SymmetryFamily& family, double eps) {
  const ModeField *dtt = nullptr, *dpp = nullptr, *q = nullptr;
  for (const auto& m : family.members) {
    if (m.label == "dtt") dtt = &m.field;
    if (m.label == "dphiphi") dpp = &m.field;
    if (m.label == "Q") q = &m.field;
  }
  require(dtt && dpp && q, "apply_L needs a second-order symmetry family");
  ModeField out = ModeField::zeros(q->grid);
  for (std::size_t k = 0; k < out.u.size(); ++k) {
    out.u[k] = eps * dtt->u[k] + dpp->u[k] + q->u[k];
    out.v[k] = eps * dtt->v[k] + dpp->v[k] + q->v[k];
  }
  return out;
}

}  // namespace kerrlab
