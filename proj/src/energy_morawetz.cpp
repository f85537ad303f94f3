#include "kerrlab/energy_morawetz.hpp"

#include <cmath>
#include <numbers>

#include "kerrlab/error.hpp"
#include "kerrlab/null_geodesics.hpp"
#include "kerrlab/parallel.hpp"

namespace kerrlab {

namespace {

// Multiplier Y = Yt d_t + Yr d_r* + Yphi d_phi at one node.
struct Multiplier {
  double Yt;
  double Yr;
  double Yphi;
};

// Per-node derivative data shared by all densities.
struct NodeData {
  cplx u, v, ur;
  double dr2;   // |d_r* u|^2, face average
  double dth2;  // |d_theta u|^2, sin-weighted face average
};

NodeData node_data(const ModeGrid& g, const ModeField& f, int i, int j) {
  const std::size_t k = g.index(i, j);
  const std::size_t nth = static_cast<std::size_t>(g.nth);
  NodeData d{};
  d.u = f.u[k];
  d.v = f.v[k];
  const double inv = 1.0 / g.drs;
  double faces = 0.0;
  if (i + 1 < g.nr) faces += std::norm((f.u[k + nth] - f.u[k]) * inv);
  if (i > 0) faces += std::norm((f.u[k] - f.u[k - nth]) * inv);
  d.dr2 = 0.5 * faces;
  if (i > 0 && i + 1 < g.nr) d.ur = (f.u[k + nth] - f.u[k - nth]) * (0.5 * inv);
  else if (i == 0) d.ur = (f.u[k + nth] - f.u[k]) * inv;
  else d.ur = (f.u[k] - f.u[k - nth]) * inv;
  const auto js = static_cast<std::size_t>(j);
  double th = 0.0;
  if (j + 1 < g.nth) th += g.sin_face[js + 1] * std::norm(f.u[k + 1] - f.u[k]);
  if (j > 0) th += g.sin_face[js] * std::norm(f.u[k] - f.u[k - 1]);
  d.dth2 = th / (2.0 * g.sin_th[js] * g.dth * g.dth);
  return d;
}

double canonical_density(const ModeGrid& g, const NodeData& d, int i, int j, const Multiplier& Y) {
  const std::size_t k = g.index(i, j);
  const auto is = static_cast<std::size_t>(i);
  const double m = g.m;
  const cplx im(0.0, m);
  const cplx Tu = d.v + im * g.omega_perp[k] * d.u;
  const cplx Yu = Y.Yt * d.v + im * Y.Yphi * d.u + Y.Yr * d.ur;
  const double ninv = g.n_inv_sq[k];
  const double u2 = std::norm(d.u);
  const double lag = -ninv * std::norm(Tu) + d.dr2 + g.vq[is] * d.dth2 + g.h_phiphi[k] * m * m * u2 + g.V[is] * u2;
  return ninv * std::real(std::conj(Tu) * Yu) + 0.5 * Y.Yt * lag;
}

// Integral of a per-node quantity with the energy quadrature; rows summed in order.
template <class NodeFn>
double integrate_nodes(const ModeGrid& g, NodeFn&& fn) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double total = parallel_row_sum(static_cast<std::size_t>(g.nr), [&](std::size_t is) {
    const int i = static_cast<int>(is);
    const double wr = (i == 0 || i == g.nr - 1) ? 0.5 * g.drs : g.drs;
    double row = 0.0;
    for (int j = 0; j < g.nth; ++j) row += fn(i, j) * g.sin_th[static_cast<std::size_t>(j)];
    return row * wr;
  });
  return total * g.dth * two_pi;
}

template <class YFn>
double multiplier_energy(const ModeField& f, YFn&& Y) {
  f.validate();
  const ModeGrid& g = *f.grid;
  return integrate_nodes(g, [&](int i, int j) { return canonical_density(g, node_data(g, f, i, j), i, j, Y(i, j)); });
}

}  // namespace

std::vector<double> energy_density_T(const ModeField& field, const std::function<double(double, double)>& omega_x) {
  field.validate();
  const ModeGrid& g = *field.grid;
  std::vector<double> out(g.size());
  parallel_for(static_cast<std::size_t>(g.nr), [&](std::size_t is) {
    const int i = static_cast<int>(is);
    for (int j = 0; j < g.nth; ++j) {
      const Multiplier Y{1.0, 0.0, omega_x(g.r[is], g.theta[static_cast<std::size_t>(j)])};
      out[g.index(i, j)] = canonical_density(g, node_data(g, field, i, j), i, j, Y);
    }
  });
  return out;
}

double integrate_density(const ModeGrid& grid, const std::vector<double>& density) {
  require(density.size() == grid.size(), "density shape does not match grid");
  return integrate_nodes(grid, [&](int i, int j) { return density[grid.index(i, j)]; });
}

double energy_Tperp(const ModeField& field) {
  const ModeGrid& g = *field.grid;
  return multiplier_energy(field, [&](int i, int j) { return Multiplier{1.0, 0.0, g.omega_perp[g.index(i, j)]}; });
}

double energy_Tchi(const ModeField& field) {
  const ModeGrid& g = *field.grid;
  const double wh = omega_h(g.params);
  return multiplier_energy(field, [&](int i, int) { return Multiplier{1.0, 0.0, g.chi[static_cast<std::size_t>(i)] * wh}; });
}

double energy_dt(const ModeField& field) {
  return multiplier_energy(field, [](int, int) { return Multiplier{1.0, 0.0, 0.0}; });
}

KEnergy energy_K(const ModeField& field, double t) {
  field.validate();
  require(t >= 0.0, "K energy needs t >= 0");
  const ModeGrid& g = *field.grid;
  const double wh = omega_h(g.params);
  KEnergy out;
  out.vector_part = multiplier_energy(field, [&](int i, int j) {
    const auto is = static_cast<std::size_t>(i);
    const double rs = g.rs[is];
    const double w = t * t + rs * rs + 1.0;
    return Multiplier{w, 2.0 * t * rs * g.n_sq[g.index(i, j)], w * g.chi[is] * wh};
  });
  const cplx im(0.0, g.m);
  out.q_part = integrate_nodes(g, [&](int i, int j) {
    const std::size_t k = g.index(i, j);
    const double excess = g.n_sq[k] - 1.0;
    if (excess == 0.0) return 0.0;
    const cplx Tu = field.v[k] + im * g.omega_perp[k] * field.u[k];
    const double qk = t * excess;
    return g.n_inv_sq[k] * (qk * std::real(std::conj(Tu) * field.u[k]) - 0.5 * excess * std::norm(field.u[k]));
  });
  return out;
}

double higher_energy(const SymmetryFamily& family, BaseEnergy base, int n, double t) {
  require(n >= 1 && n <= 3, "higher energy order must be 1, 2 or 3");
  require(family.max_order() >= n - 1, "symmetry family incomplete for the requested order");
  double total = 0.0;
  for (const auto& mem : family.members) {
    if (mem.order > n - 1) continue;
    switch (base) {
      case BaseEnergy::Tperp: total += energy_Tperp(mem.field); break;
      case BaseEnergy::Tchi: total += energy_Tchi(mem.field); break;
      case BaseEnergy::K: total += energy_K(mem.field, t).total(); break;
    }
  }
  return total;
}

// -------------------------------------------------------- Morawetz weights

namespace {

enum Factor : std::size_t { kR = 0, kRho2 = 1, kDelta = 2, kT = 3, kS = 4 };

}  // namespace

MorawetzWeightFunctions::MorawetzWeightFunctions(const KerrParams& p, double epsilon)
    : params_(p), eps_(epsilon) {
  p.validate();
  require(epsilon >= 0.0 && epsilon < 1.0, "Morawetz epsilon must lie in [0, 1)");
  const mpq_class M = exact(p.mass), a = exact(p.spin), a2 = a * a, eps = exact(epsilon);
  const Polynomial r = Polynomial::identity();
  const Polynomial rho2({a2, 0, 1});
  const Polynomial delta({a2, -2 * M, 1});
  const Polynomial T({-a2, 0, 3});
  const Polynomial S = rho2 * rho2 - eps * delta;

  auto basis = std::make_shared<FactorBasis>();
  basis->factors = {r, rho2, delta, T, S};
  basis->names = {"r", "r^2+a^2", "Delta", "3r^2-a^2", "(r^2+a^2)^2-eps*Delta"};
  const FactoredRational::Basis B = basis;
  auto pw = [&](std::size_t idx, int twice) { return FactoredRational::factor_power(B, idx, twice); };

  fa_ = std::make_unique<FactoredRational>(pw(kDelta, 2) * pw(kS, 2) * pw(kRho2, -8));
  fb_ = std::make_unique<FactoredRational>(mpq_class(1, 2) * (pw(kRho2, 8) * pw(kT, -2) * pw(kR, -2)));
  const FactoredRational fa_over_delta = pw(kS, 2) * pw(kRho2, -8);
  const FactoredRational sqrt_fa_over_delta = fa_over_delta.sqrt();
  const FactoredRational sqrt_fa = pw(kDelta, 1) * pw(kS, 1) * pw(kRho2, -4);
  const FactoredRational delta32 = pw(kDelta, 3);
  const FactoredRational delta1 = pw(kDelta, 2);

  const std::array<Polynomial, 4> Ra = {mpq_class(-1) * (rho2 * rho2), (-4 * a * M) * r, delta - Polynomial::constant(a2),
                                        delta};
  for (const auto& ra : Ra) {
    const FactoredRational Rt = fa_over_delta * FactoredRational::polynomial(B, ra);
    const FactoredRational Rtp = Rt.derivative();
    const FactoredRational Rtpp = (*fb_ * sqrt_fa_over_delta * Rtp).derivative();
    Rt_.push_back(Rt);
    Rtp_.push_back(Rtp);
    Rtpp_.push_back(Rtpp);
    A_.push_back(mpq_class(-1) * (sqrt_fa * delta32 * Rtpp));
    const FactoredRational inner = (*fb_ * Rtp).derivative();
    const FactoredRational mid = (*fa_ * inner).derivative();
    V_.push_back(mpq_class(1, 4) * (delta1 * mid).derivative());
  }

  fcl_ = std::make_unique<FactoredRational>(fa_->derivative());
  Acl_ = std::make_unique<FactoredRational>(
      mpq_class(-1, 2) * (sqrt_fa * delta32 * (*fb_ * sqrt_fa_over_delta * *fcl_).derivative()));
  Vcl_ = std::make_unique<FactoredRational>(
      mpq_class(1, 4) * (delta1 * (*fa_ * (*fb_ * *fcl_).derivative()).derivative()).derivative());
}

MorawetzWeights MorawetzWeightFunctions::at(double r) const {
  require(r > params_.r_plus(), "Morawetz weights need r > r_plus");
  MorawetzWeights w;
  w.r = r;
  w.epsilon = eps_;
  w.f_a = fa_->evaluate(r);
  w.f_b = fb_->evaluate(r);
  for (std::size_t k = 0; k < 4; ++k) {
    w.R_tilde[k] = Rt_[k].evaluate(r);
    w.R_tilde_p[k] = Rtp_[k].evaluate(r);
    w.R_tilde_pp[k] = Rtpp_[k].evaluate(r);
    w.A[k] = A_[k].evaluate(r);
    w.V[k] = V_[k].evaluate(r);
  }
  w.f_classical = fcl_->evaluate(r);
  w.A_classical = Acl_->evaluate(r);
  w.V_classical = Vcl_->evaluate(r);
  return w;
}

MorawetzWeights morawetz_weights(const KerrParams& p, double epsilon, double r) {
  return MorawetzWeightFunctions(p, epsilon).at(r);
}

// -------------------------------------------------------- Morawetz bulk

RadialBand morawetz_band(const KerrParams& p, double margin) {
  require(margin >= 0.0, "band margin must be nonnegative");
  const auto band = photon_orbit_band(p);
  return {band.r_min - margin * p.mass, band.r_max + margin * p.mass};
}

namespace {

double bulk_density(const ModeGrid& g, const ModeField& f, int i, int j, const RadialBand& band) {
  const auto is = static_cast<std::size_t>(i);
  const NodeData d = node_data(g, f, i, j);
  const double r = g.r[is], rho2 = g.rho2[is], delta = g.delta[is];
  const double rho = std::sqrt(rho2);
  const cplx psi = d.u / rho;
  const cplx psi_rs = d.ur / rho - d.u * (r * delta / (rho2 * rho2 * rho));
  const double r2 = r * r;
  double dens = (rho2 * rho2 / (r2 * r2)) * std::norm(psi_rs) + std::norm(psi) / r2;
  if (!band.contains(r)) {
    const double s = g.sin_th[static_cast<std::size_t>(j)];
    const double m2 = static_cast<double>(g.m) * g.m;
    const double ang = (d.dth2 + m2 * std::norm(d.u) / (s * s)) / rho2;
    dens += (std::norm(d.v) / rho2 + ang) / r;
  }
  // dr = (Delta / (r^2+a^2)) dr*
  return dens * delta / rho2;
}

template <class Weight>
double weighted_bulk(const SymmetryFamily& family, const RadialBand& band, Weight&& weight) {
  double total = 0.0;
  for (const auto& mem : family.members) {
    if (mem.order > 2) continue;
    const ModeField& f = mem.field;
    f.validate();
    const ModeGrid& g = *f.grid;
    total += integrate_nodes(g, [&](int i, int j) {
      const double w = weight(g.rs[static_cast<std::size_t>(i)]);
      return w == 0.0 ? 0.0 : w * bulk_density(g, f, i, j, band);
    });
  }
  return total;
}

}  // namespace

double morawetz_bulk(const SymmetryFamily& family, const RadialBand& band) {
  return weighted_bulk(family, band, [](double) { return 1.0; });
}

double chi_lightcone(double x) {
  // 1 for |x| <= 1/2, 0 for |x| >= 3/4
  return 1.0 - smooth_step((std::abs(x) - 0.5) / 0.25);
}

double lightcone_weighted_bulk(const SymmetryFamily& family, const RadialBand& band, int p, double t) {
  require(p >= 0 && p <= 2, "light-cone weight power must be 0, 1 or 2");
  require(t > 0.0, "light-cone weighted bulk needs t > 0");
  const double tp = std::pow(t, p);
  return weighted_bulk(family, band, [&](double rs) { return tp * chi_lightcone(rs / t); });
}

}  // namespace kerrlab
