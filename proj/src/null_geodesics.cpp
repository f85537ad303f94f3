#include "kerrlab/null_geodesics.hpp"

#include <cmath>
#include <limits>

#include "kerrlab/error.hpp"

namespace kerrlab {

RadialPotential radial_potential(const KerrParams& p, const ConservedSet& c, double r) {
  p.validate();
  const double M = p.mass, a = p.spin, a2 = a * a;
  const double delta = r * r - 2.0 * M * r + a2;
  const double ddelta = 2.0 * (r - M);
  const double rho2 = r * r + a2;
  const double E2 = c.E * c.E, EL = c.E * c.Lz, L2 = c.Lz * c.Lz;
  RadialPotential out{};
  out.R = -rho2 * rho2 * E2 - 4.0 * a * M * r * EL + (delta - a2) * L2 + delta * c.Q;
  out.dR_dr = -4.0 * r * rho2 * E2 - 4.0 * a * M * EL + ddelta * L2 + ddelta * c.Q;
  out.d2R_dr2 = -(4.0 * rho2 + 8.0 * r * r) * E2 + 2.0 * L2 + 2.0 * c.Q;
  return out;
}

namespace {

struct Branch {
  double L;
  double Q;
  double margin;
};

// theta-potential Q - a^2 sin^2 - L^2 cot^2 maximized over the sphere
double theta_margin(double a, double L, double Q) {
  const double aa = std::abs(a), al = std::abs(L);
  if (al >= aa) return Q - a * a;
  return Q - a * a + (aa - al) * (aa - al);
}

// Physical branch of R = R' = 0 at E = 1 (a != 0).
std::optional<Branch> best_branch(const KerrParams& p, double r) {
  const double M = p.mass, a = p.spin, a2 = a * a;
  const double delta = r * r - 2.0 * M * r + a2;
  const double ddelta = 2.0 * (r - M);
  const double rho2 = r * r + a2;
  const double A2 = a2 * ddelta;
  const double A1 = 4.0 * a * M * (r * r - a2);
  const double A0 = rho2 * (ddelta * rho2 - 4.0 * r * delta);
  const double disc = A1 * A1 - 4.0 * A2 * A0;
  if (disc < 0.0 || A2 == 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (A1 + std::copysign(sq, A1));
  double roots[2];
  int n = 0;
  if (q != 0.0) {
    roots[n++] = q / A2;
    roots[n++] = A0 / q;
  } else {
    roots[n++] = 0.0;
  }
  std::optional<Branch> best;
  for (int k = 0; k < n; ++k) {
    const double L = roots[k];
    const double Q = (rho2 * rho2 + 4.0 * a * M * r * L - (delta - a2) * L * L) / delta;
    const double m = theta_margin(a, L, Q);
    if (!best || m > best->margin) best = Branch{L, Q, m};
  }
  return best;
}

}  // namespace

double photon_orbit_margin(const KerrParams& p, double r) {
  p.validate();
  require(r > p.r_plus(), "photon orbit radius must exceed r_plus");
  if (p.spin == 0.0) return -std::abs(r - 3.0 * p.mass);
  const auto b = best_branch(p, r);
  return b ? b->margin : -std::numeric_limits<double>::max();
}

std::optional<PhotonOrbit> spherical_photon_orbit(const KerrParams& p, double r, double slack) {
  p.validate();
  require(r > p.r_plus(), "photon orbit radius must exceed r_plus");
  const double M = p.mass;
  if (p.spin == 0.0) {
    if (std::abs(r - 3.0 * M) > slack * M) return std::nullopt;
    const double L = std::sqrt(27.0) * M;
    const auto R = radial_potential(p, {1.0, L, 0.0}, 3.0 * M);
    return PhotonOrbit{3.0 * M, L, 0.0, R.d2R_dr2};
  }
  const auto b = best_branch(p, r);
  if (!b || b->margin < -slack * M * M) return std::nullopt;
  const auto R = radial_potential(p, {1.0, b->L, b->Q}, r);
  return PhotonOrbit{r, b->L, b->Q, R.d2R_dr2};
}

PhotonBand equatorial_photon_radii(const KerrParams& p) {
  p.validate();
  const double M = p.mass, s = std::abs(p.spin) / M;
  const double pro = 2.0 * M * (1.0 + std::cos(2.0 / 3.0 * std::acos(-s)));
  const double retro = 2.0 * M * (1.0 + std::cos(2.0 / 3.0 * std::acos(s)));
  return {pro, retro};
}

PhotonBand photon_orbit_band(const KerrParams& p, double resolution) {
  p.validate();
  require(resolution > 0.0, "scan resolution must be positive");
  const double M = p.mass;
  if (p.spin == 0.0) return {3.0 * M, 3.0 * M};
  const double step = resolution * M;
  const double inner = p.r_plus() * (1.0 + 1e-9);
  auto margin = [&](double r) { return photon_orbit_margin(p, r); };

  // r = 3M lies inside the band for every spin; march outwards to a sign change.
  const double centre = 3.0 * M;
  double lo_in = centre, lo_out = centre;
  for (;;) {
    lo_out = std::max(lo_in - step, inner);
    if (margin(lo_out) < 0.0 || lo_out == inner) break;
    lo_in = lo_out;
  }
  double hi_in = centre, hi_out = centre;
  for (;;) {
    hi_out = hi_in + step;
    if (margin(hi_out) < 0.0) break;
    hi_in = hi_out;
    if (hi_in > 10.0 * M) throw NumericalError("photon band scan failed to terminate");
  }
  auto bisect = [&](double in, double out) {
    for (int it = 0; it < 200 && std::abs(in - out) > 1e-13 * M; ++it) {
      const double mid = 0.5 * (in + out);
      if (margin(mid) >= 0.0) in = mid;
      else out = mid;
    }
    return in;
  };
  return {bisect(lo_in, lo_out), bisect(hi_in, hi_out)};
}

Stability instability_certificate(const PhotonOrbit& orbit, double tol) {
  if (orbit.d2R < -tol) return Stability::Unstable;
  if (orbit.d2R > tol) return Stability::Stable;
  return Stability::Indeterminate;
}

std::vector<PhotonOrbit> sample_band_orbits(const KerrParams& p, int n) {
  require(n >= 1, "need at least one sample");
  const auto band = photon_orbit_band(p);
  std::vector<PhotonOrbit> out;
  if (band.r_max <= band.r_min || n == 1) {
    if (auto o = spherical_photon_orbit(p, band.r_min)) out.push_back(*o);
    return out;
  }
  for (int k = 0; k < n; ++k) {
    const double r = band.r_min + (band.r_max - band.r_min) * k / (n - 1);
    if (auto o = spherical_photon_orbit(p, r)) out.push_back(*o);
  }
  return out;
}

}  // namespace kerrlab
