#pragma once

#include <optional>
#include <vector>

#include "kerrlab/kerr_geometry.hpp"

/// Radial potential of null geodesics and spherical photon orbits.
///
/// Conventions: Q here is the standard Carter constant plus a^2 E^2, which is
/// nonnegative for null geodesics, and motion requires R(r) <= 0 with
///   R = -(r^2+a^2)^2 E^2 - 4aMr E Lz + (Delta - a^2) Lz^2 + Delta Q.
namespace kerrlab {

struct ConservedSet {
  double E = 0.0;
  double Lz = 0.0;
  double Q = 0.0;
};

struct RadialPotential {
  double R;
  double dR_dr;
  double d2R_dr2;
};

RadialPotential radial_potential(const KerrParams& p, const ConservedSet& c, double r);

struct PhotonOrbit {
  double r_orbit = 0.0;
  double lz_over_e = 0.0;
  double q_over_e2 = 0.0;
  double d2R = 0.0;
};

/// Slack allowed on the theta-motion condition when deciding that an orbit
/// exists (absorbs rounding at the band edges).
inline constexpr double kOrbitAdmissibilitySlack = 1e-9;

/// Spherical photon orbit at radius r with E = 1, if one exists. At a = 0 only
/// r = 3M qualifies; the returned representative is the equatorial one
/// (|Lz| = sqrt(27) M, Q = 0). For a != 0 the solution is unique when it exists.
std::optional<PhotonOrbit> spherical_photon_orbit(const KerrParams& p, double r,
                                                  double slack = kOrbitAdmissibilitySlack);

/// Largest value of the theta-potential over the sphere for the orbit branch at
/// r; nonnegative exactly on the photon band. Continuous in r.
double photon_orbit_margin(const KerrParams& p, double r);

struct PhotonBand {
  double r_min;
  double r_max;
};

/// Band of radii carrying spherical photon orbits: coarse scan with `resolution`
/// spacing followed by bisection of photon_orbit_margin to ~1e-13 M.
PhotonBand photon_orbit_band(const KerrParams& p, double resolution = 1e-3);

/// Prograde and retrograde equatorial circular photon radii
/// 2M(1 + cos(2/3 arccos(-+|a|/M))).
PhotonBand equatorial_photon_radii(const KerrParams& p);

enum class Stability { Unstable, Stable, Indeterminate };

/// Unstable iff d2R < -tol; |d2R| <= tol is Indeterminate.
Stability instability_certificate(const PhotonOrbit& orbit, double tol = 1e-10);

/// Orbits sampled uniformly across the band (n >= 1; one orbit at a = 0).
std::vector<PhotonOrbit> sample_band_orbits(const KerrParams& p, int n);

}  // namespace kerrlab
