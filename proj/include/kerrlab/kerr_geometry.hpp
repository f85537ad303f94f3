#pragma once

#include <vector>

/// Kerr exterior background: scalars of the Boyer-Lindquist metric, horizon
/// data, the tortoise coordinate and the radial potentials of the transformed
/// wave equation. Geometric units; M is the only scale.
namespace kerrlab {

struct KerrParams {
  double mass = 1.0;
  double spin = 0.0;

  /// Throws ValidationError unless M > 0 and |a| < M (both finite).
  void validate() const;
  double r_plus() const;
  double r_minus() const;

  bool operator==(const KerrParams&) const = default;
};

struct HorizonRadii {
  double r_minus;
  double r_plus;
};

HorizonRadii horizon_radii(const KerrParams& p);

struct MetricScalars {
  double delta;
  double sigma;
  double pi;
};

/// Delta, Sigma, Pi at (r, theta). Requires r > r_plus.
MetricScalars metric_scalars(const KerrParams& p, double r, double theta);

/// Horizon angular velocity a / (r_plus^2 + a^2).
double omega_h(const KerrParams& p);

/// 2aMr/Pi: the d_phi coefficient of the normal field T_perp.
double omega_perp(const KerrParams& p, double r, double theta);

struct Blend {
  double chi;
  double dchi_dr;
};

/// Smooth monotone cutoff: 1 for r <= start*M, 0 for r >= (start+width)*M.
Blend blend_chi(double r, double mass = 1.0, double start = 10.0, double width = 1.0);

/// C-infinity step: 0 for s <= 0, 1 for s >= 1, built from exp(-1/s).
double smooth_step(double s);
double smooth_step_derivative(double s);

struct Potentials {
  double V;         ///< radial potential of the transformed equation
  double V_Q;       ///< Delta / (r^2+a^2)^2, multiplies the angular operator
  double N_inv_sq;  ///< 1 - a^2 sin^2(theta) V_Q
  double h;         ///< sqrt(1 - 2 a^2 V_Q)
};

/// Requires r > r_plus.
Potentials potentials(const KerrParams& p, double r, double theta);

/// Same, from the horizon offset x = r - r_plus. Accurate when x << M.
Potentials potentials_from_offset(const KerrParams& p, double x, double theta);

/// Inverse-metric coefficient h^{phi phi} of the transformed system, i.e. the
/// coefficient of m^2 |u|^2 in the energy density. Takes the horizon offset.
double h_phiphi_from_offset(const KerrParams& p, double x, double theta);

struct RadialSample {
  double r;
  double r_star;
};

/// Tortoise map dr/dr* = Delta/(r^2+a^2), normalized by r*(3M) = 0. Evaluated
/// in long double from the closed-form antiderivative.
class RadialMap {
 public:
  explicit RadialMap(const KerrParams& p);

  const KerrParams& params() const { return params_; }

  double tortoise(double r) const;
  /// r* as a function of the offset x = r - r_plus > 0.
  long double tortoise_offset(long double x) const;

  double inverse(double r_star) const;
  /// Offset x = r - r_plus for a given r*; keeps precision where r* << 0.
  long double inverse_offset(long double r_star) const;

  /// Samples at the given r* nodes; nodes must be increasing.
  std::vector<RadialSample> table(const std::vector<double>& r_star_nodes) const;

 private:
  KerrParams params_;
  long double rp_;
  long double rm_;
  long double c_plus_;
  long double c_minus_;
  long double offset_;
};

double tortoise(const RadialMap& map, double r);
double inverse_tortoise(const RadialMap& map, double r_star);

}  // namespace kerrlab
