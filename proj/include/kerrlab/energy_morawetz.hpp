#pragma once

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "kerrlab/rational_calculus.hpp"
#include "kerrlab/symmetry_ops.hpp"

/// Energies of the transformed mode equation (T_perp, T_chi, K with its
/// q-correction, higher-order sums over the symmetry family), the Morawetz
/// radial weights, and integrated Morawetz bulk diagnostics.
namespace kerrlab {

/// Time series of energy diagnostics, one entry per sample time.
struct EnergyLedger {
  std::vector<double> t;
  std::vector<double> E_Tperp;
  std::vector<double> E_Tchi;
  std::vector<double> E3_Tchi;
  std::vector<double> E_K;   ///< vector-field part; may carry indefinite cross terms
  std::vector<double> E_qK;  ///< q_K correction
  std::vector<double> E3_K;  ///< vector + q parts summed over the family
  std::vector<double> mor_bulk;
  std::vector<double> mor_cum;
  std::vector<double> lc_bulk;  ///< light-cone weighted bulk (empty unless enabled)
  std::vector<double> lc_cum;

  std::size_t size() const { return t.size(); }
};

/// Pointwise energy density for X = d_t + omega_X(r, theta) d_phi, per grid node.
std::vector<double> energy_density_T(const ModeField& field, const std::function<double(double, double)>& omega_x);

/// Trapezoid in r*, midpoint in theta with weight sin(theta), 2 pi in phi.
double integrate_density(const ModeGrid& grid, const std::vector<double>& density);

double energy_Tperp(const ModeField& field);
double energy_Tchi(const ModeField& field);
/// Energy of the Killing field d_t; exactly conserved by the semi-discrete scheme.
double energy_dt(const ModeField& field);

struct KEnergy {
  double vector_part = 0.0;
  double q_part = 0.0;
  double total() const { return vector_part + q_part; }
};

/// K = (t^2 + r*^2 + 1) T_chi + 2 t r* N^2 d_r*, with q_K = t (N^2 - 1).
KEnergy energy_K(const ModeField& field, double t);

enum class BaseEnergy { Tperp, Tchi, K };

/// Sum of the base energy over members of order < n (n in {1, 2, 3}).
double higher_energy(const SymmetryFamily& family, BaseEnergy base, int n, double t = 0.0);

/// Weights of the Morawetz construction at one radius. Vector-valued entries
/// are indexed like curlyR_coefficients: (tt, tphi, phiphi, Q).
struct MorawetzWeights {
  double r = 0.0;
  double epsilon = 0.0;
  double f_a = 0.0;
  double f_b = 0.0;
  std::array<double, 4> R_tilde{};
  std::array<double, 4> R_tilde_p{};
  std::array<double, 4> R_tilde_pp{};
  std::array<double, 4> A{};
  std::array<double, 4> V{};
  // first-order multiplier used for the axisymmetric part
  double f_classical = 0.0;
  double A_classical = 0.0;
  double V_classical = 0.0;
};

/// Exact symbolic Morawetz weights for fixed (M, a, eps); evaluate at many radii.
class MorawetzWeightFunctions {
 public:
  MorawetzWeightFunctions(const KerrParams& p, double epsilon);

  MorawetzWeights at(double r) const;

  const FactoredRational& f_a() const { return *fa_; }
  const FactoredRational& f_b() const { return *fb_; }
  const FactoredRational& R_tilde(int k) const { return Rt_.at(static_cast<std::size_t>(k)); }
  const FactoredRational& R_tilde_p(int k) const { return Rtp_.at(static_cast<std::size_t>(k)); }
  const FactoredRational& R_tilde_pp(int k) const { return Rtpp_.at(static_cast<std::size_t>(k)); }
  const FactoredRational& A(int k) const { return A_.at(static_cast<std::size_t>(k)); }
  const FactoredRational& V(int k) const { return V_.at(static_cast<std::size_t>(k)); }
  const FactoredRational& f_classical() const { return *fcl_; }
  const FactoredRational& A_classical() const { return *Acl_; }
  const FactoredRational& V_classical() const { return *Vcl_; }

 private:
  KerrParams params_;
  double eps_;
  std::unique_ptr<FactoredRational> fa_, fb_, fcl_, Acl_, Vcl_;
  std::vector<FactoredRational> Rt_, Rtp_, Rtpp_, A_, V_;
};

MorawetzWeights morawetz_weights(const KerrParams& p, double epsilon, double r);

struct RadialBand {
  double r_min;
  double r_max;
  bool contains(double r) const { return r >= r_min && r <= r_max; }
};

/// Photon band widened by `margin` (units of M) on each side.
RadialBand morawetz_band(const KerrParams& p, double margin = 0.5);

/// Spatial integral of the integrated-Morawetz integrand over the family, in psi variables.
double morawetz_bulk(const SymmetryFamily& family, const RadialBand& band);

/// Smooth cutoff: 1 on |x| < 1/2, 0 on |x| > 3/4.
double chi_lightcone(double x);

/// morawetz_bulk integrand weighted by t^p chi_LC(r*/t).
double lightcone_weighted_bulk(const SymmetryFamily& family, const RadialBand& band, int p, double t);

}  // namespace kerrlab
