#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kerrlab/kerr_geometry.hpp"

/// Discrete symmetry operators on one azimuthal mode: the angular part of the
/// Carter operator, Q itself, the coefficients of R over second-order
/// generators, a pointwise [Q, box] check and the symmetry family used by the
/// higher-order energies.
namespace kerrlab {

using cplx = std::complex<double>;
using CArray = std::vector<cplx>;

struct GridSpec {
  double r_star_min = -100.0;
  double r_star_max = 100.0;
  int n_r = 2001;
  int n_theta = 16;

  bool operator==(const GridSpec&) const = default;
};

/// (r*, theta) grid for one mode with cached background data. Index k = i*n_theta + j.
struct ModeGrid {
  KerrParams params;
  int m = 0;
  int nr = 0;
  int nth = 0;
  double rs_min = 0.0;
  double drs = 0.0;
  double dth = 0.0;
  double blend_start = 10.0;
  double blend_width = 1.0;

  // per r* node
  std::vector<double> rs, r, x, delta, rho2, vq, V, gyro, phi_pot, chi;
  // per theta cell, and per theta face (n_theta + 1 faces; the polar faces have sin = 0)
  std::vector<double> theta, sin_th, cot2, sin_face;
  // stencil weights of the angular operator: neighbour coefficients per cell
  std::vector<double> ang_plus, ang_minus;
  // per node
  std::vector<double> n_inv_sq, n_sq, omega_perp, h_phiphi;

  std::size_t size() const { return static_cast<std::size_t>(nr) * static_cast<std::size_t>(nth); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(nth) + static_cast<std::size_t>(j);
  }
};

using GridPtr = std::shared_ptr<const ModeGrid>;

GridPtr make_mode_grid(const KerrParams& params, int m, const GridSpec& spec,
                       double blend_start = 10.0, double blend_width = 1.0);

/// Transformed field u = sqrt(r^2+a^2) psi and v = d_t u on a ModeGrid.
struct ModeField {
  GridPtr grid;
  CArray u;
  CArray v;

  static ModeField zeros(GridPtr g);
  void validate() const;
};

/// Lambda_{theta,m} u = (1/sin) d_theta(sin d_theta u) - m^2 cot^2 u, flux form on
/// the cell-centred grid. Self-adjoint for the weights sin(theta_j).
CArray angular_operator(const ModeField& field, int m);
CArray angular_operator(const ModeGrid& grid, int m, const CArray& u);

/// Q u = Lambda u + a^2 sin^2 theta * dtt, with dtt = d_t^2 u supplied.
CArray carter_apply(const ModeField& field, const CArray& dtt);

struct CurlyRCoefficients {
  double c_tt;
  double c_tphi;
  double c_phiphi;
  double c_Q;
};

/// Coefficients of R = c_tt d_t^2 + c_tphi d_t d_phi + c_phiphi d_phi^2 + c_Q Q.
CurlyRCoefficients curlyR_coefficients(const KerrParams& p, double r);

/// Smooth scalar test function f(t, r, theta, phi).
using TestFunction = std::function<long double(long double, long double, long double, long double)>;

struct SpacetimePoint {
  long double t, r, theta, phi;
};

enum class StencilPairing {
  /// Q in flux form, Sigma*box in expanded form: the discrete operators differ
  /// at O(h^2) and the residual converges at second order.
  Mixed,
  /// Both use the same theta stencil; the residual is at rounding level.
  Matched,
};

/// [Q, Sigma*box] f at a point by nested centred differences with step h.
long double commutator_residual(const KerrParams& p, const TestFunction& f, const SpacetimePoint& x,
                                long double h, StencilPairing pairing = StencilPairing::Mixed);

struct CommutatorRow {
  double h;
  double residual;
  double observed_order;  ///< log2(res(2h)/res(h)); NaN on the first row
};

struct CommutatorStudy {
  std::vector<CommutatorRow> rows;
  bool cancellation_suspected = false;  ///< residual failed to decrease as h shrank
};

/// Residual at h0, h0/2, ... (levels entries).
CommutatorStudy commutator_convergence(const KerrParams& p, const TestFunction& f, const SpacetimePoint& x,
                                       double h0, int levels, StencilPairing pairing = StencilPairing::Mixed);

/// Five smooth test functions used by the commutator checks.
struct NamedTestFunction {
  std::string name;
  TestFunction f;
};
std::vector<NamedTestFunction> standard_test_functions();

/// Field S u for S in S_0, S_1, S_2, packaged as data (u, d_t u).
struct FamilyMember {
  int order;
  std::string label;
  ModeField field;
};

struct SymmetryFamily {
  std::vector<FamilyMember> members;

  /// Members of order 1 and 2: {d_t, d_phi, d_t^2, d_t d_phi, d_phi^2, Q}.
  std::vector<const ModeField*> generated() const;
  int max_order() const;
};

/// Applies S_0 u S_1 u S_2 to the data, using the mode equation for time derivatives.
SymmetryFamily build_symmetry_family(const ModeField& field);

/// Coefficient combinations L = d_t^2 + d_phi^2 + Q and L_eps = eps d_t^2 + d_phi^2 + Q
/// applied to the data (requires a family of order 2).
ModeField apply_L(const SymmetryFamily& family, double eps = 1.0);

}  // namespace kerrlab
