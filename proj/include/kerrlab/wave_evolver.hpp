#pragma once

#include <string>
#include <vector>

#include "kerrlab/energy_morawetz.hpp"
#include "kerrlab/error.hpp"
#include "kerrlab/symmetry_ops.hpp"

/// Method-of-lines RK4 evolution of one azimuthal mode of the transformed
/// wave equation on the (r*, theta) grid.
namespace kerrlab {

enum class BoundaryMode {
  Frozen,          ///< end rows held fixed; domain sized so they never matter
  Characteristic,  ///< (d_t -+ d_r*) u = 0 at the ends
};

enum class Region { Auto, Stationary, Near, Far };

struct Observer {
  double r = 10.0;
  double theta = 1.5707963267948966;
  Region region = Region::Auto;

  bool operator==(const Observer&) const = default;
};

struct DiagnosticsSpec {
  bool energies = true;
  bool morawetz = true;
  int lightcone_p = -1;  ///< -1 disables the light-cone weighted bulk
  double epsilon = 0.05;
  double band_margin = 0.5;

  bool operator==(const DiagnosticsSpec&) const = default;
};

struct EvolutionConfig {
  KerrParams params;
  int m = 0;
  GridSpec grid;
  double cfl = 0.4;
  double t_end = 0.0;
  double sample_dt = 1.0;  ///< energy diagnostics cadence
  std::vector<Observer> observers;
  DiagnosticsSpec diagnostics;
  BoundaryMode boundary = BoundaryMode::Frozen;
  double blend_start = 10.0;
  double blend_width = 1.0;

  /// Enforces cfl in (0,1), positive cadence, and causal isolation of observers.
  void validate() const;

  bool operator==(const EvolutionConfig&) const = default;
};

struct RhsResult {
  CArray du_dt;
  CArray dv_dt;
};

/// du/dt = v, dv/dt = N^2 [u_r*r* - i m gyro v + V_Q Lambda u - m^2 (Delta-a^2)/(r^2+a^2)^2 u - V u].
RhsResult rhs(const ModeField& field, BoundaryMode mode = BoundaryMode::Frozen);

/// cfl * min(dr*, min over nodes of (r^2+a^2) dtheta / sqrt(Delta N^2)).
double max_stable_dt(const ModeGrid& grid, double cfl);

/// One classical RK4 step.
ModeField step_rk4(const ModeField& field, double dt, BoundaryMode mode = BoundaryMode::Frozen);

/// RK4 stepper with reusable stage storage.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(GridPtr grid, BoundaryMode mode = BoundaryMode::Frozen);
  void step(ModeField& field, double dt);

 private:
  GridPtr grid_;
  BoundaryMode mode_;
  CArray au_, av_, ta_u_, ta_v_, tb_u_, tb_v_;  // accumulator and two stage buffers
};

/// u = A exp(-(r*-c)^2/(2 w^2)) P_l^|m|(cos theta) / max|P_l^|m||, v = 0,
/// or v = d_r* u when ingoing is set.
ModeField gaussian_initial_data(GridPtr grid, double center, double width, double amplitude, int l,
                                bool ingoing = false);
ModeField gaussian_initial_data(const EvolutionConfig& config, double center, double width, double amplitude,
                                int l, bool ingoing = false);

GridPtr make_grid(const EvolutionConfig& config);

struct ObserverSeries {
  Observer observer;
  double r_star = 0.0;
  std::vector<double> t, re_u, im_u, abs_u, abs_psi;
};

struct TimeSeries {
  std::vector<ObserverSeries> observers;
};

struct EvolutionResult {
  TimeSeries series;
  EnergyLedger ledger;
  ModeField final_field;
  double dt = 0.0;
  long steps = 0;
};

/// Thrown when the solution stops being finite; carries the last checked state.
class EvolutionAborted : public NumericalError {
 public:
  EvolutionAborted(const std::string& what, ModeField last_good, double t_last_good)
      : NumericalError(what), last_good_(std::move(last_good)), t_(t_last_good) {}
  const ModeField& last_good() const { return last_good_; }
  double t_last_good() const { return t_; }

 private:
  ModeField last_good_;
  double t_;
};

/// Bilinear interpolation of u at (r*, theta).
cplx sample_field(const ModeField& field, double r_star, double theta);

/// Marches to t_end, sampling observers every step and energies every sample_dt.
EvolutionResult evolve(const EvolutionConfig& config, const ModeField& init);

}  // namespace kerrlab
