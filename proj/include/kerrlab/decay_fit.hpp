#pragma once

#include <string>
#include <vector>

#include "kerrlab/energy_morawetz.hpp"
#include "kerrlab/wave_evolver.hpp"

/// Decay-exponent fitting of observer time series and growth exponents of
/// energy ledgers.
namespace kerrlab {

struct FitWindow {
  double t1 = 0.0;
  double t2 = 0.0;
  double p = 0.0;  ///< -d ln|psi| / d ln(abscissa) over the window
};

struct FitOptions {
  double window_ratio = 1.5;  ///< t2 = ratio * t1
  double window_step = 1.1;   ///< successive t1 grow by this factor
  double t_min = 50.0;
  double floor = 1e-13;  ///< relative to the peak of |psi|
  double late_start = 100.0;
  double slack = -1.0;  ///< allowed shortfall below the bound; < 0 picks 0 at a = 0 and 0.5 otherwise

  bool operator==(const FitOptions&) const = default;
  void validate() const;
};

struct DecayFit {
  int observer_id = 0;
  Region region = Region::Stationary;  ///< resolved, never Auto
  std::vector<FitWindow> windows;
  double plateau_p = 0.0;
  FitWindow plateau_window;
  double lower_bound = 1.0;  ///< decay rate guaranteed for this region
  double slack = 0.0;
  bool theorem_consistent = false;
  bool truncated = false;
  std::vector<std::string> warnings;
};

/// Observers inside r = 3M fit in u_plus, all others in t, unless set explicitly.
Region resolve_region(const Observer& obs, double mass);

const char* region_name(Region region);
Region parse_region(const std::string& name);

/// Sliding-window least-squares slope of ln|psi| against ln t (stationary),
/// ln(t + r*) (near) or ln(t - r*) (far).
DecayFit fit_decay(const ObserverSeries& series, Region region, double spin, const FitOptions& options = {},
                   int observer_id = 0);

enum class LedgerSeries { E_Tperp, E_Tchi, E3_Tchi, E_K, E3_K, mor_cum };

const std::vector<double>& ledger_series(const EnergyLedger& ledger, LedgerSeries which);

/// Least-squares exponent of ln E against ln(1+t) over t >= t_min.
double growth_exponent(const EnergyLedger& ledger, LedgerSeries which, double t_min = 50.0,
                       double t_max = 1e300);

/// Least-squares slope of ys against xs.
double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace kerrlab
