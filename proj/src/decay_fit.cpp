#include "kerrlab/decay_fit.hpp"

#include <algorithm>
#include <cmath>

#include "kerrlab/error.hpp"

namespace kerrlab {

void FitOptions::validate() const {
  require(window_ratio > 1.0 && std::isfinite(window_ratio), "fit window_ratio must exceed 1");
  require(window_step > 1.0 && std::isfinite(window_step), "fit window_step must exceed 1");
  require(t_min > 0.0 && std::isfinite(t_min), "fit t_min must be positive");
  require(floor > 0.0 && floor < 1.0, "fit floor must lie in (0, 1)");
  require(late_start >= 0.0 && std::isfinite(late_start), "fit late_start must be nonnegative");
  require(std::isfinite(slack), "fit slack must be finite");
}

Region resolve_region(const Observer& obs, double mass) {
  if (obs.region != Region::Auto) return obs.region;
  return obs.r < 3.0 * mass ? Region::Near : Region::Stationary;
}

const char* region_name(Region region) {
  switch (region) {
    case Region::Auto: return "auto";
    case Region::Stationary: return "stationary";
    case Region::Near: return "near";
    case Region::Far: return "far";
  }
  return "auto";
}

Region parse_region(const std::string& name) {
  if (name == "auto") return Region::Auto;
  if (name == "stationary") return Region::Stationary;
  if (name == "near") return Region::Near;
  if (name == "far") return Region::Far;
  throw ValidationError("unknown region '" + name + "'");
}

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, "slope needs at least two points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  require(sxx > 0.0, "slope needs distinct abscissae");
  return sxy / sxx;
}

DecayFit fit_decay(const ObserverSeries& series, Region region, double spin, const FitOptions& options,
                   int observer_id) {
  options.validate();
  const auto& t = series.t;
  const auto& y = series.abs_psi;
  require(t.size() == y.size() && t.size() >= 2, "observer series is empty");
  require(region != Region::Auto, "fit region must be resolved");
  require(t.back() >= options.t_min * options.window_ratio, "observer series does not cover the first fit window");

  DecayFit fit;
  fit.observer_id = observer_id;
  fit.region = region;
  fit.lower_bound = region == Region::Far ? 0.5 : 1.0;
  fit.slack = options.slack >= 0.0 ? options.slack : (spin == 0.0 ? 0.0 : 0.5);

  const double rs = series.r_star;
  auto abscissa = [&](double tt) {
    switch (region) {
      case Region::Near: return tt + rs;
      case Region::Far: return tt - rs;
      default: return tt;
    }
  };

  const double peak = *std::max_element(y.begin(), y.end());
  const double cut = 10.0 * options.floor * peak;

  for (double t1 = options.t_min;; t1 *= options.window_step) {
    const double t2 = t1 * options.window_ratio;
    if (t2 > t.back() * (1.0 + 1e-12)) break;
    std::vector<double> xs, ys;
    bool floor_hit = false;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] < t1 || t[k] > t2) continue;
      const double s = abscissa(t[k]);
      if (!(s > 0.0)) continue;
      if (!(y[k] > cut)) {
        floor_hit = true;
        break;
      }
      xs.push_back(std::log(s));
      ys.push_back(std::log(y[k]));
    }
    if (floor_hit) {
      fit.truncated = true;
      fit.warnings.push_back("window [" + std::to_string(t1) + ", " + std::to_string(t2) +
                             "] reaches the noise floor; fit truncated");
      break;
    }
    if (xs.size() < 3) continue;
    const double p = -least_squares_slope(xs, ys);
    require(std::isfinite(p), "fitted slope is not finite");
    fit.windows.push_back({t1, t2, p});
  }

  if (fit.windows.empty()) {
    fit.warnings.push_back("no usable fit window");
    fit.plateau_p = std::nan("");
    fit.theorem_consistent = false;
    return fit;
  }
  fit.plateau_window = fit.windows.back();
  fit.plateau_p = fit.plateau_window.p;
  fit.theorem_consistent = true;
  for (const auto& w : fit.windows) {
    if (w.t1 >= options.late_start && w.p < fit.lower_bound - fit.slack) fit.theorem_consistent = false;
  }
  return fit;
}

const std::vector<double>& ledger_series(const EnergyLedger& ledger, LedgerSeries which) {
  switch (which) {
    case LedgerSeries::E_Tperp: return ledger.E_Tperp;
    case LedgerSeries::E_Tchi: return ledger.E_Tchi;
    case LedgerSeries::E3_Tchi: return ledger.E3_Tchi;
    case LedgerSeries::E_K: return ledger.E_K;
    case LedgerSeries::E3_K: return ledger.E3_K;
    case LedgerSeries::mor_cum: return ledger.mor_cum;
  }
  return ledger.E_Tperp;
}

double growth_exponent(const EnergyLedger& ledger, LedgerSeries which, double t_min, double t_max) {
  const auto& e = ledger_series(ledger, which);
  require(e.size() == ledger.t.size(), "ledger series length mismatch");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < e.size(); ++k) {
    if (ledger.t[k] < t_min - 1e-9 || ledger.t[k] > t_max + 1e-9) continue;
    require(e[k] > 0.0, "growth exponent needs positive energies");
    xs.push_back(std::log1p(ledger.t[k]));
    ys.push_back(std::log(e[k]));
  }
  require(xs.size() >= 2, "ledger does not cover the fit interval");
  return least_squares_slope(xs, ys);
}

}  // namespace kerrlab
