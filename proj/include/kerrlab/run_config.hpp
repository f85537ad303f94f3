#pragma once

#include <string>
#include <vector>

#include "kerrlab/decay_fit.hpp"
#include "kerrlab/wave_evolver.hpp"

/// JSON run configuration and the output files of an evolution run.
namespace kerrlab {

struct InitialDataSpec {
  std::string type = "gaussian";
  double center = 30.0;
  double width = 3.0;
  double amplitude = 1.0;
  int l = 0;
  bool ingoing = false;

  bool operator==(const InitialDataSpec&) const = default;
};

struct RunConfig {
  EvolutionConfig evolution;
  InitialDataSpec initial;
  FitOptions fit;
  std::string output_dir = ".";

  bool operator==(const RunConfig&) const = default;
  /// Cross-field checks of the evolution plus the initial data and fit options.
  void validate() const;
};

/// The JSON schema of the configuration document.
const std::string& config_schema();

/// Parses and validates; unknown keys and wrong types are validation errors.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& config);
void save_config(const RunConfig& config, const std::string& path);

ModeField make_initial_data(const RunConfig& config, GridPtr grid);

/// %.17g formatting.
std::string format_double(double v);

void write_observers_csv(const std::string& path, const TimeSeries& series);
void write_energies_csv(const std::string& path, const EnergyLedger& ledger);
void write_lightcone_csv(const std::string& path, const EnergyLedger& ledger);
void write_fits_json(const std::string& path, const std::vector<DecayFit>& fits);

}  // namespace kerrlab
