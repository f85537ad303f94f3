#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <numbers>
#include <sstream>

#include "kerrlab/decay_fit.hpp"
#include "kerrlab/error.hpp"
#include "kerrlab/hardy_verifier.hpp"
#include "kerrlab/null_geodesics.hpp"
#include "kerrlab/parallel.hpp"
#include "kerrlab/run_config.hpp"
#include "kerrlab/symmetry_ops.hpp"
#include "kerrlab/wave_evolver.hpp"

using namespace kerrlab;
using nlohmann::json;

namespace {

// Writes to --output when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ValidationError("cannot write " + path);
    }
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string fmt(double v) { return format_double(v); }

std::vector<DecayFit> fit_all(const TimeSeries& series, const KerrParams& p, const FitOptions& opts) {
  std::vector<DecayFit> fits;
  for (std::size_t k = 0; k < series.observers.size(); ++k) {
    const auto& s = series.observers[k];
    const Region region = resolve_region(s.observer, p.mass);
    try {
      fits.push_back(fit_decay(s, region, p.spin, opts, static_cast<int>(k)));
    } catch (const ValidationError& e) {
      DecayFit f;
      f.observer_id = static_cast<int>(k);
      f.region = region;
      f.plateau_p = std::nan("");
      f.warnings.push_back(e.what());
      fits.push_back(f);
    }
  }
  return fits;
}

void write_snapshot(const std::string& path, const ModeField& f, double t) {
  std::ofstream out(path, std::ios::binary);
  const ModeGrid& g = *f.grid;
  out << "# t = " << fmt(t) << "\n";
  out << "r_star,theta,re_u,im_u,re_v,im_v\n";
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nth; ++j) {
      const std::size_t k = g.index(i, j);
      out << fmt(g.rs[static_cast<std::size_t>(i)]) << ',' << fmt(g.theta[static_cast<std::size_t>(j)]) << ','
          << fmt(f.u[k].real()) << ',' << fmt(f.u[k].imag()) << ',' << fmt(f.v[k].real()) << ','
          << fmt(f.v[k].imag()) << '\n';
    }
}

int run_evolve(const std::string& config_path, const std::string& out_override) {
  RunConfig cfg = load_config(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  const GridPtr grid = make_grid(cfg.evolution);
  const ModeField init = make_initial_data(cfg, grid);
  try {
    const EvolutionResult res = evolve(cfg.evolution, init);
    write_observers_csv((dir / "observers.csv").string(), res.series);
    write_energies_csv((dir / "energies.csv").string(), res.ledger);
    if (cfg.evolution.diagnostics.lightcone_p >= 0) write_lightcone_csv((dir / "lightcone.csv").string(), res.ledger);
    write_fits_json((dir / "fits.json").string(), fit_all(res.series, cfg.evolution.params, cfg.fit));
  } catch (const EvolutionAborted& e) {
    write_snapshot((dir / "snapshot.csv").string(), e.last_good(), e.t_last_good());
    throw;
  }
  return 0;
}

int run_photon_orbits(const KerrParams& p, int samples, double resolution, Sink& sink) {
  p.validate();
  const PhotonBand band = photon_orbit_band(p, resolution);
  auto& out = sink.out();
  out << "band_r_min,band_r_max\n" << fmt(band.r_min) << ',' << fmt(band.r_max) << '\n';
  out << "r,lz_over_e,q_over_e2,d2R\n";
  for (const auto& o : sample_band_orbits(p, samples)) {
    out << fmt(o.r_orbit) << ',' << fmt(o.lz_over_e) << ',' << fmt(o.q_over_e2) << ',' << fmt(o.d2R) << '\n';
  }
  return 0;
}

int run_hardy(const KerrParams& p, int count, unsigned long long seed, double epsilon, int nodes, Sink& sink) {
  p.validate();
  require(nodes >= 2, "need at least two solution nodes");
  std::vector<double> xs;
  for (int k = 0; k < nodes; ++k) xs.push_back(p.mass * 1e-3 * std::pow(1e5, static_cast<double>(k) / (nodes - 1)));
  const HardySolution sol = positive_solution(p.mass, xs);
  const auto tests = random_hardy_test_functions(p, count, seed);
  const WeightedHardyReport rep = verify_weighted_hardy(p, tests, epsilon);
  const HypergeometricParams& h = sol.hyper;
  json doc;
  doc["params"] = {{"alpha", h.alpha}, {"beta", h.beta}, {"a", h.a_h}, {"b", h.b_h}, {"c", h.c_h}};
  doc["ordering_ok"] = h.schwarzschild_ordering();
  doc["max_residual"] = sol.max_residual;
  doc["positivity_ok"] = sol.positive;
  doc["empirical_epsilon"] = rep.max_epsilon;
  doc["epsilon"] = epsilon;
  doc["inequality_holds"] = rep.holds;
  doc["tested"] = rep.tested;
  doc["spin"] = p.spin;
  if (p.spin == 0.0) doc["normal_form_ok"] = normal_form(p).same_function(schwarzschild_normal_form_reference(p.mass));
  sink.out() << doc.dump(2) << '\n';
  return 0;
}

int run_commutator(const KerrParams& p, const std::string& function, const std::string& pairing, double h0,
                   int levels, double r, double theta, Sink& sink) {
  p.validate();
  require(pairing == "mixed" || pairing == "matched", "pairing must be 'mixed' or 'matched'");
  const StencilPairing sp = pairing == "mixed" ? StencilPairing::Mixed : StencilPairing::Matched;
  const SpacetimePoint x{0.0L, static_cast<long double>(r), static_cast<long double>(theta), 0.3L};
  auto& out = sink.out();
  out << "function,h,residual,observed_order\n";
  bool found = false;
  for (const auto& nf : standard_test_functions()) {
    if (function != "all" && function != nf.name) continue;
    found = true;
    const CommutatorStudy st = commutator_convergence(p, nf.f, x, h0, levels, sp);
    for (const auto& row : st.rows) {
      out << nf.name << ',' << fmt(row.h) << ',' << fmt(row.residual) << ',' << fmt(row.observed_order) << '\n';
    }
  }
  require(found, "unknown test function '" + function + "'");
  return 0;
}

int run_tortoise(const KerrParams& p, const std::vector<double>& radii, double r_min, double r_max, int n,
                 Sink& sink) {
  p.validate();
  const RadialMap map(p);
  auto& out = sink.out();
  if (radii.size() == 1 && n == 0) {
    out << fmt(map.tortoise(radii.front())) << '\n';
    return 0;
  }
  std::vector<double> rs = radii;
  if (n > 0) {
    require(r_max > r_min && n >= 2, "range needs r_max > r_min and n >= 2");
    for (int k = 0; k < n; ++k) rs.push_back(r_min + (r_max - r_min) * k / (n - 1));
  }
  out << "r,r_star,r_roundtrip\n";
  for (double r : rs) {
    const double s = map.tortoise(r);
    out << fmt(r) << ',' << fmt(s) << ',' << fmt(map.inverse(s)) << '\n';
  }
  return 0;
}

std::vector<double> split_doubles(const std::string& line) {
  std::vector<double> v;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      v.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw ValidationError("malformed number '" + cell + "'");
    }
  }
  return v;
}

int run_fit_decay(const KerrParams& p, const std::string& observers, const std::string& energies,
                  const FitOptions& opts, Sink& sink) {
  p.validate();
  std::ifstream in(observers);
  if (!in) throw ValidationError("cannot read " + observers);
  std::string line;
  std::getline(in, line);
  require(line == "t,r_obs,theta_obs,re_u,im_u,abs_u,abs_psi", "unexpected observers.csv header");
  std::map<std::pair<double, double>, std::size_t> index;
  TimeSeries series;
  const RadialMap map(p);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto v = split_doubles(line);
    require(v.size() == 7, "observers.csv rows need 7 columns");
    const auto key = std::make_pair(v[1], v[2]);
    auto it = index.find(key);
    if (it == index.end()) {
      ObserverSeries s;
      s.observer.r = v[1];
      s.observer.theta = v[2];
      s.r_star = map.tortoise(v[1]);
      it = index.emplace(key, series.observers.size()).first;
      series.observers.push_back(s);
    }
    auto& s = series.observers[it->second];
    s.t.push_back(v[0]);
    s.re_u.push_back(v[3]);
    s.im_u.push_back(v[4]);
    s.abs_u.push_back(v[5]);
    s.abs_psi.push_back(v[6]);
  }
  json doc;
  json fits = json::array();
  for (const auto& f : fit_all(series, p, opts)) {
    fits.push_back({{"observer", f.observer_id},
                    {"r_obs", series.observers[static_cast<std::size_t>(f.observer_id)].observer.r},
                    {"region", region_name(f.region)},
                    {"plateau_p", std::isfinite(f.plateau_p) ? json(f.plateau_p) : json(nullptr)},
                    {"window", {f.plateau_window.t1, f.plateau_window.t2}},
                    {"theorem_consistent", f.theorem_consistent},
                    {"warnings", f.warnings}});
  }
  doc["fits"] = fits;
  if (!energies.empty()) {
    std::ifstream ein(energies);
    if (!ein) throw ValidationError("cannot read " + energies);
    std::getline(ein, line);
    EnergyLedger L;
    while (std::getline(ein, line)) {
      if (line.empty()) continue;
      const auto v = split_doubles(line);
      require(v.size() == 9, "energies.csv rows need 9 columns");
      L.t.push_back(v[0]);
      L.E_Tperp.push_back(v[1]);
      L.E_Tchi.push_back(v[2]);
      L.E3_Tchi.push_back(v[3]);
      L.E_K.push_back(v[4]);
      L.E_qK.push_back(v[5]);
      L.E3_K.push_back(v[6]);
      L.mor_bulk.push_back(v[7]);
      L.mor_cum.push_back(v[8]);
    }
    doc["kappa_E3_Tchi"] = growth_exponent(L, LedgerSeries::E3_Tchi, opts.t_min);
    doc["kappa_E3_K"] = growth_exponent(L, LedgerSeries::E3_K, opts.t_min);
  }
  sink.out() << doc.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kerrlab: scalar waves on Kerr, symmetry operators, energies and decay fits"};
  app.require_subcommand(0, 1);
  int threads = 1;
  bool schema = false;
  app.add_option("--threads", threads, "worker threads (wall time only)")->check(CLI::Range(1, 1024));
  app.add_flag("--schema", schema, "print the run configuration JSON schema");

  double mass = 1.0, spin = 0.0;
  std::string output;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--mass", mass, "black hole mass M");
    sub->add_option("--spin", spin, "spin a (|a| < M)");
    sub->add_option("--output", output, "write to this file instead of stdout");
  };

  std::string config_path, out_dir;
  auto* evolve_cmd = app.add_subcommand("evolve", "evolve one mode from a JSON configuration");
  evolve_cmd->add_option("--config", config_path, "run configuration")->required();
  evolve_cmd->add_option("--output-dir", out_dir, "override output_dir");

  int samples = 9;
  double resolution = 1e-3;
  auto* photon_cmd = app.add_subcommand("photon-orbits", "photon band and sampled spherical orbits");
  add_common(photon_cmd);
  photon_cmd->add_option("--samples", samples, "orbits across the band");
  photon_cmd->add_option("--resolution", resolution, "scan spacing before bisection");

  int count = 200, nodes = 101;
  unsigned long long seed = 12345;
  double epsilon = 0.01;
  auto* hardy_cmd = app.add_subcommand("hardy-verify", "hypergeometric solution and weighted Hardy check");
  add_common(hardy_cmd);
  hardy_cmd->add_option("--count", count, "random test functions");
  hardy_cmd->add_option("--seed", seed, "random seed");
  hardy_cmd->add_option("--epsilon", epsilon, "required coercivity constant");
  hardy_cmd->add_option("--nodes", nodes, "log-spaced solution nodes on [1e-3, 100] M");

  std::string function = "all", pairing = "mixed";
  double h0 = 0.1, r_pt = 4.0, theta_pt = 1.1;
  int levels = 5;
  auto* comm_cmd = app.add_subcommand("commutator-check", "finite-difference residual of [Q, box]");
  add_common(comm_cmd);
  comm_cmd->add_option("--function", function, "test function name or 'all'");
  comm_cmd->add_option("--pairing", pairing, "mixed or matched stencils");
  comm_cmd->add_option("--h0", h0, "largest step");
  comm_cmd->add_option("--levels", levels, "number of halvings");
  comm_cmd->add_option("--r", r_pt, "evaluation radius");
  comm_cmd->add_option("--theta", theta_pt, "evaluation polar angle");

  std::vector<double> radii;
  double r_min = 0.0, r_max = 0.0;
  int n_r = 0;
  auto* tort_cmd = app.add_subcommand("tortoise-table", "tortoise coordinate r*(r)");
  add_common(tort_cmd);
  tort_cmd->add_option("--r", radii, "radii");
  tort_cmd->add_option("--r-min", r_min, "range start");
  tort_cmd->add_option("--r-max", r_max, "range end");
  tort_cmd->add_option("--n", n_r, "range samples");

  std::string obs_path, energies_path;
  FitOptions fit_opts;
  auto* fit_cmd = app.add_subcommand("fit-decay", "decay exponents from observers.csv");
  add_common(fit_cmd);
  fit_cmd->add_option("--observers", obs_path, "observers.csv")->required();
  fit_cmd->add_option("--energies", energies_path, "energies.csv for growth exponents");
  fit_cmd->add_option("--t-min", fit_opts.t_min, "first window start");
  fit_cmd->add_option("--window-ratio", fit_opts.window_ratio, "t2 / t1");
  fit_cmd->add_option("--late-start", fit_opts.late_start, "windows checked against the bound");
  fit_cmd->add_option("--slack", fit_opts.slack, "allowed shortfall below the bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    set_thread_count(threads);
    if (schema) {
      std::cout << config_schema();
      return 0;
    }
    const KerrParams p{mass, spin};
    if (*evolve_cmd) return run_evolve(config_path, out_dir);
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 1;
    }
    Sink sink(output);
    if (*photon_cmd) return run_photon_orbits(p, samples, resolution, sink);
    if (*hardy_cmd) return run_hardy(p, count, seed, epsilon, nodes, sink);
    if (*comm_cmd) return run_commutator(p, function, pairing, h0, levels, r_pt, theta_pt, sink);
    if (*tort_cmd) {
      require(!radii.empty() || n_r > 0, "give --r or a --r-min/--r-max/--n range");
      return run_tortoise(p, radii, r_min, r_max, n_r, sink);
    }
    if (*fit_cmd) return run_fit_decay(p, obs_path, energies_path, fit_opts, sink);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
