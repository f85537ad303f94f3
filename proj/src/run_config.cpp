#include "kerrlab/run_config.hpp"

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "kerrlab/error.hpp"

namespace kerrlab {

using nlohmann::json;

namespace {

const std::string kSchema = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "kerrlab run configuration",
  "type": "object",
  "additionalProperties": false,
  "required": ["params", "grid", "time"],
  "properties": {
    "params": {
      "type": "object", "additionalProperties": false, "required": ["mass", "spin"],
      "properties": {"mass": {"type": "number", "exclusiveMinimum": 0}, "spin": {"type": "number"}}
    },
    "mode": {"type": "integer", "default": 0},
    "initial_data": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "type": {"enum": ["gaussian"]},
        "center": {"type": "number"},
        "width": {"type": "number", "exclusiveMinimum": 0},
        "amplitude": {"type": "number"},
        "l": {"type": "integer", "minimum": 0},
        "ingoing": {"type": "boolean"}
      }
    },
    "grid": {
      "type": "object", "additionalProperties": false,
      "required": ["r_star_min", "r_star_max", "n_r", "n_theta"],
      "properties": {
        "r_star_min": {"type": "number"}, "r_star_max": {"type": "number"},
        "n_r": {"type": "integer", "minimum": 3}, "n_theta": {"type": "integer", "minimum": 8}
      }
    },
    "time": {
      "type": "object", "additionalProperties": false, "required": ["t_end"],
      "properties": {
        "cfl": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "t_end": {"type": "number", "minimum": 0},
        "sample_dt": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "observers": {
      "type": "array",
      "items": {
        "type": "object", "additionalProperties": false, "required": ["r"],
        "properties": {
          "r": {"type": "number"}, "theta": {"type": "number"},
          "region": {"enum": ["auto", "stationary", "near", "far"]}
        }
      }
    },
    "diagnostics": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "energies": {"type": "boolean"}, "morawetz": {"type": "boolean"},
        "lightcone_p": {"type": "integer", "minimum": -1, "maximum": 2},
        "epsilon": {"type": "number", "minimum": 0, "exclusiveMaximum": 1},
        "band_margin": {"type": "number", "minimum": 0}
      }
    },
    "boundary": {"enum": ["frozen", "characteristic"]},
    "blend": {
      "type": "object", "additionalProperties": false,
      "properties": {"start": {"type": "number"}, "width": {"type": "number"}}
    },
    "fit": {
      "type": "object", "additionalProperties": false,
      "properties": {
        "window_ratio": {"type": "number"}, "window_step": {"type": "number"},
        "t_min": {"type": "number"}, "floor": {"type": "number"},
        "late_start": {"type": "number"}, "slack": {"type": "number"}
      }
    },
    "output_dir": {"type": "string"}
  }
}
)";

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                const std::set<std::string>& required = {}) {
  if (!obj.is_object()) throw ValidationError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) throw ValidationError("missing key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const std::string& key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& where, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(where + "." + key + " must be an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& where, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ValidationError(where + "." + key + " must be a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& where,
                       const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  return out;
}

}  // namespace

void RunConfig::validate() const {
  evolution.validate();
  fit.validate();
  require(initial.type == "gaussian", "initial_data.type must be 'gaussian'");
  require(initial.width > 0.0 && std::isfinite(initial.width), "initial_data.width must be positive");
  require(std::isfinite(initial.center) && std::isfinite(initial.amplitude), "initial data must be finite");
  require(initial.l >= std::abs(evolution.m), "initial_data.l must be >= |mode|");
  require(initial.center > evolution.grid.r_star_min && initial.center < evolution.grid.r_star_max,
          "initial_data.center must lie inside the grid");
}

const std::string& config_schema() { return kSchema; }

RunConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(doc, "config",
             {"params", "mode", "initial_data", "grid", "time", "observers", "diagnostics", "boundary", "blend", "fit",
              "output_dir"},
             {"params", "grid", "time"});
  RunConfig c;
  EvolutionConfig& e = c.evolution;

  const json& p = doc.at("params");
  check_keys(p, "params", {"mass", "spin"}, {"mass", "spin"});
  e.params.mass = get_number(p, "mass", "params", 1.0);
  e.params.spin = get_number(p, "spin", "params", 0.0);
  e.m = get_int(doc, "mode", "config", 0);

  if (doc.contains("initial_data")) {
    const json& d = doc.at("initial_data");
    check_keys(d, "initial_data", {"type", "center", "width", "amplitude", "l", "ingoing"});
    c.initial.type = get_string(d, "type", "initial_data", c.initial.type);
    c.initial.center = get_number(d, "center", "initial_data", c.initial.center);
    c.initial.width = get_number(d, "width", "initial_data", c.initial.width);
    c.initial.amplitude = get_number(d, "amplitude", "initial_data", c.initial.amplitude);
    c.initial.l = get_int(d, "l", "initial_data", c.initial.l);
    c.initial.ingoing = get_bool(d, "ingoing", "initial_data", c.initial.ingoing);
  }

  const json& g = doc.at("grid");
  check_keys(g, "grid", {"r_star_min", "r_star_max", "n_r", "n_theta"}, {"r_star_min", "r_star_max", "n_r", "n_theta"});
  e.grid.r_star_min = get_number(g, "r_star_min", "grid", 0.0);
  e.grid.r_star_max = get_number(g, "r_star_max", "grid", 0.0);
  e.grid.n_r = get_int(g, "n_r", "grid", 0);
  e.grid.n_theta = get_int(g, "n_theta", "grid", 0);

  const json& t = doc.at("time");
  check_keys(t, "time", {"cfl", "t_end", "sample_dt"}, {"t_end"});
  e.cfl = get_number(t, "cfl", "time", e.cfl);
  e.t_end = get_number(t, "t_end", "time", 0.0);
  e.sample_dt = get_number(t, "sample_dt", "time", e.sample_dt);

  if (doc.contains("observers")) {
    const json& obs = doc.at("observers");
    if (!obs.is_array()) throw ValidationError("observers must be an array");
    for (const auto& o : obs) {
      check_keys(o, "observers[]", {"r", "theta", "region"}, {"r"});
      Observer ob;
      ob.r = get_number(o, "r", "observers[]", ob.r);
      ob.theta = get_number(o, "theta", "observers[]", ob.theta);
      ob.region = parse_region(get_string(o, "region", "observers[]", "auto"));
      e.observers.push_back(ob);
    }
  }

  if (doc.contains("diagnostics")) {
    const json& d = doc.at("diagnostics");
    check_keys(d, "diagnostics", {"energies", "morawetz", "lightcone_p", "epsilon", "band_margin"});
    auto& s = e.diagnostics;
    s.energies = get_bool(d, "energies", "diagnostics", s.energies);
    s.morawetz = get_bool(d, "morawetz", "diagnostics", s.morawetz);
    s.lightcone_p = get_int(d, "lightcone_p", "diagnostics", s.lightcone_p);
    s.epsilon = get_number(d, "epsilon", "diagnostics", s.epsilon);
    s.band_margin = get_number(d, "band_margin", "diagnostics", s.band_margin);
  }

  const std::string boundary = get_string(doc, "boundary", "config", "frozen");
  if (boundary == "frozen")
    e.boundary = BoundaryMode::Frozen;
  else if (boundary == "characteristic")
    e.boundary = BoundaryMode::Characteristic;
  else
    throw ValidationError("boundary must be 'frozen' or 'characteristic'");

  if (doc.contains("blend")) {
    const json& b = doc.at("blend");
    check_keys(b, "blend", {"start", "width"});
    e.blend_start = get_number(b, "start", "blend", e.blend_start);
    e.blend_width = get_number(b, "width", "blend", e.blend_width);
  }

  if (doc.contains("fit")) {
    const json& f = doc.at("fit");
    check_keys(f, "fit", {"window_ratio", "window_step", "t_min", "floor", "late_start", "slack"});
    c.fit.window_ratio = get_number(f, "window_ratio", "fit", c.fit.window_ratio);
    c.fit.window_step = get_number(f, "window_step", "fit", c.fit.window_step);
    c.fit.t_min = get_number(f, "t_min", "fit", c.fit.t_min);
    c.fit.floor = get_number(f, "floor", "fit", c.fit.floor);
    c.fit.late_start = get_number(f, "late_start", "fit", c.fit.late_start);
    c.fit.slack = get_number(f, "slack", "fit", c.fit.slack);
  }

  c.output_dir = get_string(doc, "output_dir", "config", c.output_dir);
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig& c) {
  const EvolutionConfig& e = c.evolution;
  json doc;
  doc["params"] = {{"mass", e.params.mass}, {"spin", e.params.spin}};
  doc["mode"] = e.m;
  doc["initial_data"] = {{"type", c.initial.type},     {"center", c.initial.center}, {"width", c.initial.width},
                         {"amplitude", c.initial.amplitude}, {"l", c.initial.l},           {"ingoing", c.initial.ingoing}};
  doc["grid"] = {{"r_star_min", e.grid.r_star_min},
                 {"r_star_max", e.grid.r_star_max},
                 {"n_r", e.grid.n_r},
                 {"n_theta", e.grid.n_theta}};
  doc["time"] = {{"cfl", e.cfl}, {"t_end", e.t_end}, {"sample_dt", e.sample_dt}};
  json obs = json::array();
  for (const auto& o : e.observers) obs.push_back({{"r", o.r}, {"theta", o.theta}, {"region", region_name(o.region)}});
  doc["observers"] = obs;
  const auto& s = e.diagnostics;
  doc["diagnostics"] = {{"energies", s.energies},
                        {"morawetz", s.morawetz},
                        {"lightcone_p", s.lightcone_p},
                        {"epsilon", s.epsilon},
                        {"band_margin", s.band_margin}};
  doc["boundary"] = e.boundary == BoundaryMode::Frozen ? "frozen" : "characteristic";
  doc["blend"] = {{"start", e.blend_start}, {"width", e.blend_width}};
  doc["fit"] = {{"window_ratio", c.fit.window_ratio}, {"window_step", c.fit.window_step},
                {"t_min", c.fit.t_min},               {"floor", c.fit.floor},
                {"late_start", c.fit.late_start},     {"slack", c.fit.slack}};
  doc["output_dir"] = c.output_dir;
  return doc.dump(2) + "\n";
}

void save_config(const RunConfig& config, const std::string& path) {
  auto out = open_out(path);
  out << dump_config(config);
}

ModeField make_initial_data(const RunConfig& config, GridPtr grid) {
  return gaussian_initial_data(std::move(grid), config.initial.center, config.initial.width, config.initial.amplitude,
                               config.initial.l, config.initial.ingoing);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_observers_csv(const std::string& path, const TimeSeries& series) {
  auto out = open_out(path);
  out << "t,r_obs,theta_obs,re_u,im_u,abs_u,abs_psi\n";
  if (series.observers.empty()) return;
  // rows ordered by sample time, then observer
  const std::size_t n = series.observers.front().t.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& s : series.observers) {
      out << format_double(s.t[k]) << ',' << format_double(s.observer.r) << ',' << format_double(s.observer.theta)
          << ',' << format_double(s.re_u[k]) << ',' << format_double(s.im_u[k]) << ',' << format_double(s.abs_u[k])
          << ',' << format_double(s.abs_psi[k]) << '\n';
    }
  }
}

void write_energies_csv(const std::string& path, const EnergyLedger& l) {
  auto out = open_out(path);
  out << "t,E_Tperp,E_Tchi,E3_Tchi,E_K,E_qK,E3_K,mor_bulk,mor_cum\n";
  auto at = [](const std::vector<double>& v, std::size_t k) { return k < v.size() ? v[k] : 0.0; };
  for (std::size_t k = 0; k < l.size(); ++k) {
    out << format_double(l.t[k]) << ',' << format_double(at(l.E_Tperp, k)) << ',' << format_double(at(l.E_Tchi, k))
        << ',' << format_double(at(l.E3_Tchi, k)) << ',' << format_double(at(l.E_K, k)) << ','
        << format_double(at(l.E_qK, k)) << ',' << format_double(at(l.E3_K, k)) << ','
        << format_double(at(l.mor_bulk, k)) << ',' << format_double(at(l.mor_cum, k)) << '\n';
  }
}

void write_lightcone_csv(const std::string& path, const EnergyLedger& l) {
  auto out = open_out(path);
  out << "t,lc_bulk,lc_cum\n";
  for (std::size_t k = 0; k < l.lc_bulk.size() && k < l.size(); ++k) {
    out << format_double(l.t[k]) << ',' << format_double(l.lc_bulk[k]) << ',' << format_double(l.lc_cum[k]) << '\n';
  }
}

void write_fits_json(const std::string& path, const std::vector<DecayFit>& fits) {
  json arr = json::array();
  for (const auto& f : fits) {
    json windows = json::array();
    for (const auto& w : f.windows) windows.push_back({{"t1", w.t1}, {"t2", w.t2}, {"p", w.p}});
    json item;
    item["observer"] = f.observer_id;
    item["region"] = region_name(f.region);
    item["plateau_p"] = std::isfinite(f.plateau_p) ? json(f.plateau_p) : json(nullptr);
    item["window"] = {f.plateau_window.t1, f.plateau_window.t2};
    item["theorem_consistent"] = f.theorem_consistent;
    item["lower_bound"] = f.lower_bound;
    item["slack"] = f.slack;
    item["truncated"] = f.truncated;
    item["warnings"] = f.warnings;
    item["p_series"] = windows;
    arr.push_back(item);
  }
  auto out = open_out(path);
  out << arr.dump(2) << '\n';
}

}  // namespace kerrlab
