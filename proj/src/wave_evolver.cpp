#include "kerrlab/wave_evolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <type_traits>

#include "kerrlab/parallel.hpp"

namespace kerrlab {

void EvolutionConfig::validate() const {
  params.validate();
  require(grid.n_r >= 3 && grid.n_theta >= 8, "grid needs n_r >= 3 and n_theta >= 8");
  require(std::isfinite(grid.r_star_min) && std::isfinite(grid.r_star_max) && grid.r_star_max > grid.r_star_min,
          "grid r* range must be finite and increasing");
  require(cfl > 0.0 && cfl < 1.0, "cfl must lie in (0, 1)");
  require(std::isfinite(t_end) && t_end >= 0.0, "t_end must be finite and nonnegative");
  require(std::isfinite(sample_dt) && sample_dt > 0.0, "sample_dt must be positive");
  require(blend_width > 0.0 && blend_start > 0.0, "blend location must be positive");
  require(diagnostics.lightcone_p >= -1 && diagnostics.lightcone_p <= 2, "lightcone_p must be -1 (off), 0, 1 or 2");
  require(diagnostics.epsilon >= 0.0 && diagnostics.epsilon < 1.0, "Morawetz epsilon must lie in [0, 1)");
  require(diagnostics.band_margin >= 0.0, "band margin must be nonnegative");
  if (observers.empty()) return;
  const RadialMap map(params);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& o : observers) {
    require(o.r > params.r_plus(), "observer radius must exceed r_plus");
    require(o.theta > 0.0 && o.theta < std::numbers::pi, "observer theta must lie in (0, pi)");
    const double rs = map.tortoise(o.r);
    lo = std::min(lo, rs);
    hi = std::max(hi, rs);
  }
  const double margin = 10.0 * params.mass;
  require(grid.r_star_min <= lo - t_end - margin,
          "r*_min violates causal isolation: need r*_min <= min(observer r*) - t_end - 10M");
  require(grid.r_star_max >= hi + t_end + margin,
          "r*_max violates causal isolation: need r*_max >= max(observer r*) + t_end + 10M");
}

GridPtr make_grid(const EvolutionConfig& config) {
  return make_mode_grid(config.params, config.m, config.grid, config.blend_start, config.blend_width);
}

namespace {

// Right-hand side on one row i, handed to sink(j, du, dv) point by point.
template <class Sink>
inline void rhs_row(const ModeGrid& g, std::size_t is, const cplx* u, const cplx* v, BoundaryMode mode,
                    Sink&& sink) {
  const int nth = g.nth, nr = g.nr;
  const auto i = static_cast<int>(is);
  const std::size_t base = is * static_cast<std::size_t>(nth);
  const cplx* ur = u + base;
  const cplx* vr = v + base;
  if (i == 0 || i == nr - 1) {
    const double inv_dr = 1.0 / g.drs;
    for (int j = 0; j < nth; ++j) {
      if (mode == BoundaryMode::Frozen) {
        sink(j, cplx{}, cplx{});
      } else if (i == 0) {
        sink(j, vr[j], (vr[j + nth] - vr[j]) * inv_dr);
      } else {
        sink(j, vr[j], -(vr[j] - vr[j - nth]) * inv_dr);
      }
    }
    return;
  }
  const double m = g.m, m2 = m * m;
  const double inv_dr2 = 1.0 / (g.drs * g.drs);
  const double vq = g.vq[is], mg = m * g.gyro[is], pot = m2 * g.phi_pot[is] + g.V[is];
  const double* nsq = g.n_sq.data() + base;
  const double* ap = g.ang_plus.data();
  const double* am = g.ang_minus.data();
  const double* cot2 = g.cot2.data();
  // the polar stencil weights vanish, so the j +- 1 reads at the row ends are multiplied by zero;
  // real and imaginary parts are spelled out so the compiler can pair them
  const auto* U = reinterpret_cast<const double*>(ur);
  const auto* Vv = reinterpret_cast<const double*>(vr);
  const std::ptrdiff_t row = 2 * static_cast<std::ptrdiff_t>(nth);
  for (int j = 0; j < nth; ++j) {
    const std::ptrdiff_t k = 2 * j;
    const double ur0 = U[k], ui0 = U[k + 1];
    const double c_self = -ap[j] - am[j] - m2 * cot2[j];
    const double ang_r = ap[j] * U[k + 2] + am[j] * U[k - 2] + c_self * ur0;
    const double ang_i = ap[j] * U[k + 3] + am[j] * U[k - 1] + c_self * ui0;
    const double lap_r = (U[k + row] - 2.0 * ur0 + U[k - row]) * inv_dr2;
    const double lap_i = (U[k + 1 + row] - 2.0 * ui0 + U[k + 1 - row]) * inv_dr2;
    // -(i m gyro v)
    const double gr = mg * Vv[k + 1], gi = -mg * Vv[k];
    const double n2 = nsq[j];
    sink(j, vr[j], cplx(n2 * (lap_r + gr + vq * ang_r - pot * ur0), n2 * (lap_i + gi + vq * ang_i - pot * ui0)));
  }
}

void rhs_kernel(const ModeGrid& g, const cplx* u, const cplx* v, cplx* du, cplx* dv, BoundaryMode mode) {
  const std::size_t nth = static_cast<std::size_t>(g.nth);
  parallel_for(static_cast<std::size_t>(g.nr), [&](std::size_t is) {
    cplx* dur = du + is * nth;
    cplx* dvr = dv + is * nth;
    rhs_row(g, is, u, v, mode, [&](int j, cplx ku, cplx kv) {
      dur[j] = ku;
      dvr[j] = kv;
    });
  });
}

}  // namespace

RhsResult rhs(const ModeField& field, BoundaryMode mode) {
  field.validate();
  RhsResult out{CArray(field.u.size()), CArray(field.u.size())};
  rhs_kernel(*field.grid, field.u.data(), field.v.data(), out.du_dt.data(), out.dv_dt.data(), mode);
  for (const auto& z : out.dv_dt)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw NumericalError("non-finite value in rhs");
  return out;
}

double max_stable_dt(const ModeGrid& g, double cfl) {
  require(cfl > 0.0 && cfl < 1.0, "cfl must lie in (0, 1)");
  double ang = std::numeric_limits<double>::infinity();
  for (int i = 0; i < g.nr; ++i) {
    const auto is = static_cast<std::size_t>(i);
    for (int j = 0; j < g.nth; ++j) {
      const double speed2 = g.vq[is] * g.n_sq[g.index(i, j)];
      if (speed2 > 0.0) ang = std::min(ang, g.dth / std::sqrt(speed2));
    }
  }
  return cfl * std::min(g.drs, ang);
}

Rk4Stepper::Rk4Stepper(GridPtr grid, BoundaryMode mode) : grid_(std::move(grid)), mode_(mode) {
  const std::size_t n = grid_->size();
  for (auto* a : {&au_, &av_, &ta_u_, &ta_v_, &tb_u_, &tb_v_}) a->assign(n, cplx{});
}

// Each stage evaluates the rhs on one buffer pair and writes the next stage
// input into the other, so rows never read values updated in the same stage.
void Rk4Stepper::step(ModeField& f, double dt) {
  require(f.grid == grid_, "stepper used with a field on a different grid");
  const ModeGrid& g = *grid_;
  const std::size_t nth = static_cast<std::size_t>(g.nth);
  const auto rows = static_cast<std::size_t>(g.nr);
  const double h2 = 0.5 * dt, w = dt / 6.0;
  cplx* const u0 = f.u.data();
  cplx* const v0 = f.v.data();
  cplx *const au = au_.data(), *const av = av_.data();
  cplx *const ta_u = ta_u_.data(), *const ta_v = ta_v_.data();
  cplx *const tb_u = tb_u_.data(), *const tb_v = tb_v_.data();

  // stage S in {1, 2, 3} on row is; stage 4 adds the increment to the field
  auto stage_row = [&]<int S>(std::integral_constant<int, S>, std::size_t is) {
    const std::size_t base = is * nth;
    if constexpr (S == 4) {
      rhs_row(g, is, ta_u, ta_v, mode_, [&](int j, cplx ku, cplx kv) {
        const std::size_t k = base + static_cast<std::size_t>(j);
        u0[k] += w * (au[k] + ku);
        v0[k] += w * (av[k] + kv);
      });
    } else {
      const cplx* in_u = S == 1 ? u0 : (S == 2 ? ta_u : tb_u);
      const cplx* in_v = S == 1 ? v0 : (S == 2 ? ta_v : tb_v);
      cplx* out_u = S == 2 ? tb_u : ta_u;
      cplx* out_v = S == 2 ? tb_v : ta_v;
      const double h = S == 3 ? dt : h2;
      rhs_row(g, is, in_u, in_v, mode_, [&](int j, cplx ku, cplx kv) {
        const std::size_t k = base + static_cast<std::size_t>(j);
        if constexpr (S == 1) {
          au[k] = ku;
          av[k] = kv;
        } else {
          au[k] += 2.0 * ku;
          av[k] += 2.0 * kv;
        }
        out_u[k] = u0[k] + h * ku;
        out_v[k] = v0[k] + h * kv;
      });
    }
  };
  auto run_stage = [&](int s, std::size_t is) {
    switch (s) {
      case 1: stage_row(std::integral_constant<int, 1>{}, is); break;
      case 2: stage_row(std::integral_constant<int, 2>{}, is); break;
      case 3: stage_row(std::integral_constant<int, 3>{}, is); break;
      default: stage_row(std::integral_constant<int, 4>{}, is); break;
    }
  };

  if (thread_count() > 1) {
    for (int s = 1; s <= 4; ++s) parallel_for(rows, [&](std::size_t is) { run_stage(s, is); });
    return;
  }
  // Serial: one sweep with stage s lagging s - 1 rows behind stage 1, so each row
  // is reused from cache. Every stage still sees exactly the inputs of the
  // stage-by-stage order, hence identical results.
  for (std::size_t p = 0; p < rows + 3; ++p) {
    for (int s = 1; s <= 4; ++s) {
      const auto lag = static_cast<std::size_t>(s - 1);
      if (p >= lag && p - lag < rows) run_stage(s, p - lag);
    }
  }
}

ModeField step_rk4(const ModeField& field, double dt, BoundaryMode mode) {
  field.validate();
  ModeField out = field;
  Rk4Stepper(field.grid, mode).step(out, dt);
  return out;
}

ModeField gaussian_initial_data(GridPtr grid, double center, double width, double amplitude, int l, bool ingoing) {
  require(width > 0.0, "Gaussian width must be positive");
  require(std::isfinite(center) && std::isfinite(amplitude), "Gaussian center and amplitude must be finite");
  const ModeGrid& g = *grid;
  const int am = std::abs(g.m);
  require(l >= am, "angular profile needs l >= |m|");
  std::vector<double> prof(static_cast<std::size_t>(g.nth));
  double peak = 0.0;
  for (int j = 0; j < g.nth; ++j) {
    const double p = std::assoc_legendre(static_cast<unsigned>(l), static_cast<unsigned>(am),
                                         std::cos(g.theta[static_cast<std::size_t>(j)]));
    prof[static_cast<std::size_t>(j)] = p;
    peak = std::max(peak, std::abs(p));
  }
  for (auto& p : prof) p /= peak;
  ModeField f = ModeField::zeros(grid);
  for (int i = 0; i < g.nr; ++i) {
    const double s = (g.rs[static_cast<std::size_t>(i)] - center) / width;
    const double rad = amplitude * std::exp(-0.5 * s * s);
    const double drad = -s / width * rad;
    for (int j = 0; j < g.nth; ++j) {
      const std::size_t k = g.index(i, j);
      f.u[k] = rad * prof[static_cast<std::size_t>(j)];
      if (ingoing) f.v[k] = drad * prof[static_cast<std::size_t>(j)];
    }
  }
  return f;
}

ModeField gaussian_initial_data(const EvolutionConfig& config, double center, double width, double amplitude, int l,
                                bool ingoing) {
  config.validate();
  return gaussian_initial_data(make_grid(config), center, width, amplitude, l, ingoing);
}

cplx sample_field(const ModeField& f, double r_star, double theta) {
  const ModeGrid& g = *f.grid;
  const double fi = (r_star - g.rs_min) / g.drs;
  const int i0 = std::clamp(static_cast<int>(std::floor(fi)), 0, g.nr - 2);
  const double wi = std::clamp(fi - i0, 0.0, 1.0);
  const double fj = theta / g.dth - 0.5;
  const int j0 = std::clamp(static_cast<int>(std::floor(fj)), 0, g.nth - 2);
  const double wj = std::clamp(fj - j0, 0.0, 1.0);
  auto at = [&](int i, int j) { return f.u[g.index(i, j)]; };
  return (1.0 - wi) * ((1.0 - wj) * at(i0, j0) + wj * at(i0, j0 + 1)) +
         wi * ((1.0 - wj) * at(i0 + 1, j0) + wj * at(i0 + 1, j0 + 1));
}

namespace {

bool all_finite(const ModeField& f) {
  for (std::size_t k = 0; k < f.u.size(); ++k)
    if (!std::isfinite(f.u[k].real()) || !std::isfinite(f.u[k].imag()) || !std::isfinite(f.v[k].real()) ||
        !std::isfinite(f.v[k].imag()))
      return false;
  return true;
}

}  // namespace

EvolutionResult evolve(const EvolutionConfig& config, const ModeField& init) {
  config.validate();
  const FlushSubnormals flush;
  init.validate();
  const ModeGrid& g = *init.grid;
  require(g.nr == config.grid.n_r && g.nth == config.grid.n_theta && g.m == config.m,
          "initial data grid does not match the configuration");

  EvolutionResult res;
  res.final_field = init;
  ModeField& f = res.final_field;

  const RadialMap map(config.params);
  for (const auto& o : config.observers) {
    ObserverSeries s;
    s.observer = o;
    s.r_star = map.tortoise(o.r);
    res.series.observers.push_back(std::move(s));
  }

  const double dt_max = max_stable_dt(g, config.cfl);
  const long per_sample = std::max(1L, static_cast<long>(std::ceil(config.sample_dt / dt_max - 1e-12)));
  const double dt = config.sample_dt / static_cast<double>(per_sample);
  const long n_steps = config.t_end > 0.0 ? static_cast<long>(std::ceil(config.t_end / dt - 1e-9)) : 0;
  res.dt = dt;
  res.steps = n_steps;

  const auto& diag = config.diagnostics;
  RadialBand band{0.0, 0.0};
  if (diag.energies && diag.morawetz) band = morawetz_band(config.params, diag.band_margin);

  auto sample_observers = [&](double t) {
    for (auto& s : res.series.observers) {
      const cplx val = sample_field(f, s.r_star, s.observer.theta);
      const double rho = std::sqrt(s.observer.r * s.observer.r + config.params.spin * config.params.spin);
      s.t.push_back(t);
      s.re_u.push_back(val.real());
      s.im_u.push_back(val.imag());
      s.abs_u.push_back(std::abs(val));
      s.abs_psi.push_back(std::abs(val) / rho);
      if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) return false;
    }
    return true;
  };

  EnergyLedger& L = res.ledger;
  auto sample_energies = [&](double t) {
    if (!diag.energies) return;
    const SymmetryFamily fam = build_symmetry_family(f);
    const KEnergy k = energy_K(f, t);
    double e3_tchi = 0.0, e3_k = 0.0;
    for (const auto& mem : fam.members) {
      e3_tchi += energy_Tchi(mem.field);
      e3_k += energy_K(mem.field, t).total();
    }
    L.t.push_back(t);
    L.E_Tperp.push_back(energy_Tperp(f));
    L.E_Tchi.push_back(energy_Tchi(f));
    L.E3_Tchi.push_back(e3_tchi);
    L.E_K.push_back(k.vector_part);
    L.E_qK.push_back(k.q_part);
    L.E3_K.push_back(e3_k);
    const double bulk = diag.morawetz ? morawetz_bulk(fam, band) : 0.0;
    const std::size_t n = L.t.size();
    L.mor_bulk.push_back(bulk);
    L.mor_cum.push_back(n == 1 ? 0.0 : L.mor_cum[n - 2] + 0.5 * (L.t[n - 1] - L.t[n - 2]) * (bulk + L.mor_bulk[n - 2]));
    if (diag.lightcone_p >= 0) {
      const double lc = t > 0.0 ? lightcone_weighted_bulk(fam, band, diag.lightcone_p, t) : 0.0;
      L.lc_bulk.push_back(lc);
      L.lc_cum.push_back(n == 1 ? 0.0 : L.lc_cum[n - 2] + 0.5 * (L.t[n - 1] - L.t[n - 2]) * (lc + L.lc_bulk[n - 2]));
    }
  };

  ModeField last_good = f;
  double t_last_good = 0.0;
  if (!all_finite(f)) throw EvolutionAborted("initial data not finite", f, 0.0);
  sample_observers(0.0);
  sample_energies(0.0);

  Rk4Stepper stepper(init.grid, config.boundary);
  double t = 0.0;
  for (long n = 1; n <= n_steps; ++n) {
    const double t_next = (n == n_steps) ? config.t_end : static_cast<double>(n) * dt;
    stepper.step(f, t_next - t);
    t = t_next;
    if (!sample_observers(t))
      throw EvolutionAborted("non-finite observer value at t = " + std::to_string(t), last_good, t_last_good);
    if (n % per_sample == 0 || n == n_steps) {
      if (!all_finite(f))
        throw EvolutionAborted("non-finite field at t = " + std::to_string(t), last_good, t_last_good);
      sample_energies(t);
      last_good = f;
      t_last_good = t;
    }
  }
  return res;
}

}  // namespace kerrlab
