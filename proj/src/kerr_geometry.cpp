#include "kerrlab/kerr_geometry.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "kerrlab/error.hpp"

namespace kerrlab {

void KerrParams::validate() const {
  require(std::isfinite(mass) && mass > 0.0, "mass must be positive and finite");
  require(std::isfinite(spin) && std::abs(spin) < mass,
          "spin must satisfy |a| < M (extremal and superextremal Kerr unsupported)");
}

double KerrParams::r_plus() const { return mass + std::sqrt(mass * mass - spin * spin); }
double KerrParams::r_minus() const {
  // r_plus * r_minus = a^2 avoids cancellation for small a
  return spin * spin / r_plus();
}

HorizonRadii horizon_radii(const KerrParams& p) {
  p.validate();
  return {p.r_minus(), p.r_plus()};
}

namespace {

void require_exterior(const KerrParams& p, double r) {
  p.validate();
  require(std::isfinite(r) && r > p.r_plus(),
          "radius must lie outside the event horizon (r > r_plus)");
}

}  // namespace

MetricScalars metric_scalars(const KerrParams& p, double r, double theta) {
  require_exterior(p, r);
  const double a2 = p.spin * p.spin;
  const double s = std::sin(theta), c = std::cos(theta);
  const double delta = (r - p.r_plus()) * (r - p.r_minus());
  const double rho2 = r * r + a2;
  return {delta, r * r + a2 * c * c, rho2 * rho2 - a2 * s * s * delta};
}

double omega_h(const KerrParams& p) {
  p.validate();
  const double rp = p.r_plus();
  return p.spin / (rp * rp + p.spin * p.spin);
}

double omega_perp(const KerrParams& p, double r, double theta) {
  const auto g = metric_scalars(p, r, theta);
  return 2.0 * p.spin * p.mass * r / g.pi;
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double g0 = std::exp(-1.0 / s);
  const double g1 = std::exp(-1.0 / (1.0 - s));
  return g0 / (g0 + g1);
}

double smooth_step_derivative(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double g0 = std::exp(-1.0 / s);
  const double g1 = std::exp(-1.0 / (1.0 - s));
  const double dg0 = g0 / (s * s);
  const double dg1 = -g1 / ((1.0 - s) * (1.0 - s));
  const double den = g0 + g1;
  return (dg0 * g1 - g0 * dg1) / (den * den);
}

Blend blend_chi(double r, double mass, double start, double width) {
  const double w = width * mass;
  const double s = (r - start * mass) / w;
  return {1.0 - smooth_step(s), -smooth_step_derivative(s) / w};
}

Potentials potentials_from_offset(const KerrParams& p, double x, double theta) {
  const double M = p.mass, a2 = p.spin * p.spin;
  const double rp = p.r_plus(), rm = p.r_minus();
  const double r = rp + x;
  const double delta = x * (x + (rp - rm));
  const double rho2 = r * r + a2;
  const double rho4 = rho2 * rho2;
  const double s2 = std::sin(theta) * std::sin(theta);
  Potentials out{};
  out.V_Q = delta / rho4;
  out.V = delta * (2.0 * M * r * r * r + r * r * a2 - 4.0 * M * r * a2 + a2 * a2) / (rho4 * rho4);
  out.N_inv_sq = 1.0 - a2 * s2 * out.V_Q;
  const double h2 = 1.0 - 2.0 * a2 * out.V_Q;
  if (!(h2 > 0.0)) throw NumericalError("1 - 2a^2 V_Q not positive; |a| < M violated");
  out.h = std::sqrt(h2);
  return out;
}

Potentials potentials(const KerrParams& p, double r, double theta) {
  require_exterior(p, r);
  return potentials_from_offset(p, r - p.r_plus(), theta);
}

double h_phiphi_from_offset(const KerrParams& p, double x, double theta) {
  const double M = p.mass, a2 = p.spin * p.spin;
  const double rp = p.r_plus(), rm = p.r_minus();
  const double r = rp + x;
  const double delta = x * (x + (rp - rm));
  const double rho2 = r * r + a2;
  const double s = std::sin(theta), c = std::cos(theta);
  const double pi = rho2 * rho2 - a2 * s * s * delta;
  const double vq = delta / (rho2 * rho2);
  return vq * (1.0 / (s * s) - a2 * (r * r + 2.0 * M * r + a2 * c * c) / pi);
}

RadialMap::RadialMap(const KerrParams& p) : params_(p) {
  p.validate();
  const long double M = p.mass;
  const long double a = p.spin;
  const long double root = std::sqrt(M * M - a * a);
  rp_ = M + root;
  rm_ = a * a / rp_;
  const long double d = rp_ - rm_;
  c_plus_ = 2.0L * M * rp_ / d;
  c_minus_ = 2.0L * M * rm_ / d;
  offset_ = 0.0L;
  offset_ = -tortoise_offset(3.0L * M - rp_);
}

long double RadialMap::tortoise_offset(long double x) const {
  const long double M = params_.mass;
  const long double r = rp_ + x;
  long double rs = r + c_plus_ * std::log(x / M);
  if (c_minus_ != 0.0L) rs -= c_minus_ * std::log((x + (rp_ - rm_)) / M);
  return rs + offset_;
}

double RadialMap::tortoise(double r) const {
  require(std::isfinite(r) && r > params_.r_plus(), "tortoise: r must exceed r_plus");
  const long double x = static_cast<long double>(r) - rp_;
  require(x > 0.0L, "tortoise: r must exceed r_plus");
  return static_cast<double>(tortoise_offset(x));
}

long double RadialMap::inverse_offset(long double target) const {
  require(std::isfinite(static_cast<double>(target)), "inverse tortoise: r* must be finite");
  const long double M = params_.mass;
  const long double d = rp_ - rm_;
  auto F = [&](long double y) {
    const long double x = M * std::exp(y);
    const long double r = rp_ + x;
    const long double rho2 = r * r + static_cast<long double>(params_.spin) * params_.spin;
    return std::make_tuple(tortoise_offset(x) - target, rho2 / (x + d));
  };
  // Bracket in y = ln(x/M). r* is increasing in y.
  long double lo = -1.0L, hi = 1.0L;
  while (std::get<0>(F(lo)) > 0.0L) {
    lo = 2.0L * lo - 1.0L;
    if (lo < -11000.0L) throw NumericalError("inverse tortoise: r* below representable range");
  }
  while (std::get<0>(F(hi)) < 0.0L) {
    hi = 2.0L * hi + 1.0L;
    if (hi > 11000.0L) throw NumericalError("inverse tortoise: r* above representable range");
  }
  long double guess;
  if (target > 0.0L) {
    guess = std::log(std::max(target, M) / M);
  } else {
    guess = (target - rp_ - offset_) / c_plus_;
  }
  guess = std::min(std::max(guess, lo), hi);
  std::uintmax_t iters = 200;
  const long double y = boost::math::tools::newton_raphson_iterate(
      F, guess, lo, hi, std::numeric_limits<long double>::digits - 2, iters);
  return M * std::exp(y);
}

double RadialMap::inverse(double r_star) const {
  require(std::isfinite(r_star), "inverse tortoise: r* must be finite");
  return static_cast<double>(rp_ + inverse_offset(r_star));
}

std::vector<RadialSample> RadialMap::table(const std::vector<double>& nodes) const {
  std::vector<RadialSample> out;
  out.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    require(i == 0 || nodes[i] > nodes[i - 1], "tortoise table nodes must be increasing");
    out.push_back({inverse(nodes[i]), nodes[i]});
  }
  return out;
}

double tortoise(const RadialMap& map, double r) { return map.tortoise(r); }
double inverse_tortoise(const RadialMap& map, double r_star) { return map.inverse(r_star); }

}  // namespace kerrlab
