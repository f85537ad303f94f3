#include "kerrlab/hardy_verifier.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "kerrlab/error.hpp"

namespace kerrlab {

namespace {

constexpr std::size_t kR = 0, kRho2 = 1, kDelta = 2;

// Sixth-order central second difference.
double second_difference(const std::function<double(double)>& f, double x, double h) {
  const double s = 2.0 * (f(x - 3 * h) + f(x + 3 * h)) - 27.0 * (f(x - 2 * h) + f(x + 2 * h)) +
                   270.0 * (f(x - h) + f(x + h)) - 490.0 * f(x);
  return s / (180.0 * h * h);
}

struct Piece {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// Adaptive Gauss-Kronrod on unit-width chunks; tanh-sinh on the first chunk,
// which may touch an integrable endpoint singularity.
Piece integrate_chunks(const std::function<double(double)>& g, double lo, double hi, bool singular_lo) {
  Piece out;
  if (!(hi > lo)) return out;
  const double width = 1.0;
  double a = lo;
  bool first = true;
  while (a < hi) {
    const double b = std::min(hi, a + width);
    double err = 0.0, l1 = 0.0;
    double val;
    if (first && singular_lo) {
      boost::math::quadrature::tanh_sinh<double> ts;
      // abscissae that round onto the endpoint carry negligible weight
      val = ts.integrate([&](double t, double) { return t > a ? g(t) : 0.0; }, a, b, 1e-12, &err, &l1);
    } else {
      val = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, a, b, 15, 1e-12, &err, &l1);
    }
    out.value += val;
    out.error += err;
    out.l1 += l1;
    first = false;
    a = b;
  }
  return out;
}

double checked(const Piece& p, const char* what) {
  if (!std::isfinite(p.value) || p.error > 1e-7 * std::max(p.l1, 1e-300)) {
    throw ValidationError(std::string("test function not resolved by quadrature: ") + what);
  }
  return p.value;
}

double cutoff(double s) { return 1.0 - smooth_step(s); }

}  // namespace

double HardyPotential::A(double r) const {
  const double x = r - params.r_plus();
  const double d = params.r_plus() - params.r_minus();
  const double delta = x * (x + d);
  return delta * delta / (r * r * (r * r + params.spin * params.spin));
}

double HardyPotential::V(double r) const {
  const double M = params.mass;
  return (9.0 * r * r - 46.0 * M * r + 54.0 * M * M) / (6.0 * r * r * r * r);
}

FactoredRational normal_form(const KerrParams& p) {
  p.validate();
  const mpq_class M = exact(p.mass), a = exact(p.spin), a2 = a * a;
  auto basis = std::make_shared<FactorBasis>();
  basis->factors = {Polynomial::identity(), Polynomial({a2, 0, 1}), Polynomial({a2, -2 * M, 1})};
  basis->names = {"r", "r^2+a^2", "Delta"};
  const FactoredRational::Basis B = basis;
  auto pw = [&](std::size_t idx, int twice) { return FactoredRational::factor_power(B, idx, twice); };

  const FactoredRational A = pw(kDelta, 4) * pw(kR, -4) * pw(kRho2, -2);
  const Polynomial vnum({54 * M * M, -46 * M, 9});
  const FactoredRational V = mpq_class(1, 6) * (FactoredRational::polynomial(B, vnum) * pw(kR, -8));
  const FactoredRational A1 = A.derivative();
  const FactoredRational A2 = A1.derivative();
  return V / A + mpq_class(1, 2) * (A2 / A) - mpq_class(1, 4) * ((A1 * A1) / (A * A));
}

FactoredRational schwarzschild_normal_form_reference(double mass) {
  const mpq_class M = exact(mass);
  const mpq_class shift = -2 * M;
  auto basis = std::make_shared<FactorBasis>();
  basis->factors = {Polynomial::identity(), Polynomial({shift, 1})};
  basis->names = {"r", "r-2M"};
  const FactoredRational::Basis B = basis;
  const Polynomial num_x({-2 * M * M, -34 * M, 9});
  const FactoredRational num = FactoredRational::polynomial(B, num_x.shifted(shift));
  return mpq_class(1, 6) * (num * FactoredRational::factor_power(B, 0, -4) * FactoredRational::factor_power(B, 1, -4));
}

HypergeometricParams hypergeometric_params_from_model(const ModelPotential& w) {
  require(w.C4 != 0.0 && w.d > 0.0, "model potential needs C4 != 0 and d > 0");
  const double k0 = w.C3 / (w.C4 * w.d * w.d);
  const double k1 = w.C1 / w.C4 - w.C2 / (w.C4 * w.d) + w.C3 / (w.C4 * w.d * w.d);
  require(0.25 + k0 >= 0.0 && 0.25 + k1 >= 0.0, "indicial roots are complex");
  HypergeometricParams h;
  h.d = w.d;
  h.alpha = 0.5 + std::sqrt(0.25 + k0);
  h.beta = 0.5 - std::sqrt(0.25 + k1);
  h.c_h = 2.0 * h.alpha;
  const double s = h.alpha + h.beta;
  const double sum = 2.0 * s - 1.0;
  const double prod = s * s - s - w.C1 / w.C4;
  const double disc = sum * sum - 4.0 * prod;
  require(disc >= 0.0, "hypergeometric parameters are complex");
  h.a_h = 0.5 * (sum - std::sqrt(disc));
  h.b_h = 0.5 * (sum + std::sqrt(disc));
  return h;
}

HypergeometricParams solve_hypergeometric_params(double mass) {
  require(mass > 0.0 && std::isfinite(mass), "mass must be positive");
  return hypergeometric_params_from_model({9.0, -34.0 * mass, -2.0 * mass * mass, 6.0, 2.0 * mass});
}

ModelPotential perturbed_model(const KerrParams& p, double eps) {
  p.validate();
  const double M = p.mass;
  return {9.0 - 6.0 * eps, -34.0 * M - 12.0 * eps * M, -2.0 * M * M - 6.0 * eps * M * M, 6.0,
          p.r_plus() - p.r_minus()};
}

double hypergeometric_F(double a, double b, double c, double z) {
  require(a < 0.0 && 0.0 < b && b < c, "Euler integral needs a < 0 < b < c");
  require(std::isfinite(z) && z <= 0.0, "Euler integral evaluated for z <= 0 only");
  if (z == 0.0) return 1.0;
  // (x, xc) form keeps t and 1 - t accurate near both endpoints.
  auto g = [&](double t, double tc) {
    const double one_minus_t = tc > 0.0 ? tc : 1.0 - t;
    const double tt = tc < 0.0 ? -tc : t;
    return std::pow(tt, b - 1.0) * std::pow(one_minus_t, c - b - 1.0) * std::pow(1.0 - tt * z, -a);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0.0;
  const double integral = ts.integrate(g, 0.0, 1.0, 1e-14, &err);
  const double pref = std::exp(std::lgamma(c) - std::lgamma(b) - std::lgamma(c - b));
  return pref * integral;
}

double hardy_v(const HypergeometricParams& hp, double x) {
  require(x > 0.0, "v is evaluated for x > 0");
  return std::pow(x, hp.alpha) * std::pow(x + hp.d, hp.beta) * hypergeometric_F(hp.a_h, hp.b_h, hp.c_h, -x / hp.d);
}

HardySolution positive_solution(double mass, const std::vector<double>& x_nodes) {
  HardySolution s;
  s.mass = mass;
  s.hyper = solve_hypergeometric_params(mass);
  const KerrParams p{mass, 0.0};
  const FactoredRational W = normal_form(p);
  const HardyPotential hp{p};
  const std::function<double(double)> v = [&](double x) { return hardy_v(s.hyper, x); };
  s.positive = true;
  for (double x : x_nodes) {
    require(x > 0.0 && std::isfinite(x), "solution nodes must be positive");
    const double vx = v(x);
    const double r = 2.0 * mass + x;
    const double w = W.evaluate(r);
    const double vpp = second_difference(v, x, 1e-2 * x);
    const double scale = std::max(std::abs(w * vx), std::abs(vx) / (x * x));
    s.max_residual = std::max(s.max_residual, std::abs(-vpp + w * vx) / scale);
    s.positive = s.positive && vx > 0.0;
    s.x.push_back(x);
    s.v.push_back(vx);
    s.r.push_back(r);
    s.u.push_back(vx / std::sqrt(hp.A(r)));
  }
  return s;
}

double hardy_quadratic_form(const std::function<double(double)>& A, const std::function<double(double)>& V,
                            const RadialTestFunction& f, double lo, double hi) {
  auto g = [&](double r) {
    const double fp = f.df(r), fv = f.f(r);
    return A(r) * fp * fp + V(r) * fv * fv;
  };
  return checked(integrate_chunks(g, lo, hi, true), "quadratic form");
}

WeightedHardyReport verify_weighted_hardy(const KerrParams& p, const std::vector<RadialTestFunction>& tests,
                                          double epsilon) {
  p.validate();
  require(epsilon >= 0.0, "epsilon must be nonnegative");
  const HardyPotential hp{p};
  const double lo = p.r_plus();
  WeightedHardyReport rep;
  rep.max_epsilon = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tests.size(); ++k) {
    const auto& t = tests[k];
    const double hi = std::max(t.support_max, lo + 1.0);
    auto rhs_g = [&](double r) {
      const double fp = t.df(r), fv = t.f(r);
      return hp.A(r) * fp * fp + fv * fv / (r * r);
    };
    const double rhs = checked(integrate_chunks(rhs_g, lo, hi, true), "weighted norm");
    if (!(rhs > 1e-300)) {
      ++rep.skipped_zero;
      continue;
    }
    const double lhs = hardy_quadratic_form([&](double r) { return hp.A(r); }, [&](double r) { return hp.V(r); },
                                            t, lo, hi);
    ++rep.tested;
    const double ratio = lhs / rhs;
    if (ratio < rep.max_epsilon) {
      rep.max_epsilon = ratio;
      rep.min_ratio_index = static_cast<int>(k);
    }
    if (lhs < epsilon * rhs) rep.holds = false;
  }
  if (rep.tested == 0) rep.max_epsilon = 0.0;
  return rep;
}

std::vector<RadialTestFunction> random_hardy_test_functions(const KerrParams& p, int count, unsigned long long seed) {
  p.validate();
  require(count >= 0, "count must be nonnegative");
  const double M = p.mass, rp = p.r_plus();
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> centre(rp - 2.0 * M, 20.0 * M);
  std::uniform_real_distribution<double> width(0.3 * M, 4.0 * M);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::uniform_int_distribution<int> nbumps(1, 3);
  std::vector<RadialTestFunction> out;
  for (int k = 0; k < count; ++k) {
    struct Bump {
      double c, w, A;
    };
    std::vector<Bump> bumps(static_cast<std::size_t>(nbumps(gen)));
    double support = rp + 1.0;
    for (auto& b : bumps) {
      b.c = centre(gen);
      b.w = width(gen);
      b.A = amp(gen);
      support = std::max(support, b.c + 10.0 * b.w);
    }
    RadialTestFunction f;
    f.f = [bumps](double r) {
      double s = 0.0;
      for (const auto& b : bumps) s += b.A * std::exp(-0.5 * (r - b.c) * (r - b.c) / (b.w * b.w));
      return s;
    };
    f.df = [bumps](double r) {
      double s = 0.0;
      for (const auto& b : bumps)
        s -= b.A * (r - b.c) / (b.w * b.w) * std::exp(-0.5 * (r - b.c) * (r - b.c) / (b.w * b.w));
      return s;
    };
    f.support_max = support;
    out.push_back(std::move(f));
  }
  return out;
}

RadialTestFunction cutoff_positive_solution(double mass, double r_cut) {
  require(r_cut > 2.0 * mass, "cutoff radius must lie outside the horizon");
  const HypergeometricParams hp = solve_hypergeometric_params(mass);
  const HardyPotential pot{{mass, 0.0}};
  const double d = hp.d;
  // v' from d/dz F(a,b;c;z) = (ab/c) F(a+1,b+1;c+1;z).
  auto v_and_dv = [hp, d](double x) {
    const double z = -x / d;
    const double F = hypergeometric_F(hp.a_h, hp.b_h, hp.c_h, z);
    const double Fp = hp.a_h * hp.b_h / hp.c_h * hypergeometric_F(hp.a_h + 1.0, hp.b_h + 1.0, hp.c_h + 1.0, z);
    const double pre = std::pow(x, hp.alpha) * std::pow(x + d, hp.beta);
    const double v = pre * F;
    const double dv = v * (hp.alpha / x + hp.beta / (x + d)) - pre * Fp / d;
    return std::pair<double, double>{v, dv};
  };
  auto u_and_du = [=](double r) {
    const double x = r - 2.0 * mass;
    const auto [v, dv] = v_and_dv(x);
    const double A = pot.A(r);
    // A = x^2 / r^2 at a = 0.
    const double dlogA = 2.0 / x - 2.0 / r;
    const double sA = std::sqrt(A);
    return std::pair<double, double>{v / sA, (dv - 0.5 * v * dlogA) / sA};
  };
  const double width = r_cut;
  RadialTestFunction f;
  f.f = [=](double r) { return u_and_du(r).first * cutoff((r - r_cut) / width); };
  f.df = [=](double r) {
    const auto [u, du] = u_and_du(r);
    const double s = (r - r_cut) / width;
    return du * cutoff(s) - u * smooth_step_derivative(s) / width;
  };
  f.support_max = r_cut + width;
  return f;
}

BasicHardyReport verify_basic_hardy(const RadialTestFunction& psi, double constant) {
  require(constant > 0.0, "Hardy constant must be positive");
  const double X = psi.support_max;
  require(X > 0.0, "support must be positive");
  double peak = 0.0;
  for (int k = 1; k <= 200; ++k) peak = std::max(peak, std::abs(psi.f(X * k / 200.0)));
  const double tail = psi.f(X);
  if (!(X * tail * tail <= 1e-10 * std::max(peak * peak, 1e-300))) {
    throw ValidationError("test function does not decay: x psi(x)^2 does not vanish at infinity");
  }
  BasicHardyReport rep;
  rep.lhs = checked(integrate_chunks([&](double x) { return psi.f(x) * psi.f(x); }, 0.0, X, true), "psi^2");
  rep.rhs = checked(integrate_chunks(
                        [&](double x) {
                          const double d = psi.df(x);
                          return x * x * d * d;
                        },
                        0.0, X, true),
                    "x^2 psi'^2");
  require(rep.rhs > 0.0, "test function has zero gradient energy");
  rep.constant = rep.lhs / rep.rhs;
  rep.holds = rep.lhs <= constant * rep.rhs * (1.0 + 1e-12);
  return rep;
}

BasicHardyReport verify_sterbenz_hardy(const RadialTestFunction& phi, double x1, double x2, double constant) {
  require(x1 < x2, "interval must be nonempty");
  auto chi = [](double x) { return cutoff((std::abs(x) - 0.5) / 0.5); };
  BasicHardyReport rep;
  rep.lhs = checked(integrate_chunks([&](double x) { return phi.f(x) * phi.f(x) / (1.0 + x * x); }, x1, x2, false),
                    "weighted L2");
  rep.rhs = checked(integrate_chunks(
                        [&](double x) {
                          const double d = phi.df(x), f = phi.f(x);
                          return d * d + chi(x) * f * f;
                        },
                        x1, x2, false),
                    "gradient + bump");
  require(rep.rhs > 0.0, "test function is zero");
  rep.constant = rep.lhs / rep.rhs;
  rep.holds = rep.constant <= constant;
  return rep;
}

}  // namespace kerrlab
