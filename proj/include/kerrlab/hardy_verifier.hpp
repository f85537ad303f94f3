#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "kerrlab/kerr_geometry.hpp"
#include "kerrlab/rational_calculus.hpp"

/// Weighted Hardy inequality: normal form of the radial ODE, the explicit
/// hypergeometric positive solution, and quadrature checks of the inequalities.
namespace kerrlab {

/// A = Delta^2 / (r^2 (r^2+a^2)), V = (9r^2 - 46Mr + 54M^2) / (6 r^4).
struct HardyPotential {
  KerrParams params;
  double A(double r) const;
  double V(double r) const;
};

/// W = V/A + A''/(2A) - A'^2/(4A^2), exact in r (x = r - r_plus only shifts the
/// argument). The returned object evaluates at r.
FactoredRational normal_form(const KerrParams& p);

/// (9x^2 - 34Mx - 2M^2) / (6 x^2 (x+2M)^2) written as a function of r = x + 2M.
FactoredRational schwarzschild_normal_form_reference(double mass);

struct HypergeometricParams {
  double alpha = 0.0;
  double beta = 0.0;
  double a_h = 0.0;
  double b_h = 0.0;
  double c_h = 0.0;
  double d = 0.0;

  /// a_h < 0 < b_h < c_h.
  bool integral_ordering() const { return a_h < 0.0 && 0.0 < b_h && b_h < c_h; }
  /// a_h < -2.5 < 0 < 0.1 < b_h < 0.2 < 1.8 < c_h.
  bool schwarzschild_ordering() const {
    return a_h < -2.5 && 0.1 < b_h && b_h < 0.2 && 1.8 < c_h;
  }
};

/// Coefficients of the model potential (C1 x^2 + C2 x + C3) / (C4 x^2 (x+d)^2).
struct ModelPotential {
  double C1, C2, C3, C4, d;
  double operator()(double x) const { return (C1 * x * x + C2 * x + C3) / (C4 * x * x * (x + d) * (x + d)); }
};

/// Exponents alpha (root > 1/2) at x = 0 and beta (root < 1/2) at x = -d, and the
/// hypergeometric parameters with v = x^alpha (x+d)^beta F(a,b;c;-x/d).
HypergeometricParams hypergeometric_params_from_model(const ModelPotential& w);

/// a = 0 model: C = (9, -34M, -2M^2, 6), d = 2M.
HypergeometricParams solve_hypergeometric_params(double mass);

/// Perturbed model: d = r_plus - r_minus and the potential lowered by
/// eps (M + x)^2 / (x^2 (x+d)^2).
ModelPotential perturbed_model(const KerrParams& p, double eps);

/// Gauss hypergeometric 2F1(a,b;c;z) for a < 0 < b < c and z <= 0, from the
/// Euler integral with tanh-sinh quadrature.
double hypergeometric_F(double a, double b, double c, double z);

struct HardySolution {
  HypergeometricParams hyper;
  double mass = 1.0;
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> r;
  std::vector<double> u;
  double max_residual = 0.0;
  bool positive = false;
};

/// Positive solution v of -v'' + W v = 0 at a = 0 on the given x nodes, with
/// u = A^(-1/2) v, residual by a sixth-order difference of v.
HardySolution positive_solution(double mass, const std::vector<double>& x_nodes);

/// Value of v(x) = x^alpha (x+d)^beta F(a,b;c;-x/d).
double hardy_v(const HypergeometricParams& hp, double x);

/// A radial test function with its derivative.
struct RadialTestFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  double support_max = 50.0;  ///< f negligible beyond this radius
};

struct WeightedHardyReport {
  bool holds = true;
  double max_epsilon = 0.0;     ///< min over nonzero functions of LHS / RHS
  int min_ratio_index = -1;  ///< index of the function attaining it
  int tested = 0;
  int skipped_zero = 0;
};

/// Checks int A f'^2 + V f^2 dr >= eps int A f'^2 + f^2/r^2 dr over [r_plus, support_max].
WeightedHardyReport verify_weighted_hardy(const KerrParams& p, const std::vector<RadialTestFunction>& tests,
                                          double epsilon);

/// Random smooth test functions: sums of Gaussian bumps, some nonzero at r_plus.
std::vector<RadialTestFunction> random_hardy_test_functions(const KerrParams& p, int count, unsigned long long seed);

/// The positive solution u cut off smoothly beyond r_cut (a = 0).
RadialTestFunction cutoff_positive_solution(double mass, double r_cut);

/// Quadratic form int_lo^hi A f'^2 + V f^2 for arbitrary weights (adaptive quadrature).
double hardy_quadratic_form(const std::function<double(double)>& A, const std::function<double(double)>& V,
                            const RadialTestFunction& f, double lo, double hi);

struct BasicHardyReport {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;  ///< lhs / rhs
};

/// int_0^inf psi^2 <= C int_0^inf x^2 psi'^2. The sharp constant is 4.
/// Rejects psi without decay (x psi(x)^2 must vanish at infinity).
BasicHardyReport verify_basic_hardy(const RadialTestFunction& psi, double constant = 4.0);

/// int (1+x^2)^{-1} phi^2 <= C (int phi'^2 + int chi phi^2) on [x1, x2], chi a bump
/// at the origin; reports the smallest C for this phi.
BasicHardyReport verify_sterbenz_hardy(const RadialTestFunction& phi, double x1, double x2, double constant = 10.0);

}  // namespace kerrlab
