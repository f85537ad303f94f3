#pragma once

#include <gmpxx.h>

#include <memory>
#include <string>
#include <utility>
#include <vector>

/// Exact calculus for the radial weight functions: polynomials with rational
/// coefficients, and products N(r) * prod_i f_i(r)^(k_i/2) over a shared basis
/// of polynomial factors f_i. Everything is exact until evaluate().
namespace kerrlab {

class Polynomial {
 public:
  Polynomial() = default;
  /// Coefficients in ascending order of degree.
  explicit Polynomial(std::vector<mpq_class> coeffs);

  static Polynomial constant(const mpq_class& c);
  static Polynomial identity();

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  const std::vector<mpq_class>& coeffs() const { return c_; }
  mpq_class coeff(int k) const;

  Polynomial derivative() const;
  mpq_class evaluate(const mpq_class& x) const;
  /// p(x + c).
  Polynomial shifted(const mpq_class& c) const;

  friend Polynomial operator+(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator-(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);
  friend Polynomial operator*(const mpq_class& s, const Polynomial& p);
  friend bool operator==(const Polynomial& p, const Polynomial& q) { return p.c_ == q.c_; }

  /// Quotient and remainder; divisor must be nonzero.
  static std::pair<Polynomial, Polynomial> divmod(const Polynomial& num, const Polynomial& den);

 private:
  void trim();
  std::vector<mpq_class> c_;
};

struct FactorBasis {
  std::vector<Polynomial> factors;
  std::vector<std::string> names;
};

class FactoredRational {
 public:
  using Basis = std::shared_ptr<const FactorBasis>;

  FactoredRational(Basis basis, Polynomial num, std::vector<int> twice_exponents);

  static FactoredRational constant(Basis basis, const mpq_class& c);
  static FactoredRational polynomial(Basis basis, const Polynomial& p);
  /// f_index ^ (twice_exponent / 2).
  static FactoredRational factor_power(Basis basis, std::size_t index, int twice_exponent);

  const Polynomial& numerator() const { return num_; }
  const std::vector<int>& twice_exponents() const { return exp2_; }
  const Basis& basis() const { return basis_; }
  bool is_zero() const { return num_.is_zero(); }

  FactoredRational derivative() const;
  /// Square root; requires a numerator equal to 1 (all content in the basis).
  FactoredRational sqrt() const;

  friend FactoredRational operator*(const FactoredRational& p, const FactoredRational& q);
  friend FactoredRational operator*(const mpq_class& s, const FactoredRational& p);
  /// Division by a term whose numerator is a nonzero constant.
  friend FactoredRational operator/(const FactoredRational& p, const FactoredRational& q);
  /// Sum; throws if some factor appears with exponents of different half-parity.
  friend FactoredRational operator+(const FactoredRational& p, const FactoredRational& q);
  friend FactoredRational operator-(const FactoredRational& p, const FactoredRational& q);

  double evaluate(double r) const;
  /// Exact value; requires all exponents integral.
  mpq_class evaluate_exact(const mpq_class& r) const;
  /// (numerator, denominator) polynomials; requires all exponents integral.
  std::pair<Polynomial, Polynomial> as_fraction() const;
  /// True when both sides are the same rational function (cross-multiplied).
  bool same_function(const FactoredRational& other) const;

 private:
  void normalize();
  Basis basis_;
  Polynomial num_;
  std::vector<int> exp2_;
};

/// Exact rational from a binary64 value.
mpq_class exact(double v);

}  // namespace kerrlab
