#include "kerrlab/rational_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kerrlab/error.hpp"

namespace kerrlab {

mpq_class exact(double v) {
  require(std::isfinite(v), "exact rational conversion of a non-finite value");
  mpq_class q;
  mpq_set_d(q.get_mpq_t(), v);
  return q;
}

// ---------------------------------------------------------------- Polynomial

Polynomial::Polynomial(std::vector<mpq_class> coeffs) : c_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::constant(const mpq_class& c) { return Polynomial({c}); }

Polynomial Polynomial::identity() { return Polynomial({mpq_class(0), mpq_class(1)}); }

void Polynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

mpq_class Polynomial::coeff(int k) const {
  if (k < 0 || k >= static_cast<int>(c_.size())) return 0;
  return c_[static_cast<std::size_t>(k)];
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<mpq_class> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<long>(k);
  return Polynomial(std::move(d));
}

mpq_class Polynomial::evaluate(const mpq_class& x) const {
  mpq_class acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::shifted(const mpq_class& c) const {
  // Horner with polynomial arithmetic: p(x + c)
  const Polynomial lin({c, mpq_class(1)});
  Polynomial acc;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + constant(*it);
  return acc;
}

Polynomial operator+(const Polynomial& p, const Polynomial& q) {
  std::vector<mpq_class> c(std::max(p.c_.size(), q.c_.size()));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = p.coeff(static_cast<int>(k)) + q.coeff(static_cast<int>(k));
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& p, const Polynomial& q) { return p + mpq_class(-1) * q; }

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) return {};
  std::vector<mpq_class> c(p.c_.size() + q.c_.size() - 1);
  for (std::size_t i = 0; i < p.c_.size(); ++i)
    for (std::size_t j = 0; j < q.c_.size(); ++j) c[i + j] += p.c_[i] * q.c_[j];
  return Polynomial(std::move(c));
}

Polynomial operator*(const mpq_class& s, const Polynomial& p) {
  std::vector<mpq_class> c(p.c_);
  for (auto& v : c) v *= s;
  return Polynomial(std::move(c));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& num, const Polynomial& den) {
  if (den.is_zero()) throw std::domain_error("polynomial division by zero");
  std::vector<mpq_class> rem(num.c_);
  const int dd = den.degree();
  const int dn = num.degree();
  if (dn < dd) return {Polynomial{}, num};
  std::vector<mpq_class> quot(static_cast<std::size_t>(dn - dd + 1));
  const mpq_class lead = den.c_.back();
  for (int k = dn - dd; k >= 0; --k) {
    const mpq_class q = rem[static_cast<std::size_t>(k + dd)] / lead;
    quot[static_cast<std::size_t>(k)] = q;
    if (q == 0) continue;
    for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(k + j)] -= q * den.c_[static_cast<std::size_t>(j)];
  }
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

// ---------------------------------------------------------- FactoredRational

FactoredRational::FactoredRational(Basis basis, Polynomial num, std::vector<int> twice_exponents)
    : basis_(std::move(basis)), num_(std::move(num)), exp2_(std::move(twice_exponents)) {
  if (!basis_) throw std::invalid_argument("FactoredRational needs a basis");
  exp2_.resize(basis_->factors.size(), 0);
  normalize();
}

FactoredRational FactoredRational::constant(Basis basis, const mpq_class& c) {
  return {std::move(basis), Polynomial::constant(c), {}};
}

FactoredRational FactoredRational::polynomial(Basis basis, const Polynomial& p) {
  return {std::move(basis), p, {}};
}

FactoredRational FactoredRational::factor_power(Basis basis, std::size_t index, int twice_exponent) {
  std::vector<int> e(basis->factors.size(), 0);
  e.at(index) = twice_exponent;
  return {std::move(basis), Polynomial::constant(1), std::move(e)};
}

void FactoredRational::normalize() {
  if (num_.is_zero()) {
    std::fill(exp2_.begin(), exp2_.end(), 0);
    return;
  }
  for (std::size_t i = 0; i < exp2_.size(); ++i) {
    const Polynomial& f = basis_->factors[i];
    if (f.is_constant()) continue;
    while (num_.degree() >= f.degree()) {
      auto [q, r] = Polynomial::divmod(num_, f);
      if (!r.is_zero()) break;
      num_ = std::move(q);
      exp2_[i] += 2;
    }
  }
}

FactoredRational FactoredRational::derivative() const {
  if (is_zero()) return *this;
  const auto& f = basis_->factors;
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < exp2_.size(); ++i)
    if (exp2_[i] != 0) active.push_back(i);

  auto product_except = [&](std::size_t skip) {
    Polynomial p = Polynomial::constant(1);
    for (std::size_t j : active)
      if (j != skip) p = p * f[j];
    return p;
  };

  Polynomial num = num_.derivative() * product_except(static_cast<std::size_t>(-1));
  for (std::size_t i : active) {
    mpq_class k(exp2_[i]);
    k /= 2;
    num = num + k * (num_ * f[i].derivative() * product_except(i));
  }
  std::vector<int> e(exp2_);
  for (std::size_t i : active) e[i] -= 2;
  return {basis_, std::move(num), std::move(e)};
}

FactoredRational FactoredRational::sqrt() const {
  if (!(num_ == Polynomial::constant(1)))
    throw std::domain_error("sqrt of a factored rational requires unit numerator");
  std::vector<int> e(exp2_);
  for (int& k : e) {
    if (k % 2 != 0) throw std::domain_error("sqrt would need quarter exponents");
    k /= 2;
  }
  return {basis_, num_, std::move(e)};
}

FactoredRational operator*(const FactoredRational& p, const FactoredRational& q) {
  std::vector<int> e(p.exp2_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += q.exp2_[i];
  return {p.basis_, p.num_ * q.num_, std::move(e)};
}

FactoredRational operator*(const mpq_class& s, const FactoredRational& p) {
  return {p.basis_, s * p.num_, p.exp2_};
}

FactoredRational operator/(const FactoredRational& p, const FactoredRational& q) {
  if (!q.num_.is_constant() || q.num_.is_zero())
    throw std::domain_error("division requires a nonzero constant numerator in the divisor");
  std::vector<int> e(p.exp2_);
  for (std::size_t i = 0; i < e.size(); ++i) e[i] -= q.exp2_[i];
  const mpq_class inv = 1 / q.num_.coeff(0);
  return {p.basis_, inv * p.num_, std::move(e)};
}

FactoredRational operator+(const FactoredRational& p, const FactoredRational& q) {
  if (p.is_zero()) return q;
  if (q.is_zero()) return p;
  const auto& f = p.basis_->factors;
  std::vector<int> e(p.exp2_.size());
  Polynomial np = p.num_, nq = q.num_;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const int lo = std::min(p.exp2_[i], q.exp2_[i]);
    const int dp = p.exp2_[i] - lo, dq = q.exp2_[i] - lo;
    if (dp % 2 != 0 || dq % 2 != 0)
      throw std::domain_error("sum of terms with mismatched half-integer powers of " + p.basis_->names[i]);
    for (int k = 0; k < dp / 2; ++k) np = np * f[i];
    for (int k = 0; k < dq / 2; ++k) nq = nq * f[i];
    e[i] = lo;
  }
  return {p.basis_, np + nq, std::move(e)};
}

FactoredRational operator-(const FactoredRational& p, const FactoredRational& q) {
  return p + mpq_class(-1) * q;
}

double FactoredRational::evaluate(double r) const {
  if (is_zero()) return 0.0;
  const mpq_class x = exact(r);
  long double value = num_.evaluate(x).get_d();
  for (std::size_t i = 0; i < exp2_.size(); ++i) {
    if (exp2_[i] == 0) continue;
    const long double fi = basis_->factors[i].evaluate(x).get_d();
    if (exp2_[i] % 2 == 0) {
      value *= std::pow(fi, static_cast<long double>(exp2_[i] / 2));
    } else {
      value *= std::pow(fi, static_cast<long double>(exp2_[i]) / 2.0L);
    }
  }
  return static_cast<double>(value);
}

mpq_class FactoredRational::evaluate_exact(const mpq_class& r) const {
  mpq_class value = num_.evaluate(r);
  for (std::size_t i = 0; i < exp2_.size(); ++i) {
    if (exp2_[i] % 2 != 0) throw std::domain_error("exact evaluation with half-integer exponent");
    const mpq_class fi = basis_->factors[i].evaluate(r);
    const int k = exp2_[i] / 2;
    for (int j = 0; j < std::abs(k); ++j) {
      if (k > 0)
        value *= fi;
      else
        value /= fi;
    }
  }
  return value;
}

std::pair<Polynomial, Polynomial> FactoredRational::as_fraction() const {
  Polynomial num = num_, den = Polynomial::constant(1);
  for (std::size_t i = 0; i < exp2_.size(); ++i) {
    if (exp2_[i] % 2 != 0) throw std::domain_error("as_fraction with half-integer exponent");
    const int k = exp2_[i] / 2;
    for (int j = 0; j < std::abs(k); ++j) {
      if (k > 0) num = num * basis_->factors[i];
      else den = den * basis_->factors[i];
    }
  }
  return {num, den};
}

bool FactoredRational::same_function(const FactoredRational& other) const {
  if (is_zero() || other.is_zero()) return is_zero() && other.is_zero();
  for (std::size_t i = 0; i < exp2_.size(); ++i) {
    if ((exp2_[i] - other.exp2_[i]) % 2 != 0) return false;
  }
  if (std::any_of(exp2_.begin(), exp2_.end(), [](int e) { return e % 2 != 0; }))
    return (*this + mpq_class(-1) * other).is_zero();
  const auto [n1, d1] = as_fraction();
  const auto [n2, d2] = other.as_fraction();
  return n1 * d2 == n2 * d1;
}

}  // namespace kerrlab
