#pragma once
// Univariate polynomials with exact rational coefficients.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace dyadic {

using Rational = boost::multiprecision::cpp_rational;

// Parses "p/q", an integer, or a finite decimal ("0.125", "-3e-2") exactly.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
double to_double(const Rational& q);

class Polynomial {
 public:
  Polynomial() = default;
  // coeffs[j] multiplies x^j
  explicit Polynomial(std::vector<Rational> coeffs);
  static Polynomial constant(const Rational& c);
  static Polynomial monomial(const Rational& c, std::size_t degree);
  static Polynomial linear(const Rational& slope, const Rational& intercept);

  // Degree of the zero polynomial is reported as 0; see is_zero().
  std::size_t degree() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<Rational>& coeffs() const { return coeffs_; }
  Rational coeff(std::size_t j) const { return j < coeffs_.size() ? coeffs_[j] : Rational(0); }

  Rational operator()(const Rational& x) const;
  double eval(double x) const;
  // Rounding-error bound of eval(x) from Horner in double precision.
  double eval_error_bound(double x) const;

  Polynomial derivative() const;
  // this(inner(x))
  Polynomial compose(const Polynomial& inner) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const Rational& s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

  // Upper bound of |p'(x)| on [lo, hi] from coefficient magnitudes.
  double lipschitz_bound(double lo, double hi) const;

  std::string to_string() const;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

}  // namespace dyadic
