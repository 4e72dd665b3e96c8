#include "dyadic/polynomial.hpp"

#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "dyadic/errors.hpp"

namespace dyadic {

namespace {

using boost::multiprecision::cpp_int;

cpp_int pow10(long e) {
  cpp_int r = 1;
  for (long i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(std::string_view s) {
  std::size_t i = 0;
  bool neg = false;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
  cpp_int mant = 0;
  long frac_digits = 0;
  bool any = false;
  bool dot = false;
  for (; i < s.size(); ++i) {
    const char ch = s[i];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      mant = mant * 10 + (ch - '0');
      if (dot) ++frac_digits;
      any = true;
    } else if (ch == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) throw InvalidArgument("not a number: '" + std::string(s) + "'");
  long exp = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    const std::string rest(s.substr(i));
    std::size_t used = 0;
    try {
      exp = std::stol(rest, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad exponent in '" + std::string(s) + "'");
    }
    i += used;
  }
  if (i != s.size()) throw InvalidArgument("trailing characters in '" + std::string(s) + "'");
  exp -= frac_digits;
  Rational q = exp >= 0 ? Rational(mant * pow10(exp)) : Rational(mant, pow10(-exp));
  return neg ? Rational(-q) : q;
}

std::string_view trim_ws(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2.0;

}  // namespace

Rational parse_rational(std::string_view text) {
  text = trim_ws(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text);
  const Rational num = parse_decimal(trim_ws(text.substr(0, slash)));
  const Rational den = parse_decimal(trim_ws(text.substr(slash + 1)));
  if (den == 0) throw InvalidArgument("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q);
  if (boost::multiprecision::denominator(q) != 1) os << '/' << boost::multiprecision::denominator(q);
  return os.str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

Polynomial::Polynomial(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::constant(const Rational& c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(const Rational& c, std::size_t degree) {
  std::vector<Rational> v(degree + 1);
  v[degree] = c;
  return Polynomial(std::move(v));
}

Polynomial Polynomial::linear(const Rational& slope, const Rational& intercept) {
  return Polynomial({intercept, slope});
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

Rational Polynomial::operator()(const Rational& x) const {
  Rational acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::eval(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + to_double(*it);
  return acc;
}

double Polynomial::eval_error_bound(double x) const {
  // Horner over degree d costs 2d roundings; coefficient conversion adds up to an ulp each.
  const double ax = std::fabs(x);
  double mag = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) mag = mag * ax + std::fabs(to_double(*it));
  const double k = 2.0 * static_cast<double>(degree()) + 4.0;
  const double gamma = k * kUnitRoundoff / (1.0 - k * kUnitRoundoff);
  return gamma * mag * (1.0 + 1e-10) + std::numeric_limits<double>::denorm_min();
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return {};
  std::vector<Rational> d(coeffs_.size() - 1);
  for (std::size_t j = 1; j < coeffs_.size(); ++j) d[j - 1] = coeffs_[j] * static_cast<long>(j);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::compose(const Polynomial& inner) const {
  Polynomial acc;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= inner;
    acc += constant(*it);
  }
  return acc;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t j = 0; j < o.coeffs_.size(); ++j) coeffs_[j] += o.coeffs_[j];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size());
  for (std::size_t j = 0; j < o.coeffs_.size(); ++j) coeffs_[j] -= o.coeffs_[j];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
  if (coeffs_.empty() || o.coeffs_.empty()) {
    coeffs_.clear();
    return *this;
  }
  std::vector<Rational> r(coeffs_.size() + o.coeffs_.size() - 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) r[i + j] += coeffs_[i] * o.coeffs_[j];
  }
  coeffs_ = std::move(r);
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
  for (auto& c : coeffs_) c *= s;
  trim();
  return *this;
}

double Polynomial::lipschitz_bound(double lo, double hi) const {
  const double r = std::max(std::fabs(lo), std::fabs(hi));
  double acc = 0.0;
  double rp = 1.0;
  for (std::size_t j = 1; j < coeffs_.size(); ++j) {
    acc += static_cast<double>(j) * std::fabs(to_double(coeffs_[j])) * rp;
    rp *= r;
  }
  // outward: each double op above rounds by at most one ulp
  const double k = 3.0 * static_cast<double>(coeffs_.size()) + 2.0;
  return acc * (1.0 + k * kUnitRoundoff * 2.0);
}

std::string Polynomial::to_string() const {
  if (coeffs_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t j = coeffs_.size(); j-- > 0;) {
    if (coeffs_[j] == 0) continue;
    if (!first) os << " + ";
    os << "(" << dyadic::to_string(coeffs_[j]) << ")";
    if (j >= 1) os << "*x";
    if (j >= 2) os << "^" << j;
    first = false;
  }
  return os.str();
}

}  // namespace dyadic
