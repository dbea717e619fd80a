// SPDX-License-Identifier: Apache-2.0

#include "qoe/rational.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "qoe/error.hpp"

namespace qoe {
namespace {

using Wide = __int128;

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t narrow(Wide value) {
  if (value > std::numeric_limits<std::int64_t>::max() || value < std::numeric_limits<std::int64_t>::min()) {
    fail(ErrorKind::invalid_argument, "rational arithmetic overflow");
  }
  return static_cast<std::int64_t>(value);
}

Rational make(Wide num, Wide den) {
  if (den == 0) fail(ErrorKind::invalid_argument, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const Wide g = wide_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational(narrow(num), narrow(den));
}

Wide floor_div(Wide a, Wide b) {
  Wide q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

std::int64_t round_div(__int128 numerator, __int128 denominator) {
  if (denominator <= 0) fail(ErrorKind::invalid_argument, "round_div needs a positive denominator");
  // floor((2n + d) / 2d) == floor(n/d + 1/2)
  return narrow(floor_div(2 * numerator + denominator, 2 * denominator));
}

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) fail(ErrorKind::invalid_argument, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

std::int64_t Rational::round_half_up() const { return round_div(num_, den_); }

std::int64_t Rational::floor() const { return narrow(floor_div(num_, den_)); }

Rational Rational::from_decimal(double value, int digits) {
  if (!std::isfinite(value)) fail(ErrorKind::invalid_argument, "non-finite decimal value");
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  return Rational(static_cast<std::int64_t>(std::llround(value * static_cast<double>(scale))), scale);
}

Rational Rational::parse(const std::string& text) {
  try {
    std::size_t used = 0;
    const auto slash = text.find('/');
    const std::int64_t num = std::stoll(text.substr(0, slash), &used);
    if (used != (slash == std::string::npos ? text.size() : slash)) throw std::invalid_argument(text);
    if (slash == std::string::npos) return Rational(num);
    const std::string den_text = text.substr(slash + 1);
    const std::int64_t den = std::stoll(den_text, &used);
    if (used != den_text.size() || den <= 0) throw std::invalid_argument(text);
    return Rational(num, den);
  } catch (const std::logic_error&) {
    fail(ErrorKind::parse_error, "malformed rational '" + text + "'");
  }
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational operator+(const Rational& a, const Rational& b) {
  return make(Wide{a.num_} * b.den_ + Wide{b.num_} * a.den_, Wide{a.den_} * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return make(Wide{a.num_} * b.den_ - Wide{b.num_} * a.den_, Wide{a.den_} * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return make(Wide{a.num_} * b.num_, Wide{a.den_} * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) fail(ErrorKind::invalid_argument, "division by zero rational");
  return make(Wide{a.num_} * b.den_, Wide{a.den_} * b.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  const Wide lhs = Wide{a.num_} * b.den_;
  const Wide rhs = Wide{b.num_} * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace qoe
