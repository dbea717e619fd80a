// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace qoe {

/// Exact fraction with a positive denominator, always stored in lowest terms.
/// Intermediate products are widened to 128 bits; results that no longer fit
/// in 64 bits throw.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }

  double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// Nearest integer, halves rounded towards +infinity.
  std::int64_t round_half_up() const;
  std::int64_t floor() const;

  /// Closest fraction with denominator 10^digits (then reduced), e.g. 1.1 -> 11/10.
  static Rational from_decimal(double value, int digits = 6);

  /// Parses "25", "25/1" or "30000/1001".
  static Rational parse(const std::string& text);
  std::string str() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational& operator+=(const Rational& other) { return *this = *this + other; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// round(numerator / denominator) with halves rounded up; denominator > 0.
std::int64_t round_div(__int128 numerator, __int128 denominator);

}  // namespace qoe
