#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace maxlab {

/// Exact rational with int64 numerator/denominator, kept in lowest terms.
/// Intermediate products use 128-bit arithmetic; results that do not fit
/// throw std::overflow_error rather than wrapping.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit on purpose
  Rational(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  Rational abs() const { return num_ < 0 ? Rational(-num_, den_) : *this; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  long double to_ldouble() const {
    return static_cast<long double>(num_) / static_cast<long double>(den_);
  }

  /// "p/q" form, always with an explicit denominator.
  std::string str() const;
  /// Accepts "p", "p/q", or a finite decimal like "0.25".
  static Rational parse(const std::string& s);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const { return Rational(-num_, den_); }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  static Rational from_wide(__int128 n, __int128 d);
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

Rational rmin(const Rational& a, const Rational& b);
Rational rmax(const Rational& a, const Rational& b);

}  // namespace maxlab
