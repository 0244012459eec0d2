#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace sdym {

/// Exact rational number with 64-bit numerator/denominator.
///
/// Intermediate products are formed in 128 bits and reduced; a result whose
/// reduced form does not fit in 64 bits throws std::overflow_error.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

  std::string to_string() const;

 private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Exact complex rational re + i*im; the scalar field of every coefficient.
class Coefficient {
 public:
  constexpr Coefficient() = default;
  Coefficient(Rational re, Rational im = Rational(0)) : re_(re), im_(im) {}
  Coefficient(std::int64_t n) : re_(n) {}

  static Coefficient imaginary_unit() { return {Rational(0), Rational(1)}; }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
  bool is_real() const { return im_.is_zero(); }
  bool is_one() const { return re_ == Rational(1) && im_.is_zero(); }

  Coefficient operator-() const { return {-re_, -im_}; }
  Coefficient& operator+=(const Coefficient& o);
  Coefficient& operator-=(const Coefficient& o);
  Coefficient& operator*=(const Coefficient& o);
  Coefficient& operator/=(const Coefficient& o);

  friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
  friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }
  friend Coefficient operator*(Coefficient a, const Coefficient& b) { return a *= b; }
  friend Coefficient operator/(Coefficient a, const Coefficient& b) { return a /= b; }

  friend bool operator==(const Coefficient&, const Coefficient&) = default;
  friend std::strong_ordering operator<=>(const Coefficient& a, const Coefficient& b);

  /// "3", "-1/2", "2i", "(1-3i)"; a purely real or purely imaginary value
  /// carries no parentheses.
  std::string to_string() const;

 private:
  Rational re_;
  Rational im_;
};

}  // namespace sdym
