#pragma once

// Scalar fields used by the operator layer: exact rationals (GMP) and
// float64, with complex float64 for exponential and quadrature oracles.

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace opbessel {

using Rational = mpq_class;
using BigInt = mpz_class;
using Complex = std::complex<double>;

/// Unit roundoff of IEEE binary64.
inline constexpr double kUnitRoundoff = 0x1p-53;

enum class ScalarMode { exact, float64 };

std::string_view to_string(ScalarMode mode);
ScalarMode parse_scalar_mode(std::string_view text);

/// Parses "p/q", "p" or a decimal literal such as "-0.25" into a canonical
/// rational. Throws std::invalid_argument on malformed input or zero
/// denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when q = 1).
std::string format_rational(const Rational& value);

/// Exact binary value of a finite double.
Rational rational_from_double(double value);

/// Smallest "nice" rational r with r*r >= q, within a few ulps of sqrt(q).
Rational sqrt_upper_bound(const Rational& q);

BigInt factorial(unsigned n);
BigInt binomial(unsigned n, unsigned k);

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr ScalarMode mode = ScalarMode::exact;
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational from_rational(const Rational& q) { return q; }
  static Rational from_integer(const BigInt& z) { return Rational(z); }
  static double magnitude(const Rational& x) { return std::abs(x.get_d()); }
  static double to_double(const Rational& x) { return x.get_d(); }
  static bool is_zero(const Rational& x) { return sgn(x) == 0; }
  static bool is_finite(const Rational&) { return true; }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr ScalarMode mode = ScalarMode::float64;
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double from_rational(const Rational& q) { return q.get_d(); }
  static double from_integer(const BigInt& z) { return z.get_d(); }
  static double magnitude(double x) { return std::abs(x); }
  static double to_double(double x) { return x; }
  static bool is_zero(double x) { return x == 0.0; }
  static bool is_finite(double x) { return std::isfinite(x); }
};

template <>
struct ScalarTraits<Complex> {
  static constexpr bool exact = false;
  static constexpr ScalarMode mode = ScalarMode::float64;
  static Complex zero() { return {0.0, 0.0}; }
  static Complex one() { return {1.0, 0.0}; }
  static Complex from_rational(const Rational& q) { return {q.get_d(), 0.0}; }
  static Complex from_integer(const BigInt& z) { return {z.get_d(), 0.0}; }
  static double magnitude(const Complex& x) { return std::abs(x); }
  static bool is_zero(const Complex& x) { return x == Complex{}; }
  static bool is_finite(const Complex& x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  }
};

template <class T>
inline constexpr bool is_exact_v = ScalarTraits<T>::exact;

template <class T>
concept Field = requires { ScalarTraits<T>::exact; };

}  // namespace opbessel
