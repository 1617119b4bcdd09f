#pragma once

// Operator Bessel coefficients J_m(tX): the z^m coefficients of
// exp((t/2) X (z - 1/z)), as truncated series in t.

#include "opbessel/opcore.hpp"
#include "opbessel/report.hpp"
#include "opbessel/series.hpp"

#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>

namespace opbessel {

/// Coefficient of t^n X^n in J_m(tX):
///   (-1)^b / (a! b!) * 2^{-n},  a - b = m,  a + b = n,
/// and zero when no such a, b >= 0 exist. Valid for every integer m.
Rational bessel_coefficient(int m, int n);

/// sum_j z^{k+2j} / (j! (j+k)!) over k + 2j > degree (degree = -1 gives the
/// full sum, which is I_k(2z)). Bounds ||J_k(tX)|| in the operator 2-norm
/// with z = |t| ||X|| / 2.
double bessel_norm_tail(double z, int k, int degree);
inline double bessel_norm_majorant(double z, int k) { return bessel_norm_tail(z, std::abs(k), -1); }

/// Truncated J_m(tX) through t^degree. Negative orders are expanded from
/// the generating function directly, not from the sign rule, so the sign
/// rule remains a checkable identity. When degree < |m| the result is the
/// zero series with its truncation warning set.
template <Field T>
OperatorSeries<T> bessel_series(const Operator<T>& x, int m, std::size_t degree) {
  const std::size_t n = x.dim();
  OperatorSeries<T> s(n, degree);
  const std::size_t order = static_cast<std::size_t>(std::abs(m));
  Operator<T> power = Operator<T>::identity(n);
  for (std::size_t p = 0; p <= degree; ++p) {
    if (p > 0) power = power * x;
    if (p >= order && (p - order) % 2 == 0) {
      const Rational c = bessel_coefficient(m, static_cast<int>(p));
      s.set_coeff(p, power * ScalarTraits<T>::from_rational(c));
    }
  }
  s.set_majorant(BesselMajorant{1.0, frobenius(x) / 2.0, static_cast<int>(order), 0});
  s.set_truncation_warning(degree < order);
  return s;
}

/// Fourier-coefficient oracle: J_m(tX) = (1/2pi) int_0^{2pi} exp(i t X sin th) e^{-i m th} dth,
/// by the uniform trapezoid rule with `nodes` points. The imaginary part is
/// verified to be below 1e-12 (relative) before it is dropped.
Operator<double> generating_oracle(const Operator<double>& x, int m, double t, std::size_t nodes);

enum class BesselRelation {
  negative_index,       ///< J_{-k} = (-1)^k J_k
  recurrence_2k,        ///< 2k J_k = tL (J_{k-1} + J_{k+1})
  derivative_diff,      ///< 2 J_k' = L (J_{k-1} - J_{k+1})
  positive_derivative,  ///< (t^k J_k)' = L t^k J_{k-1}
  negative_derivative,  ///< (t^{-k} J_k)' = -L t^{-k} J_{k+1}
};

inline constexpr BesselRelation kAllBesselRelations[] = {
    BesselRelation::negative_index, BesselRelation::recurrence_2k, BesselRelation::derivative_diff,
    BesselRelation::positive_derivative, BesselRelation::negative_derivative};

std::string_view to_string(BesselRelation rel);
std::string_view identity_of(BesselRelation rel);
BesselRelation parse_bessel_relation(std::string_view text);

namespace detail {

// t^{s} S for a signed shift; negative shifts require divisibility.
template <Field T>
OperatorSeries<T> times_t_power(const OperatorSeries<T>& s, int power) {
  return power >= 0 ? s.shift_up(static_cast<std::size_t>(power))
                    : s.shift_down(static_cast<std::size_t>(-power));
}

std::string format_k(int k);

}  // namespace detail

/// Checks one relation coefficient-wise for every k in [k_lo, k_hi].
/// Exact mode compares with zero tolerance; float mode allows
/// safety_factor times the rounding allowance. Throws std::invalid_argument
/// if some |k| + 2 > degree.
template <Field T>
VerificationReport check_recurrence(BesselRelation rel, const Operator<T>& l, std::size_t degree, int k_lo,
                                    int k_hi, double safety_factor = 10.0) {
  VerificationReport report;
  const int d = static_cast<int>(degree);
  for (int k = k_lo; k <= k_hi; ++k) {
    if (std::abs(k) + 2 > d)
      throw std::invalid_argument("check_recurrence: k = " + std::to_string(k) +
                                  " outside series support at degree " + std::to_string(degree));
  }

  auto J = [&](int m) { return bessel_series(l, m, degree); };
  for (int k = k_lo; k <= k_hi; ++k) {
    OperatorSeries<T> lhs, rhs;
    switch (rel) {
      case BesselRelation::negative_index: {
        lhs = J(-k);
        rhs = T(k % 2 == 0 ? 1 : -1) * J(k);
        break;
      }
      case BesselRelation::recurrence_2k: {
        lhs = T(2 * k) * J(k);
        rhs = (l * (J(k - 1) + J(k + 1))).shift_up(1);
        break;
      }
      case BesselRelation::derivative_diff: {
        lhs = T(2) * series_derivative(J(k));
        rhs = l * (J(k - 1) - J(k + 1));
        break;
      }
      case BesselRelation::positive_derivative: {
        lhs = series_derivative(detail::times_t_power(J(k), k));
        rhs = l * detail::times_t_power(J(k - 1), k);
        break;
      }
      case BesselRelation::negative_derivative: {
        lhs = series_derivative(detail::times_t_power(J(k), -k));
        rhs = T(-1) * (l * detail::times_t_power(J(k + 1), -k));
        break;
      }
    }
    const OperatorSeries<T> diff = lhs - rhs;
    const double residual = max_coefficient_norm(diff);
    double bound = 0.0;
    if constexpr (!is_exact_v<T>) {
      const double magnitude = std::max(max_coefficient_norm(lhs), max_coefficient_norm(rhs));
      bound = safety_factor * rounding_allowance(magnitude, static_cast<double>(degree + l.dim()));
    }
    report.add(required_check("bessel-recurrences", std::string(to_string(rel)) + "/" + detail::format_k(k),
                              std::string(identity_of(rel)), residual, bound,
                              "through degree " + std::to_string(diff.degree())));
  }
  return report;
}

}  // namespace opbessel
