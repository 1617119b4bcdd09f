#include "opbessel/adjoint.hpp"

#include <cmath>

namespace opbessel {

namespace {

template <class T>
Operator<Complex> bch_series_impl(const AdjointContext<T>& ctx, const Operator<T>& a0, double t,
                                  std::size_t degree) {
  if (!std::isfinite(t)) throw std::domain_error("bch_series: non-finite t");
  Operator<Complex> sum = to_complex(a0);
  Operator<T> ad = a0;
  Complex coeff{1.0, 0.0};
  const Complex it{0.0, t};
  for (std::size_t n = 1; n <= degree; ++n) {
    ad = ctx.apply(ad);
    coeff *= it / static_cast<double>(n);
    sum.add_scaled(coeff, to_complex(ad));
  }
  return sum;
}

template <class T>
Operator<Complex> bch_conjugate_impl(const AdjointContext<T>& ctx, const Operator<T>& a0, double t,
                                     double tol) {
  const Operator<Complex> itl = to_complex(ctx.generator()) * Complex{0.0, t};
  const Operator<Complex> left = operator_exp(itl, tol);
  const Operator<Complex> right = operator_exp(-itl, tol);
  return left * to_complex(a0) * right;
}

}  // namespace

Operator<Complex> bch_series(const AdjointContext<double>& ctx, const Operator<double>& a0,
                             double t, std::size_t degree) {
  return bch_series_impl(ctx, a0, t, degree);
}

Operator<Complex> bch_series(const AdjointContext<Complex>& ctx, const Operator<Complex>& a0,
                             double t, std::size_t degree) {
  return bch_series_impl(ctx, a0, t, degree);
}

Operator<Complex> bch_series(const AdjointContext<Rational>&, const Operator<Rational>&,
                             const Rational&, std::size_t) {
  throw std::domain_error("bch_series: exact mode does not support the imaginary coefficient (it)^n");
}

Operator<Complex> bch_conjugate(const AdjointContext<double>& ctx, const Operator<double>& a0,
                                double t, double tol) {
  return bch_conjugate_impl(ctx, a0, t, tol);
}

Operator<Complex> bch_conjugate(const AdjointContext<Complex>& ctx, const Operator<Complex>& a0,
                                double t, double tol) {
  return bch_conjugate_impl(ctx, a0, t, tol);
}

Operator<Complex> harmonic_solution(const AdjointContext<double>& ctx, const Operator<double>& a0,
                                    const Operator<double>& b0, double t, std::size_t degree) {
  if (degree < 2) throw std::invalid_argument("harmonic_solution: degree must be at least 2");
  return bch_series(ctx, a0, t, degree) + bch_series(ctx, b0, -t, degree);
}

double bch_tail_bound(double t, double l_norm, double a0_norm, std::size_t degree) {
  // ||ad_L^n A|| <= (2||L||)^n ||A||.
  const double x = 2.0 * std::abs(t) * l_norm;
  double term = 1.0;
  for (std::size_t n = 1; n <= degree; ++n) term *= x / static_cast<double>(n);
  double tail = 0.0;
  for (std::size_t n = degree + 1; n < degree + 2000; ++n) {
    term *= x / static_cast<double>(n);
    tail += term;
    if (term <= kUnitRoundoff * tail * 1e-3 || term == 0.0) break;
  }
  return tail * a0_norm;
}

std::optional<std::size_t> bch_coefficient_mismatch(const AdjointContext<Rational>& ctx,
                                                    const Operator<Rational>& a0,
                                                    std::size_t degree) {
  std::vector<Rational> inv_fact(degree + 1);
  for (std::size_t k = 0; k <= degree; ++k) inv_fact[k] = Rational(1, factorial(static_cast<unsigned>(k)));

  const auto ladder = ctx.power_ladder(a0, degree);
  for (std::size_t n = 0; n <= degree; ++n) {
    const Operator<Rational> lhs = ladder[n] * inv_fact[n];
    Operator<Rational> rhs(a0.dim());
    for (std::size_t k = 0; k <= n; ++k) {
      Rational c = inv_fact[n - k] * inv_fact[k];
      if (k % 2 == 1) c = -c;
      rhs.add_scaled(c, ctx.power(n - k) * a0 * ctx.power(k));
    }
    if (!(lhs == rhs)) return n;
  }
  return std::nullopt;
}

}  // namespace opbessel
