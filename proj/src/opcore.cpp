#include "opbessel/opcore.hpp"

#include <cmath>

namespace opbessel {

Operator<Rational> to_exact(const Operator<double>& a) {
  return a.map<Rational>([](double x) { return rational_from_double(x); });
}

namespace {

template <class T>
Operator<T> exp_scaling_squaring(const Operator<T>& a, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("operator_exp: tolerance must be positive");
  if (!a.is_finite()) throw std::domain_error("operator_exp: non-finite entries");

  const std::size_t n = a.dim();
  const double norm = frobenius(a);

  // Scale so that ||B|| <= 1/2 with B = A / 2^s.
  int s = 0;
  if (norm > 0.5) s = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const double scale = std::ldexp(1.0, -s);
  Operator<T> b = a * T(scale);
  const double bnorm = norm * scale;

  // Squaring s times amplifies a per-step error by roughly 2^s e^{||A||};
  // the Taylor tail is sized against that amplification.
  const double amplification = std::ldexp(1.0, s) * std::exp(norm);
  const double step_tol = tol / std::max(1.0, amplification);

  Operator<T> sum = Operator<T>::identity(n);
  Operator<T> term = Operator<T>::identity(n);
  double term_bound = 1.0;  // ||B||^k / k!, majorant of the k-th term
  for (int k = 1; k < 200; ++k) {
    term = term * b;
    term *= T(1.0 / k);
    sum += term;
    term_bound *= bnorm / k;
    // Remaining tail is at most 2 * ||B||^{k+1}/(k+1)! because ||B|| <= 1/2.
    const double tail = 2.0 * term_bound * bnorm / (k + 1);
    if (tail <= step_tol) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;

  if (!sum.is_finite()) throw std::domain_error("operator_exp: overflow");
  return sum;
}

}  // namespace

Operator<double> operator_exp(const Operator<double>& a, double tol) {
  return exp_scaling_squaring(a, tol);
}

Operator<Complex> operator_exp(const Operator<Complex>& a, double tol) {
  return exp_scaling_squaring(a, tol);
}

}  // namespace opbessel
