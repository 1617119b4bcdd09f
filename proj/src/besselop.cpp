#include "opbessel/besselop.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace opbessel {

Rational bessel_coefficient(int m, int n) {
  if (n < 0 || (n - m) % 2 != 0) return 0;
  const int a = (n + m) / 2;
  const int b = (n - m) / 2;
  if (a < 0 || b < 0) return 0;
  BigInt den = factorial(static_cast<unsigned>(a)) * factorial(static_cast<unsigned>(b));
  den <<= static_cast<mp_bitcnt_t>(n);
  Rational c(b % 2 == 0 ? BigInt(1) : BigInt(-1), den);
  c.canonicalize();
  return c;
}

namespace {

// log of scale * rate^p / (j! (j+order)!), with rate = 0 handled.
double log_term(double log_rate, int p, int j, int order) {
  return p * log_rate - std::lgamma(j + 1.0) - std::lgamma(j + order + 1.0);
}

double falling_factorial(int n, int k) {
  double f = 1.0;
  for (int i = 0; i < k; ++i) f *= (n - i);
  return f;
}

// sum over j >= j0 of f(j), where the summand eventually decays faster
// than geometrically; stops once terms are negligible and decreasing.
template <class Term>
double sum_decaying(int j0, Term term) {
  double sum = 0.0;
  double prev = INFINITY;
  for (int j = j0; j < j0 + 100000; ++j) {
    const double v = term(j);
    sum += v;
    if (v == 0.0 || (v < prev && v <= 1e-3 * kUnitRoundoff * sum)) break;
    prev = v;
  }
  return sum;
}

}  // namespace

double BesselMajorant::coefficient(int n) const {
  const int p = n - shift;
  const int e = p - order;
  if (e < 0 || e % 2 != 0 || scale == 0.0) return 0.0;
  const int j = e / 2;
  if (rate == 0.0) return p == 0 ? scale / std::tgamma(order + 1.0) : 0.0;
  return scale * std::exp(log_term(std::log(rate), p, j, order));
}

double BesselMajorant::tail(double t, int degree, int deriv) const {
  if (scale == 0.0) return 0.0;
  const double at = std::abs(t);
  // Smallest j with n = shift + order + 2j > degree and n >= deriv.
  const int first_n = std::max(degree + 1, deriv);
  int j0 = 0;
  while (shift + order + 2 * j0 < first_n) ++j0;
  return sum_decaying(j0, [&](int j) {
    const int n = shift + order + 2 * j;
    const double c = coefficient(n);
    if (c == 0.0) return 0.0;
    const int e = n - deriv;
    const double tp = e == 0 ? 1.0 : (at == 0.0 ? 0.0 : std::pow(at, e));
    return c * falling_factorial(n, deriv) * tp;
  });
}

double BesselMajorant::total(double t, int deriv) const { return tail(t, -1, deriv); }

double bessel_norm_tail(double z, int k, int degree) {
  k = std::abs(k);
  BesselMajorant m{1.0, z, k, 0};
  // coefficient(n) * 1^n summed: use t = 1 with rate = z.
  return m.tail(1.0, degree, 0);
}

Operator<double> generating_oracle(const Operator<double>& x, int m, double t, std::size_t nodes) {
  if (nodes < 8) throw std::invalid_argument("generating_oracle: at least 8 nodes required");
  if (!std::isfinite(t) || !x.is_finite()) throw std::domain_error("generating_oracle: non-finite input");
  const std::size_t n = x.dim();
  const Operator<Complex> xc = to_complex(x);
  Operator<Complex> acc(n);
  const double h = 2.0 * std::numbers::pi / static_cast<double>(nodes);
  for (std::size_t q = 0; q < nodes; ++q) {
    const double theta = h * static_cast<double>(q);
    const Operator<Complex> e = operator_exp(xc * Complex(0.0, t * std::sin(theta)), 1e-15);
    acc.add_scaled(std::polar(1.0, -m * theta), e);
  }
  acc *= Complex(1.0 / static_cast<double>(nodes), 0.0);
  if (!acc.is_finite()) throw std::domain_error("generating_oracle: non-finite quadrature");
  const Operator<double> re = real_part(acc);
  const double residue = frobenius(imag_part(acc));
  if (residue > 1e-12 * std::max(1.0, frobenius(re)))
    throw std::domain_error("generating_oracle: imaginary residue " + std::to_string(residue) +
                            " exceeds 1e-12");
  return re;
}

std::string_view to_string(BesselRelation rel) {
  switch (rel) {
    case BesselRelation::negative_index: return "negative_index";
    case BesselRelation::recurrence_2k: return "recurrence_2k";
    case BesselRelation::derivative_diff: return "derivative_diff";
    case BesselRelation::positive_derivative: return "positive_derivative";
    case BesselRelation::negative_derivative: return "negative_derivative";
  }
  return "?";
}

std::string_view identity_of(BesselRelation rel) {
  switch (rel) {
    case BesselRelation::negative_index: return "J_{-k}(tL) = (-1)^k J_k(tL)";
    case BesselRelation::recurrence_2k: return "2k J_k(tL) = tL[J_{k-1}(tL) + J_{k+1}(tL)]";
    case BesselRelation::derivative_diff: return "2 d/dt J_k(tL) = L[J_{k-1}(tL) - J_{k+1}(tL)]";
    case BesselRelation::positive_derivative: return "d/dt[t^k J_k(tL)] = L t^k J_{k-1}(tL)";
    case BesselRelation::negative_derivative: return "d/dt[t^{-k} J_k(tL)] = -L t^{-k} J_{k+1}(tL)";
  }
  return "?";
}

BesselRelation parse_bessel_relation(std::string_view text) {
  for (auto rel : kAllBesselRelations)
    if (to_string(rel) == text) return rel;
  throw std::invalid_argument("unknown Bessel relation '" + std::string(text) + "'");
}

namespace detail {

std::string format_k(int k) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "k=%+03d", k);
  return buf;
}

}  // namespace detail

}  // namespace opbessel
