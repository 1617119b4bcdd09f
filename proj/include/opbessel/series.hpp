#pragma once

// Truncated power series in t with operator coefficients.

#include "opbessel/adjoint.hpp"
#include "opbessel/opcore.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

namespace opbessel {

/// Coefficient majorant of Bessel type:
///   ||c_n|| <= scale * rate^(n - shift) / (j! (j + order)!)
/// for n = shift + order + 2j, and c_n = 0 otherwise.
/// Every Bessel-type series in this library admits a bound of this shape.
struct BesselMajorant {
  double scale = 0.0;
  double rate = 0.0;
  int order = 0;
  int shift = 0;

  /// Bound on ||c_n||.
  double coefficient(int n) const;

  /// sum_{n > degree} coefficient(n) * n!/(n-deriv)! * |t|^(n - deriv),
  /// i.e. a bound on the omitted part of the deriv-th derivative.
  double tail(double t, int degree, int deriv = 0) const;

  /// Same sum over every n >= 0; bounds the magnitude of the full series.
  double total(double t, int deriv = 0) const;
};

struct TailBound {
  double value = 0.0;
  double valid_for_t_up_to = 0.0;
};

/// sum_j c_j t^j for j = 0..degree. The degree records how far the
/// coefficients are known exactly: every operation tracks it so that a
/// derived series is exact through its own degree.
template <Field T>
class OperatorSeries {
 public:
  OperatorSeries() = default;

  OperatorSeries(std::size_t dim, std::size_t degree) : dim_(dim), coeffs_(degree + 1, Operator<T>(dim)) {}

  explicit OperatorSeries(std::vector<Operator<T>> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("OperatorSeries: no coefficients");
    dim_ = coeffs_.front().dim();
    for (const auto& c : coeffs_)
      if (c.dim() != dim_) throw std::invalid_argument("OperatorSeries: mixed coefficient dimensions");
  }

  /// The constant series c (degree given).
  static OperatorSeries constant(const Operator<T>& c, std::size_t degree) {
    OperatorSeries s(c.dim(), degree);
    s.coeffs_[0] = c;
    return s;
  }

  std::size_t dim() const { return dim_; }
  std::size_t degree() const { return coeffs_.size() - 1; }
  const Operator<T>& coeff(std::size_t j) const { return coeffs_.at(j); }
  const std::vector<Operator<T>>& coeffs() const { return coeffs_; }

  void set_coeff(std::size_t j, Operator<T> c) {
    if (c.dim() != dim_) throw std::invalid_argument("OperatorSeries: coefficient dimension mismatch");
    coeffs_.at(j) = std::move(c);
  }

  const std::optional<BesselMajorant>& majorant() const { return majorant_; }
  void set_majorant(std::optional<BesselMajorant> m) { majorant_ = m; }

  /// Set when the requested truncation leaves no nonzero coefficient.
  bool truncation_warning() const { return truncation_warning_; }
  void set_truncation_warning(bool w) { truncation_warning_ = w; }

  bool is_zero() const {
    for (const auto& c : coeffs_)
      if (!c.is_zero()) return false;
    return true;
  }

  /// Keeps coefficients 0..degree.
  OperatorSeries truncated(std::size_t degree) const {
    if (degree > this->degree()) throw std::invalid_argument("OperatorSeries: cannot extend by truncation");
    return OperatorSeries(std::vector<Operator<T>>(coeffs_.begin(), coeffs_.begin() + degree + 1));
  }

  friend OperatorSeries operator+(const OperatorSeries& a, const OperatorSeries& b) {
    return combine(a, b, [](Operator<T>& x, const Operator<T>& y) { x += y; });
  }

  friend OperatorSeries operator-(const OperatorSeries& a, const OperatorSeries& b) {
    return combine(a, b, [](Operator<T>& x, const Operator<T>& y) { x -= y; });
  }

  friend OperatorSeries operator*(const T& s, const OperatorSeries& a) {
    OperatorSeries r = a.stripped();
    for (auto& c : r.coeffs_) c *= s;
    return r;
  }

  /// X * S, coefficient-wise.
  friend OperatorSeries operator*(const Operator<T>& x, const OperatorSeries& a) {
    OperatorSeries r = a.stripped();
    for (auto& c : r.coeffs_) c = x * c;
    return r;
  }

  /// S * X, coefficient-wise.
  friend OperatorSeries operator*(const OperatorSeries& a, const Operator<T>& x) {
    OperatorSeries r = a.stripped();
    for (auto& c : r.coeffs_) c = c * x;
    return r;
  }

  /// Cauchy product, exact through min(deg a, deg b).
  friend OperatorSeries operator*(const OperatorSeries& a, const OperatorSeries& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("OperatorSeries: dimension mismatch");
    const std::size_t d = std::min(a.degree(), b.degree());
    OperatorSeries r(a.dim_, d);
    for (std::size_t i = 0; i <= d; ++i) {
      if (a.coeffs_[i].is_zero()) continue;
      for (std::size_t j = 0; i + j <= d; ++j) {
        if (b.coeffs_[j].is_zero()) continue;
        r.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
      }
    }
    return r;
  }

  /// Multiplication by t^s: index shift upwards, degree grows by s.
  OperatorSeries shift_up(std::size_t s) const {
    OperatorSeries r(dim_, degree() + s);
    for (std::size_t j = 0; j <= degree(); ++j) r.coeffs_[j + s] = coeffs_[j];
    return r;
  }

  /// Multiplication by t^{-s}. The dropped coefficients must be zero, so
  /// this never divides a series that is not divisible.
  OperatorSeries shift_down(std::size_t s) const {
    if (s > degree()) throw std::invalid_argument("OperatorSeries: shift exceeds degree");
    for (std::size_t j = 0; j < s; ++j)
      if (!coeffs_[j].is_zero()) throw std::domain_error("OperatorSeries: series not divisible by t^s");
    return OperatorSeries(std::vector<Operator<T>>(coeffs_.begin() + s, coeffs_.end()));
  }

  /// Horner evaluation at a point of the same field.
  Operator<T> evaluate(const T& t) const {
    Operator<T> acc = coeffs_.back();
    for (std::size_t j = degree(); j-- > 0;) {
      acc *= t;
      acc += coeffs_[j];
    }
    return acc;
  }

  /// Horner evaluation in float64 after converting coefficients.
  Operator<double> evaluate_float(double t) const {
    Operator<double> acc = to_float(coeffs_.back());
    for (std::size_t j = degree(); j-- > 0;) {
      acc *= t;
      acc += to_float(coeffs_[j]);
    }
    return acc;
  }

  /// Converts every coefficient into another field.
  template <Field U>
  OperatorSeries<U> convert() const {
    std::vector<Operator<U>> cs;
    cs.reserve(coeffs_.size());
    for (const auto& c : coeffs_) cs.push_back(opbessel::convert<U>(c));
    OperatorSeries<U> r(std::move(cs));
    r.set_majorant(majorant_);
    return r;
  }

 private:
  OperatorSeries stripped() const {
    OperatorSeries r = *this;
    r.majorant_.reset();
    r.truncation_warning_ = false;
    return r;
  }

  template <class Fn>
  static OperatorSeries combine(const OperatorSeries& a, const OperatorSeries& b, Fn fn) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("OperatorSeries: dimension mismatch");
    const std::size_t d = std::min(a.degree(), b.degree());
    OperatorSeries r = a.truncated(d);
    for (std::size_t j = 0; j <= d; ++j) fn(r.coeffs_[j], b.coeffs_[j]);
    return r;
  }

  std::size_t dim_ = 0;
  std::vector<Operator<T>> coeffs_;
  std::optional<BesselMajorant> majorant_;
  bool truncation_warning_ = false;
};

/// Term-wise d/dt; maps degree D to D-1. Requires D >= 1.
template <Field T>
OperatorSeries<T> series_derivative(const OperatorSeries<T>& s) {
  if (s.degree() < 1) throw std::invalid_argument("series_derivative: degree must be at least 1");
  std::vector<Operator<T>> cs;
  cs.reserve(s.degree());
  for (std::size_t j = 1; j <= s.degree(); ++j) cs.push_back(s.coeff(j) * T(static_cast<long>(j)));
  return OperatorSeries<T>(std::move(cs));
}

/// Applies ad_L coefficient-wise.
template <Field T>
OperatorSeries<T> series_ad(const AdjointContext<T>& ctx, const OperatorSeries<T>& s) {
  std::vector<Operator<T>> cs;
  cs.reserve(s.degree() + 1);
  for (const auto& c : s.coeffs()) cs.push_back(ctx.apply(c));
  return OperatorSeries<T>(std::move(cs));
}

/// [A(t), B(t)] as a series, exact through min(deg A, deg B).
template <Field T>
OperatorSeries<T> series_commutator(const OperatorSeries<T>& a, const OperatorSeries<T>& b) {
  return a * b - b * a;
}

/// Largest Frobenius norm over the coefficients.
template <Field T>
double max_coefficient_norm(const OperatorSeries<T>& s) {
  double m = 0.0;
  for (const auto& c : s.coeffs()) m = std::max(m, frobenius(c));
  return m;
}

/// Horner evaluation together with the majorant tail bound. Series without
/// a majorant are exact polynomials and get a zero tail.
template <Field T>
std::pair<Operator<T>, TailBound> series_eval(const OperatorSeries<T>& s, const T& t) {
  const double td = ScalarTraits<T>::magnitude(t);
  TailBound tb{0.0, td};
  if (s.majorant()) tb.value = s.majorant()->tail(td, static_cast<int>(s.degree()));
  Operator<T> v = s.evaluate(t);
  if (!v.is_finite()) throw std::domain_error("series_eval: non-finite result");
  return {std::move(v), tb};
}

/// Rounding allowance for a float evaluation whose terms have total
/// magnitude `magnitude` and which performs about `depth` dependent
/// operations per entry.
inline double rounding_allowance(double magnitude, double depth) {
  return depth * kUnitRoundoff * magnitude;
}

}  // namespace opbessel
