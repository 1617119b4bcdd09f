#pragma once

// Dense square operators over an exact or floating scalar field.

#include "opbessel/scalar.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace opbessel {

/// Dense n x n matrix, row-major. Values are immutable in spirit: every
/// arithmetic operation returns a new operator.
template <Field T>
class Operator {
 public:
  using value_type = T;

  Operator() = default;

  /// Zero operator of dimension n.
  explicit Operator(std::size_t n) : n_(n), a_(n * n, ScalarTraits<T>::zero()) {
    if (n == 0) throw std::invalid_argument("operator dimension must be positive");
  }

  static Operator zero(std::size_t n) { return Operator(n); }

  static Operator identity(std::size_t n) {
    Operator id(n);
    for (std::size_t i = 0; i < n; ++i) id(i, i) = ScalarTraits<T>::one();
    return id;
  }

  /// Matrix unit with a single one at (row, col); zero-based, so the usual
  /// e_12 is unit(n, 0, 1).
  static Operator unit(std::size_t n, std::size_t row, std::size_t col) {
    Operator e(n);
    e.at(row, col) = ScalarTraits<T>::one();
    return e;
  }

  static Operator diagonal(std::span<const T> values) {
    Operator d(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) d(i, i) = values[i];
    return d;
  }

  static Operator from_rows(const std::vector<std::vector<T>>& rows) {
    if (rows.empty()) throw std::invalid_argument("operator has no rows");
    const std::size_t n = rows.size();
    Operator m(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) throw std::invalid_argument("operator not square");
      for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t dim() const { return n_; }
  bool empty() const { return n_ == 0; }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  T& at(std::size_t i, std::size_t j) {
    if (i >= n_ || j >= n_) throw std::out_of_range("operator index out of range");
    return (*this)(i, j);
  }
  const T& at(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw std::out_of_range("operator index out of range");
    return (*this)(i, j);
  }

  std::span<const T> entries() const { return a_; }

  bool is_zero() const {
    for (const auto& x : a_)
      if (!ScalarTraits<T>::is_zero(x)) return false;
    return true;
  }

  bool is_finite() const {
    for (const auto& x : a_)
      if (!ScalarTraits<T>::is_finite(x)) return false;
    return true;
  }

  Operator& operator+=(const Operator& other) {
    require_same_dim(other, "+");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
    return *this;
  }

  Operator& operator-=(const Operator& other) {
    require_same_dim(other, "-");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= other.a_[k];
    return *this;
  }

  Operator& operator*=(const T& s) {
    for (auto& x : a_) x *= s;
    return *this;
  }

  /// this += s * other, without a temporary.
  Operator& add_scaled(const T& s, const Operator& other) {
    require_same_dim(other, "add_scaled");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += s * other.a_[k];
    return *this;
  }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, const T& s) { return a *= s; }
  friend Operator operator*(const T& s, Operator a) { return a *= s; }

  friend Operator operator-(Operator a) {
    for (auto& x : a.a_) x = -x;
    return a;
  }

  friend Operator operator*(const Operator& a, const Operator& b) {
    a.require_same_dim(b, "*");
    const std::size_t n = a.n_;
    Operator c(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const T& aik = a(i, k);
        if (ScalarTraits<T>::is_zero(aik)) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    }
    return c;
  }

  friend bool operator==(const Operator& a, const Operator& b) {
    return a.n_ == b.n_ && a.a_ == b.a_;
  }

  Operator transpose() const {
    Operator t(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Entry-wise conversion into another field.
  template <Field U, class Fn>
  Operator<U> map(Fn&& fn) const {
    Operator<U> out(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out(i, j) = fn((*this)(i, j));
    return out;
  }

 private:
  void require_same_dim(const Operator& other, const char* what) const {
    if (n_ != other.n_)
      throw std::invalid_argument(std::string("dimension mismatch in operator ") + what + ": " +
                                  std::to_string(n_) + " vs " + std::to_string(other.n_));
  }

  std::size_t n_ = 0;
  std::vector<T> a_;
};

using ExactOperator = Operator<Rational>;
using FloatOperator = Operator<double>;
using ComplexOperator = Operator<Complex>;

/// AB - BA.
template <Field T>
Operator<T> commutator(const Operator<T>& a, const Operator<T>& b) {
  return a * b - b * a;
}

/// Frobenius norm as a double; exact entries are converted first.
template <Field T>
double frobenius(const Operator<T>& a) {
  double s = 0.0;
  for (const auto& x : a.entries()) {
    const double m = ScalarTraits<T>::magnitude(x);
    s += m * m;
  }
  return std::sqrt(s);
}

/// Frobenius norm. In exact mode the squared norm is kept exactly together
/// with a rational upper bound on its square root.
struct NormBound {
  double value = 0.0;
  std::optional<Rational> exact_square;
  std::optional<Rational> root_upper;
};

template <Field T>
NormBound norm_bound(const Operator<T>& a) {
  NormBound nb;
  if constexpr (is_exact_v<T>) {
    Rational sq = 0;
    for (const auto& x : a.entries()) sq += x * x;
    nb.value = std::sqrt(sq.get_d());
    nb.root_upper = sqrt_upper_bound(sq);
    nb.exact_square = std::move(sq);
  } else {
    nb.value = frobenius(a);
  }
  return nb;
}

template <Field T>
Operator<double> to_float(const Operator<T>& a) {
  if constexpr (std::is_same_v<T, double>) {
    return a;
  } else {
    return a.template map<double>([](const T& x) { return ScalarTraits<T>::to_double(x); });
  }
}

template <Field T>
Operator<Complex> to_complex(const Operator<T>& a) {
  if constexpr (std::is_same_v<T, Complex>) {
    return a;
  } else {
    return a.template map<Complex>(
        [](const T& x) { return Complex(ScalarTraits<T>::to_double(x), 0.0); });
  }
}

/// Exact image of a float operator (every finite double is a dyadic rational).
Operator<Rational> to_exact(const Operator<double>& a);

/// Converts between fields: identity, exact->float, or float->exact (dyadic).
template <Field To, Field From>
Operator<To> convert(const Operator<From>& a) {
  if constexpr (std::is_same_v<To, From>) {
    return a;
  } else if constexpr (std::is_same_v<To, double>) {
    return to_float(a);
  } else if constexpr (std::is_same_v<To, Complex>) {
    return to_complex(a);
  } else {
    static_assert(std::is_same_v<From, double>, "unsupported conversion");
    return to_exact(a);
  }
}

template <Field T>
Operator<double> real_part(const Operator<T>& a) {
  if constexpr (std::is_same_v<T, Complex>) {
    return a.template map<double>([](const Complex& z) { return z.real(); });
  } else {
    return to_float(a);
  }
}

inline Operator<double> imag_part(const Operator<Complex>& a) {
  return a.map<double>([](const Complex& z) { return z.imag(); });
}

/// Matrix exponential by scaling and squaring of the Taylor series. The
/// truncation error, measured in the Frobenius norm, is kept below tol.
/// Throws std::invalid_argument for tol <= 0 and std::domain_error for
/// non-finite input.
Operator<double> operator_exp(const Operator<double>& a, double tol);
Operator<Complex> operator_exp(const Operator<Complex>& a, double tol);

}  // namespace opbessel
