#pragma once

// The adjoint map ad_L(A) = [L, A], its powers, and the conjugation
// identity e^{itL} A e^{-itL} = sum (it)^n/n! ad_L^n(A).

#include "opbessel/opcore.hpp"

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace opbessel {

enum class AdPowerMethod {
  iterated,  ///< n nested commutators
  binomial,  ///< sum_k (-1)^k C(n,k) L^{n-k} A L^k
};

/// Fixed operator L of a prolongation structure, with the powers
/// L^0..L^max_power computed at construction. Later lookups beyond the
/// cache are computed on the fly and never stored, so a context can be
/// shared across threads.
template <Field T>
class AdjointContext {
 public:
  explicit AdjointContext(Operator<T> l, std::size_t max_power = 16) : l_(std::move(l)) {
    if (l_.empty()) throw std::invalid_argument("AdjointContext: empty operator");
    powers_.reserve(max_power + 1);
    powers_.push_back(Operator<T>::identity(l_.dim()));
    for (std::size_t k = 1; k <= max_power; ++k) powers_.push_back(powers_.back() * l_);
  }

  const Operator<T>& generator() const { return l_; }
  std::size_t dim() const { return l_.dim(); }

  Operator<T> power(std::size_t k) const {
    if (k < powers_.size()) return powers_[k];
    Operator<T> p = powers_.back();
    for (std::size_t j = powers_.size() - 1; j < k; ++j) p = p * l_;
    return p;
  }

  Operator<T> apply(const Operator<T>& a) const {
    require_dim(a);
    return commutator(l_, a);
  }

  Operator<T> apply_power(const Operator<T>& a, std::size_t n,
                          AdPowerMethod method = AdPowerMethod::iterated) const {
    require_dim(a);
    if (method == AdPowerMethod::iterated) {
      Operator<T> r = a;
      for (std::size_t k = 0; k < n; ++k) r = commutator(l_, r);
      return r;
    }
    Operator<T> r(a.dim());
    for (std::size_t k = 0; k <= n; ++k) {
      T c = ScalarTraits<T>::from_integer(binomial(static_cast<unsigned>(n), static_cast<unsigned>(k)));
      if (k % 2 == 1) c = -c;
      r.add_scaled(c, power(n - k) * a * power(k));
    }
    return r;
  }

  /// ad^0(A), ..., ad^n(A) by nested commutators.
  std::vector<Operator<T>> power_ladder(const Operator<T>& a, std::size_t n) const {
    require_dim(a);
    std::vector<Operator<T>> ladder;
    ladder.reserve(n + 1);
    ladder.push_back(a);
    for (std::size_t k = 0; k < n; ++k) ladder.push_back(commutator(l_, ladder.back()));
    return ladder;
  }

 private:
  void require_dim(const Operator<T>& a) const {
    if (a.dim() != l_.dim())
      throw std::invalid_argument("adjoint: dimension mismatch (" + std::to_string(l_.dim()) +
                                  " vs " + std::to_string(a.dim()) + ")");
  }

  Operator<T> l_;
  std::vector<Operator<T>> powers_;
};

/// [L, A].
template <Field T>
Operator<T> ad_apply(const AdjointContext<T>& ctx, const Operator<T>& a) {
  return ctx.apply(a);
}

template <Field T>
Operator<T> ad_power(const AdjointContext<T>& ctx, const Operator<T>& a, std::size_t n,
                     AdPowerMethod method) {
  return ctx.apply_power(a, n, method);
}

/// Partial sum sum_{n <= degree} (it)^n / n! ad_L^n(A0).
Operator<Complex> bch_series(const AdjointContext<double>& ctx, const Operator<double>& a0,
                             double t, std::size_t degree);
Operator<Complex> bch_series(const AdjointContext<Complex>& ctx, const Operator<Complex>& a0,
                             double t, std::size_t degree);
/// Exact mode has no imaginary unit; always throws std::domain_error.
Operator<Complex> bch_series(const AdjointContext<Rational>& ctx, const Operator<Rational>& a0,
                             const Rational& t, std::size_t degree);

/// e^{itL} A0 e^{-itL} through operator_exp.
Operator<Complex> bch_conjugate(const AdjointContext<double>& ctx, const Operator<double>& a0,
                                double t, double tol);
Operator<Complex> bch_conjugate(const AdjointContext<Complex>& ctx, const Operator<Complex>& a0,
                                double t, double tol);

/// Truncated e^{it ad_L}(A0) + e^{-it ad_L}(B0), a formal solution of
/// X'' + ad_L^2(X) = 0. Requires degree >= 2.
Operator<Complex> harmonic_solution(const AdjointContext<double>& ctx, const Operator<double>& a0,
                                    const Operator<double>& b0, double t, std::size_t degree);

/// Majorant for the BCH truncation error:
/// sum_{n > degree} (2 |t| ||L||)^n / n! * ||A0||.
double bch_tail_bound(double t, double l_norm, double a0_norm, std::size_t degree);

/// Exact coefficient check of the conjugation identity: for each n <= degree,
/// ad_L^n(A0)/n! must equal sum_{j+k=n} L^j A0 (-1)^k L^k / (j! k!). The
/// powers of (it) are handled symbolically, so the comparison is over real
/// rationals. Returns the first failing n, or nothing when all agree.
std::optional<std::size_t> bch_coefficient_mismatch(const AdjointContext<Rational>& ctx,
                                                    const Operator<Rational>& a0,
                                                    std::size_t degree);

}  // namespace opbessel
