#include "opbessel/adjoint.hpp"
#include "opbessel/random.hpp"

#include "doctest.h"

#include <cmath>

using namespace opbessel;
using Q = Rational;
using QOp = Operator<Rational>;
using DOp = Operator<double>;

TEST_CASE("ad_apply fixtures") {
  const QOp e12 = QOp::unit(3, 0, 1), e23 = QOp::unit(3, 1, 2);
  const AdjointContext<Rational> ctx(e12);
  CHECK(ad_apply(ctx, e12).is_zero());
  CHECK(ad_apply(ctx, e23) == QOp::unit(3, 0, 2));

  const Q ab[] = {Q(2), Q(-1, 3)};
  const AdjointContext<Rational> dctx(QOp::diagonal(ab));
  CHECK(ad_apply(dctx, QOp::unit(2, 0, 1)) == QOp::unit(2, 0, 1) * (ab[0] - ab[1]));
  CHECK_THROWS_AS(ad_apply(dctx, QOp(3)), std::invalid_argument);
}

TEST_CASE("ad_power fixtures") {
  const QOp e12 = QOp::unit(3, 0, 1), e23 = QOp::unit(3, 1, 2);
  const AdjointContext<Rational> ctx(e12);
  for (auto method : {AdPowerMethod::iterated, AdPowerMethod::binomial}) {
    CHECK(ad_power(ctx, e23, 0, method) == e23);
    CHECK(ad_power(ctx, e23, 2, method).is_zero());
    CHECK(ad_power(ctx, QOp::identity(3), 5, method).is_zero());
  }
}

TEST_CASE("iterated and binomial ad powers agree exactly") {
  SeededRng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial) % 5;
    const QOp l = random_rational_operator(n, rng), a = random_rational_operator(n, rng);
    const AdjointContext<Rational> ctx(l, 6);  // forces powers beyond the cache
    for (std::size_t k = 0; k <= 12; k += (trial % 2 ? 1 : 3))
      CHECK(ctx.apply_power(a, k, AdPowerMethod::iterated) == ctx.apply_power(a, k, AdPowerMethod::binomial));
  }
}

TEST_CASE("ad_L is a derivation") {
  SeededRng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const QOp l = random_rational_operator(4, rng), a = random_rational_operator(4, rng),
              b = random_rational_operator(4, rng);
    const AdjointContext<Rational> ctx(l);
    CHECK(ctx.apply(a * b) == ctx.apply(a) * b + a * ctx.apply(b));
  }
}

TEST_CASE("power ladder") {
  SeededRng rng(1);
  const QOp l = random_rational_operator(3, rng), a = random_rational_operator(3, rng);
  const AdjointContext<Rational> ctx(l);
  const auto ladder = ctx.power_ladder(a, 7);
  REQUIRE(ladder.size() == 8);
  for (std::size_t k = 0; k < ladder.size(); ++k) CHECK(ladder[k] == ctx.apply_power(a, k, AdPowerMethod::binomial));
}

TEST_CASE("bch series trivial cases") {
  SeededRng rng(3);
  const DOp l = random_float_operator(3, rng), a = random_float_operator(3, rng);
  const AdjointContext<double> ctx(l);
  CHECK(frobenius(bch_series(ctx, a, 0.0, 20) - to_complex(a)) == 0.0);
  CHECK(frobenius(bch_conjugate(ctx, a, 0.0, 1e-15) - to_complex(a)) < 1e-15);

  const AdjointContext<double> comm(l);
  const DOp poly = l * l * 0.5 + l * 2.0;
  CHECK(frobenius(bch_series(comm, poly, 1.3, 30) - to_complex(poly)) < 1e-13);

  const AdjointContext<Rational> ex(QOp::unit(2, 0, 1));
  CHECK_THROWS_AS(bch_series(ex, QOp::unit(2, 1, 0), Q(1), 4), std::domain_error);
}

TEST_CASE("bch on diagonal generator matches the eigenvalue expansion") {
  const double lam[] = {0.8, -0.6};
  const DOp l = DOp::diagonal(lam);
  const DOp a = DOp::from_rows({{1.0, 2.0}, {-0.5, 3.0}});
  const AdjointContext<double> ctx(l);
  const double t = 1.1;
  const std::size_t degree = 9;
  const auto series = bch_series(ctx, a, t, degree);
  const auto conj = bch_conjugate(ctx, a, t, 1e-15);
  for (std::size_t j = 0; j < 2; ++j)
    for (std::size_t k = 0; k < 2; ++k) {
      const double w = t * (lam[j] - lam[k]);
      Complex partial = 0.0, term = 1.0;
      for (std::size_t n = 0; n <= degree; ++n) {
        partial += term;
        term *= Complex(0.0, w) / static_cast<double>(n + 1);
      }
      CHECK(std::abs(series(j, k) - a(j, k) * partial) < 1e-14);
      CHECK(std::abs(conj(j, k) - a(j, k) * std::exp(Complex(0.0, w))) < 1e-14);
    }
}

TEST_CASE("nilpotent conjugation in closed form") {
  const DOp e12 = DOp::unit(2, 0, 1), e21 = DOp::unit(2, 1, 0);
  const AdjointContext<double> ctx(e12);
  const double t = 0.7;
  // (I + itL) A (I - itL) for L^2 = 0.
  const ComplexOperator u = to_complex(DOp::identity(2)) + to_complex(e12) * Complex(0.0, t);
  const ComplexOperator v = to_complex(DOp::identity(2)) - to_complex(e12) * Complex(0.0, t);
  const ComplexOperator expected = u * to_complex(e21) * v;
  CHECK(frobenius(bch_conjugate(ctx, e21, t, 1e-15) - expected) < 1e-15);
  CHECK(frobenius(bch_series(ctx, e21, t, 3) - expected) < 1e-15);
}

TEST_CASE("bch truncation stays within the majorant") {
  SeededRng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const DOp l = random_float_operator(3, rng), a = random_float_operator(3, rng);
    const AdjointContext<double> ctx(l);
    const double t = 1.0 / frobenius(l);
    for (std::size_t degree : {4u, 8u, 16u}) {
      const double err = frobenius(bch_series(ctx, a, t, degree) - bch_conjugate(ctx, a, t, 1e-15));
      CHECK(err <= bch_tail_bound(t, frobenius(l), frobenius(a), degree) + 1e-13);
    }
  }
}

TEST_CASE("exact coefficient check of the conjugation expansion") {
  SeededRng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const QOp l = random_rational_operator(3, rng), a = random_rational_operator(3, rng);
    const AdjointContext<Rational> ctx(l);
    CHECK_FALSE(bch_coefficient_mismatch(ctx, a, 14).has_value());
  }
}

TEST_CASE("harmonic solution") {
  const double lam[] = {1.0, -0.5};
  const DOp l = DOp::diagonal(lam);
  const DOp a = DOp::from_rows({{0.3, 1.0}, {2.0, -1.0}});
  const AdjointContext<double> ctx(l);
  CHECK(frobenius(harmonic_solution(ctx, a, a, 0.0, 10) - to_complex(a + a)) == 0.0);
  for (double t : {0.5, 1.0, 2.0}) {
    const auto h = harmonic_solution(ctx, a, a, t, 40);
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        CHECK(std::abs(h(j, k) - 2.0 * a(j, k) * std::cos(t * (lam[j] - lam[k]))) < 1e-13);
  }

  // X'' + ad_L^2 X = 0 by central differences, error O(h^2) plus tail.
  SeededRng rng(4);
  const DOp g = random_float_operator(3, rng), a0 = random_float_operator(3, rng), b0 = random_float_operator(3, rng);
  const AdjointContext<double> gc(g);
  for (double t : {0.5, 1.0, 2.0}) {
    const double h = 1e-3;
    const auto xm = harmonic_solution(gc, a0, b0, t - h, 60), x0 = harmonic_solution(gc, a0, b0, t, 60),
               xp = harmonic_solution(gc, a0, b0, t + h, 60);
    const ComplexOperator second = (xp - x0 * Complex(2.0) + xm) * Complex(1.0 / (h * h));
    const AdjointContext<Complex> cc(to_complex(g));
    const ComplexOperator res = second + cc.apply(cc.apply(x0));
    const double scale = std::pow(2.0 * frobenius(g), 4) * std::exp(2.0 * t * frobenius(g)) *
                         (frobenius(a0) + frobenius(b0));
    CHECK(frobenius(res) <= scale * h * h + 8.0 * kUnitRoundoff * frobenius(x0) / (h * h));
  }
  CHECK_THROWS_AS(harmonic_solution(gc, a0, b0, 1.0, 1), std::invalid_argument);
}
