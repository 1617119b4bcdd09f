#include "opbessel/besselop.hpp"
#include "opbessel/random.hpp"

#include "doctest.h"

#include <cmath>

using namespace opbessel;
using Q = Rational;
using QOp = Operator<Rational>;
using DOp = Operator<double>;

namespace {

// Classical J_m(x) for any integer m and real x, from the standard library.
double classical_j(int m, double x) {
  const int am = std::abs(m);
  double v = std::cyl_bessel_j(static_cast<double>(am), std::abs(x));
  if (x < 0 && am % 2 == 1) v = -v;
  if (m < 0 && am % 2 == 1) v = -v;
  return v;
}

DOp scalar(double w) { return DOp::from_rows({{w}}); }

}  // namespace

TEST_CASE("bessel coefficients") {
  CHECK(bessel_coefficient(0, 0) == Q(1));
  CHECK(bessel_coefficient(0, 2) == Q(-1, 4));
  CHECK(bessel_coefficient(1, 1) == Q(1, 2));
  CHECK(bessel_coefficient(1, 3) == Q(-1, 16));
  CHECK(bessel_coefficient(2, 2) == Q(1, 8));
  CHECK(bessel_coefficient(0, 1) == 0);
  CHECK(bessel_coefficient(3, 1) == 0);
  // J_{-m} = (-1)^m J_m coefficient-wise.
  for (int m = 0; m <= 6; ++m)
    for (int n = 0; n <= 20; ++n) CHECK(bessel_coefficient(-m, n) == bessel_coefficient(m, n) * (m % 2 ? -1 : 1));
}

TEST_CASE("bessel_series at t = 0") {
  SeededRng rng(17);
  const QOp x = random_rational_operator(3, rng);
  CHECK(bessel_series(x, 0, 10).evaluate(Q(0)) == QOp::identity(3));
  for (int m : {-3, -1, 1, 2}) CHECK(bessel_series(x, m, 10).evaluate(Q(0)).is_zero());
}

TEST_CASE("1x1 series reproduce the classical Bessel series term by term") {
  const Q w(3, 7);
  const QOp x = QOp::from_rows({{w}});
  for (int m = -4; m <= 4; ++m) {
    const auto s = bessel_series(x, m, 30);
    const int am = std::abs(m);
    for (int n = 0; n <= 30; ++n) {
      Q expected(0);
      if (n >= am && (n - am) % 2 == 0) {
        const int j = (n - am) / 2;
        BigInt pw;
        mpz_pow_ui(pw.get_mpz_t(), w.get_num_mpz_t(), static_cast<unsigned long>(n));
        BigInt pd;
        mpz_pow_ui(pd.get_mpz_t(), w.get_den_mpz_t(), static_cast<unsigned long>(n));
        expected = Q(pw, pd * factorial(j) * factorial(j + am) * (BigInt(1) << n));
        expected.canonicalize();
        if (j % 2) expected = -expected;
        if (m < 0 && am % 2) expected = -expected;
      }
      CHECK(s.coeff(static_cast<std::size_t>(n))(0, 0) == expected);
    }
  }
}

TEST_CASE("float series against the standard library Bessel functions") {
  for (double w : {0.5, 1.0, 2.0, 5.0}) {
    for (int m : {0, 1, -1, 2, 5}) {
      const auto s = bessel_series(scalar(w), m, 60);
      const auto [v, tail] = series_eval(s, 1.0);
      CHECK(std::abs(v(0, 0) - classical_j(m, w)) <= 1e-12);
      CHECK(tail.value < 1e-20);
    }
  }
  const auto [j0, tb] = series_eval(bessel_series(scalar(1.0), 0, 60), 2.0);
  CHECK(j0(0, 0) == doctest::Approx(0.22389077914123567).epsilon(1e-14));
  CHECK(tb.value < 1e-15);
}

TEST_CASE("series_eval of the zero series") {
  const OperatorSeries<double> z(2, 5);
  const auto [v, tb] = series_eval(z, 3.0);
  CHECK(v.is_zero());
  CHECK(tb.value == 0.0);
}

TEST_CASE("truncation warning") {
  const QOp x = QOp::unit(2, 0, 1);
  CHECK(bessel_series(x, 4, 3).truncation_warning());
  CHECK_FALSE(bessel_series(x, 2, 3).truncation_warning());
  CHECK(bessel_series(x, 4, 3).is_zero());
}

TEST_CASE("nilpotent argument terminates") {
  const QOp x = QOp::unit(2, 0, 1);
  CHECK(bessel_series(x, 2, 12).is_zero());
  CHECK(bessel_series(x, 0, 12).evaluate(Q(5)) == QOp::identity(2));
  CHECK(bessel_series(x, 1, 12).evaluate(Q(5)) == x * Q(5, 2));
  CHECK(bessel_series(x, -1, 12).evaluate(Q(5)) == x * Q(-5, 2));
}

TEST_CASE("majorant tails bound the omitted terms") {
  SeededRng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const DOp x = random_float_operator(3, rng) * 1.5;
    for (int m : {0, 3, -2}) {
      const auto full = bessel_series(x, m, 80);
      const auto cut = bessel_series(x, m, 10);
      for (double t : {0.5, 1.0, 2.0}) {
        const double err = frobenius(full.evaluate(t) - cut.evaluate(t));
        CHECK(err <= cut.majorant()->tail(t, 10) * (1 + 1e-12) + 1e-15);
      }
    }
  }
}

TEST_CASE("series derivative") {
  const QOp i = QOp::identity(2);
  CHECK(series_derivative(OperatorSeries<Rational>::constant(i, 4)).is_zero());
  OperatorSeries<Rational> t2(2, 2);
  t2.set_coeff(2, i);
  const auto dd = series_derivative(series_derivative(t2));
  CHECK(dd.degree() == 0);
  CHECK(dd.coeff(0) == i * Q(2));
  CHECK_THROWS_AS(series_derivative(OperatorSeries<Rational>(2, 0)), std::invalid_argument);
  CHECK_THROWS_AS(OperatorSeries<Rational>::constant(i, 4).shift_down(1), std::domain_error);
  CHECK(t2.shift_down(2).coeff(0) == i);
}

TEST_CASE("generating-function oracle") {
  CHECK(frobenius(generating_oracle(scalar(1.0), 0, 0.0, 64) - DOp::identity(1)) < 1e-15);
  CHECK(frobenius(generating_oracle(DOp::unit(2, 0, 1), 2, 1.7, 64)) < 1e-14);
  CHECK(generating_oracle(scalar(1.0), 1, 2.0, 64)(0, 0) == doctest::Approx(0.5767248077568734).epsilon(1e-10));
  CHECK_THROWS_AS(generating_oracle(scalar(1.0), 0, 1.0, 4), std::invalid_argument);

  SeededRng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    DOp x = random_float_operator(3, rng);
    x *= 3.0 / frobenius(x);
    for (int m = -5; m <= 5; ++m) {
      const DOp series = bessel_series(x, m, 60).evaluate(1.0);
      CHECK(frobenius(series - generating_oracle(x, m, 1.0, 64)) < 1e-10);
    }
  }
}

TEST_CASE("sum rule: sum_m J_m(tX) tends to the identity") {
  SeededRng rng(77);
  const DOp x = random_float_operator(3, rng);
  const double t = 1.5;
  const double z = t * frobenius(x) / 2.0;
  for (int k : {4, 8, 16}) {
    DOp sum(3);
    for (int m = -k; m <= k; ++m) sum += bessel_series(x, m, 60).evaluate(t);
    double omitted = 0.0;
    for (int m = k + 1; m < k + 200; ++m) omitted += 2.0 * bessel_norm_majorant(z, m);
    const double trunc = (2 * k + 1) * bessel_norm_tail(z, 0, 60);
    CHECK(frobenius(sum - DOp::identity(3)) <= omitted + trunc + 1e-13);
  }
}

TEST_CASE("recurrences hold exactly") {
  const QOp e12 = QOp::unit(2, 0, 1);
  // 2 J_1 = tL (J_0 + J_2) reduces to tL = tL for L = e12.
  const auto r = check_recurrence(BesselRelation::recurrence_2k, e12, 6, 1, 1);
  REQUIRE(r.checks.size() == 1);
  CHECK(r.checks[0].verdict == Verdict::pass);
  CHECK(r.checks[0].residual == 0.0);

  SeededRng rng(5);
  const QOp l = random_rational_operator(3, rng);
  for (BesselRelation rel : kAllBesselRelations) {
    const auto rep = check_recurrence(rel, l, 16, -4, 4);
    CHECK(rep.checks.size() == 9);
    CHECK(rep.all_required_pass());
    for (const auto& c : rep.checks) CHECK(c.residual == 0.0);
  }
  CHECK(check_recurrence(BesselRelation::negative_index, l, 10, 0, 0).checks[0].residual == 0.0);
  CHECK_THROWS_AS(check_recurrence(BesselRelation::negative_index, l, 6, -5, 5), std::invalid_argument);
}

TEST_CASE("recurrences in float mode stay within rounding allowance") {
  SeededRng rng(6);
  const DOp l = random_float_operator(4, rng);
  for (BesselRelation rel : kAllBesselRelations) CHECK(check_recurrence(rel, l, 20, -6, 6).all_required_pass());
}

TEST_CASE("classical derivative identity for a scalar argument") {
  // 2 J_k' = J_{k-1} - J_{k+1}, checked against std::cyl_bessel_j at x = 1.3.
  const double x = 1.3, h = 1e-5;
  for (int k = 1; k <= 4; ++k) {
    const double d = (classical_j(k, x + h) - classical_j(k, x - h)) / (2 * h);
    CHECK(2 * d == doctest::Approx(classical_j(k - 1, x) - classical_j(k + 1, x)).epsilon(1e-8));
    const auto s = series_derivative(bessel_series(scalar(1.0), k, 40));
    CHECK(2 * s.evaluate(x)(0, 0) == doctest::Approx(classical_j(k - 1, x) - classical_j(k + 1, x)).epsilon(1e-12));
  }
}

TEST_CASE("relation names round-trip") {
  for (BesselRelation rel : kAllBesselRelations) CHECK(parse_bessel_relation(to_string(rel)) == rel);
  CHECK_THROWS_AS(parse_bessel_relation("bogus"), std::invalid_argument);
}
