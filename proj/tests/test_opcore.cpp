#include "opbessel/opcore.hpp"
#include "opbessel/random.hpp"

#include "doctest.h"

#include <cmath>

using namespace opbessel;
using Q = Rational;
using QOp = Operator<Rational>;
using DOp = Operator<double>;

TEST_CASE("rational parsing and formatting") {
  CHECK(parse_rational("3/6") == Q(1, 2));
  CHECK(parse_rational("-7") == Q(-7));
  CHECK(parse_rational("0.125") == Q(1, 8));
  CHECK(parse_rational("-1.5") == Q(-3, 2));
  CHECK(format_rational(Q(-3, 2)) == "-3/2");
  CHECK(format_rational(Q(4)) == "4");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK(rational_from_double(0.1) != Q(1, 10));  // binary value, not decimal
  CHECK(rational_from_double(0.75) == Q(3, 4));
}

TEST_CASE("factorials and binomials are exact big integers") {
  CHECK(factorial(0) == 1);
  CHECK(factorial(20) == BigInt("2432902008176640000"));
  CHECK(factorial(25) == BigInt("15511210043330985984000000"));
  CHECK(binomial(60, 30) == BigInt("118264581564861424"));
  CHECK(binomial(5, 7) == 0);
}

TEST_CASE("construction and validation") {
  CHECK_THROWS_AS(QOp(0), std::invalid_argument);
  CHECK_THROWS_AS(QOp::from_rows({{Q(1), Q(2)}, {Q(3)}}), std::invalid_argument);
  const QOp a = QOp::from_rows({{Q(1), Q(2)}, {Q(3), Q(4)}});
  CHECK(a(1, 0) == Q(3));
  CHECK_THROWS_AS(a.at(2, 0), std::out_of_range);
  CHECK_THROWS_AS(a + QOp(3), std::invalid_argument);
  CHECK_THROWS_AS(a * QOp(3), std::invalid_argument);
  CHECK(a.transpose()(0, 1) == Q(3));
}

TEST_CASE("commutator fixtures") {
  const QOp e12 = QOp::unit(3, 0, 1), e23 = QOp::unit(3, 1, 2), e13 = QOp::unit(3, 0, 2);
  CHECK(commutator(e12, e12).is_zero());
  CHECK(commutator(e12, e23) == e13);

  const Q ab[] = {Q(5, 3), Q(-2)};
  const QOp d = QOp::diagonal(ab);
  CHECK(commutator(d, QOp::unit(2, 0, 1)) == QOp::unit(2, 0, 1) * (ab[0] - ab[1]));
}

TEST_CASE("exact arithmetic is associative, distributive and satisfies Jacobi") {
  SeededRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const QOp a = random_rational_operator(n, rng), b = random_rational_operator(n, rng),
              c = random_rational_operator(n, rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((commutator(a, commutator(b, c)) + commutator(b, commutator(c, a)) + commutator(c, commutator(a, b)))
              .is_zero());
  }
}

TEST_CASE("norm bounds") {
  CHECK(norm_bound(QOp(3)).value == 0.0);
  const NormBound nb = norm_bound(QOp::identity(4));
  CHECK(nb.value == doctest::Approx(2.0));
  REQUIRE(nb.exact_square);
  CHECK(*nb.exact_square == Q(4));
  REQUIRE(nb.root_upper);
  CHECK(*nb.root_upper * *nb.root_upper >= Q(4));

  const NormBound three = norm_bound(QOp::identity(3));
  CHECK(*three.root_upper * *three.root_upper >= Q(3));
  CHECK(mpq_get_d(three.root_upper->get_mpq_t()) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

  SeededRng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const DOp a = random_float_operator(4, rng), b = random_float_operator(4, rng);
    CHECK(norm_bound(a * b).value <= norm_bound(a).value * norm_bound(b).value * (1 + 1e-15));
  }
}

TEST_CASE("operator exponential") {
  CHECK(frobenius(operator_exp(DOp(3), 1e-15) - DOp::identity(3)) == 0.0);

  const DOp e12 = DOp::unit(2, 0, 1);
  CHECK(frobenius(operator_exp(e12, 1e-15) - (DOp::identity(2) + e12)) < 1e-15);

  const double d[] = {0.7, -2.5};
  const DOp ex = operator_exp(DOp::diagonal(d), 1e-15);
  CHECK(ex(0, 0) == doctest::Approx(std::exp(0.7)).epsilon(1e-14));
  CHECK(ex(1, 1) == doctest::Approx(std::exp(-2.5)).epsilon(1e-14));
  CHECK(std::abs(ex(0, 1)) < 1e-300);

  // Rotation generator: exp of i*theta*sigma_y-like real antisymmetric matrix.
  const DOp rot = DOp::from_rows({{0.0, -1.2}, {1.2, 0.0}});
  const DOp r = operator_exp(rot, 1e-15);
  CHECK(r(0, 0) == doctest::Approx(std::cos(1.2)).epsilon(1e-14));
  CHECK(r(1, 0) == doctest::Approx(std::sin(1.2)).epsilon(1e-14));

  SeededRng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const DOp a = random_float_operator(2 + trial % 5, rng) * (1.0 + trial);
    const double tol = 1e-13;
    const DOp prod = operator_exp(a, tol) * operator_exp(-a, tol);
    CHECK(frobenius(prod - DOp::identity(a.dim())) <= 10 * tol * std::exp(2 * frobenius(a)));
  }

  const ComplexOperator ia = to_complex(rot) * Complex(0.0, 1.0);
  const ComplexOperator ez = operator_exp(ia, 1e-15);
  CHECK(ez(0, 0).real() == doctest::Approx(std::cosh(1.2)).epsilon(1e-14));

  CHECK_THROWS_AS(operator_exp(e12, 0.0), std::invalid_argument);
  DOp bad(2);
  bad(0, 0) = NAN;
  CHECK_THROWS_AS(operator_exp(bad, 1e-15), std::domain_error);
}

TEST_CASE("conversions between fields") {
  const QOp q = QOp::from_rows({{Q(1, 2), Q(-3)}, {Q(0), Q(7, 4)}});
  const DOp f = to_float(q);
  CHECK(f(0, 0) == 0.5);
  CHECK(f(1, 1) == 1.75);
  CHECK(to_exact(f) == q);
  CHECK(convert<Rational>(f) == q);
  CHECK(real_part(to_complex(f)) == f);
  CHECK(imag_part(to_complex(f)).is_zero());
}
