#include <cmath>
#include <random>

#include "helpers.hpp"
#include "qvo/qfield.hpp"
#include "qvo/scalar.hpp"

using namespace qvo;

namespace {

LaurentQ q(const Frac& e, long c = 1) { return LaurentQ::q_power(e, c); }

LaurentQ random_poly(std::mt19937_64& rng, int terms, int span, int den) {
  std::uniform_int_distribution<int> e(-span, span), c(-4, 4);
  LaurentQ p;
  for (int k = 0; k < terms; ++k) p += q(Frac(e(rng), den), c(rng));
  return p;
}

}  // namespace

TEST_SUITE("qfield") {
  TEST_CASE("q powers") {
    CHECK(RatQ::q_power(Frac(0)) == RatQ(1));
    CHECK(RatQ::q_power(Frac(1, 2)) * RatQ::q_power(Frac(1, 2)) == RatQ::q_power(Frac(1)));
    RatQ lhs = RatQ(q(1) - q(-1)) * RatQ(q(1) + q(-1));
    CHECK(lhs == RatQ(q(2) - q(-2)));
  }

  TEST_CASE("field operations") {
    CHECK(RatQ::q_power(1).inverse() == RatQ::q_power(-1));
    // (q²-1)/(q-1) = q+1: cross-multiplied
    RatQ a(q(2) - LaurentQ(1), q(1) - LaurentQ(1));
    CHECK(a == RatQ(q(1) + LaurentQ(1)));
    CHECK(a.num() * LaurentQ(1) == (q(1) + LaurentQ(1)) * a.den());
    CHECK_THROWS_AS(RatQ(0).inverse(), Error);
    try {
      RatQ(0).inverse();
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DivisionByZero);
    }
  }

  TEST_CASE("q-integers and binomials") {
    CHECK(q_int(Frac(1)) == RatQ(1));
    for (int m = 0; m < 5; ++m) CHECK(q_binomial(m, 0) == RatQ(1));
    CHECK(q_binomial(2, 1) == RatQ(q(1) + q(-1)));
    // [n]_q = Σ_{k} q^{n-1-2k}
    for (int n = 1; n < 6; ++n) {
      LaurentQ s;
      for (int k = 0; k < n; ++k) s += q(Frac(n - 1 - 2 * k));
      CHECK(q_int(Frac(n)) == RatQ(s));
    }
    // base 2: [2]_{q^2} = q^2 + q^-2
    CHECK(q_int(Frac(2), Frac(2)) == RatQ(q(2) + q(-2)));
  }

  TEST_CASE("float evaluation") {
    QMode f2 = QMode::Float(2.0, 1e-12), f4 = QMode::Float(4.0, 1e-12);
    CHECK(to_float(RatQ::q_power(1), f2) == doctest::Approx(2.0));
    CHECK(to_float(RatQ::q_power(Frac(1, 2)), f4) == doctest::Approx(2.0));
    CHECK(to_float(q_int(Frac(2)), f2) == doctest::Approx((4.0 - 0.25) / (2.0 - 0.5)));
    Scalar s = Scalar::q_pow(Frac(3, 2), QMode::Float(0.83, 1e-9));
    CHECK(s.to_double(0.83) == doctest::Approx(std::pow(0.83, 1.5)));
  }

  TEST_CASE("normal form is canonical under random common factors") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 40; ++t) {
      LaurentQ a = random_poly(rng, 3, 4, 2), b = random_poly(rng, 3, 4, 3), c = random_poly(rng, 2, 3, 6);
      if (a.is_zero() || b.is_zero() || c.is_zero()) continue;
      RatQ x(a, b), y(a * c, b * c);
      CHECK(x == y);
      CHECK(x.num() * y.den() == y.num() * x.den());
    }
  }

  TEST_CASE("field axioms on random elements") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 30; ++t) {
      RatQ a(random_poly(rng, 2, 3, 2) + LaurentQ(1), random_poly(rng, 2, 3, 1) + LaurentQ(3));
      RatQ b(random_poly(rng, 2, 2, 3) + LaurentQ(2), LaurentQ(1));
      RatQ c(random_poly(rng, 3, 2, 1) + LaurentQ(5), random_poly(rng, 1, 2, 2) + LaurentQ(7));
      CHECK((a + b) * c == a * c + b * c);
      CHECK((a * b) * c == a * (b * c));
      if (!b.is_zero()) CHECK(a / b * b == a);
      CHECK(a - a == RatQ(0));
      // evaluation is a ring map
      double q0 = 0.83;
      CHECK(((a + b) * c).eval(q0) == doctest::Approx((a.eval(q0) + b.eval(q0)) * c.eval(q0)).epsilon(1e-9));
    }
  }

  TEST_CASE("bar involution") {
    RatQ a(q(1) + LaurentQ(2), q(Frac(-1, 2)) - LaurentQ(3));
    CHECK(a.bar().bar() == a);
    CHECK(q_int(Frac(3)).bar() == q_int(Frac(3)));
  }

  TEST_CASE("json round trip") {
    RatQ a(q(Frac(7, 3)) - q(-1, 2), q(1) + LaurentQ(1));
    CHECK(RatQ::from_json(a.to_json()) == a);
  }
}
