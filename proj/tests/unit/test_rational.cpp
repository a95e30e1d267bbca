#include <doctest.h>

#include <limits>

#include "wander/errors.hpp"
#include "wander/rational.hpp"

using wander::Error;
using wander::ErrorKind;
using wander::Rational;

TEST_CASE("normalization and arithmetic") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(1, -2) == Rational(-1, 2));
  CHECK(Rational(1, 2).den() == 2);
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1, 3) - Rational(1, 2) == Rational(-1, 6));
  CHECK(Rational(2, 3) * Rational(9, 4) == Rational(3, 2));
  CHECK(Rational(2, 3) / Rational(4, 9) == Rational(3, 2));
  CHECK(Rational(-7, 2).floor() == Rational(-4));
  CHECK(Rational(7, 2).floor() == Rational(3));
  CHECK(Rational(-3, 5).abs() == Rational(3, 5));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(3, 4).to_double() == 0.75);
  CHECK(Rational(-3, 4).str() == "-3/4");
  CHECK(Rational(5).str() == "5");
  CHECK_THROWS_AS(Rational(1, 0), Error);
  CHECK_THROWS_AS(Rational(1) / Rational(0), Error);
}

TEST_CASE("parsing") {
  CHECK(Rational::parse("3/4") == Rational(3, 4));
  CHECK(Rational::parse("-2") == Rational(-2));
  CHECK(Rational::parse("0.125") == Rational(1, 8));
  CHECK(Rational::parse("1e-3") == Rational(1, 1000));
  CHECK(Rational::parse("2.5e2") == Rational(250));
  for (const char* bad : {"", "abc", "1/", "1//2", "0.1.2", "1/0"}) {
    try {
      Rational::parse(bad);
      FAIL("accepted " << bad);
    } catch (const Error& e) {
      CHECK((e.kind() == ErrorKind::parse || e.kind() == ErrorKind::precondition));
    }
  }
}

TEST_CASE("overflow is reported, not wrapped") {
  const Rational big(std::numeric_limits<std::int64_t>::max() / 2, 1);
  CHECK_THROWS_AS(big * big, Error);
  const Rational a(1, 4'000'000'007), b(1, 4'000'000'009);
  CHECK_THROWS_AS(a * b, Error);
}
