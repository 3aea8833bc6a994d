#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "maxlab/rational.hpp"

using maxlab::Rational;

TEST_CASE("rational normal form") {
  CHECK(Rational(6, -4) == Rational(-3, 2));
  CHECK(Rational(0, 5) == Rational(0));
  CHECK(Rational(0, -5).den() == 1);
  CHECK(Rational(-3, 2).str() == "-3/2");
  CHECK(Rational(4).str() == "4/1");
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("rational arithmetic and order") {
  Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == b);
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(b < a);
  CHECK(-a < b);
  CHECK(maxlab::rmax(a, b) == a);
  CHECK(maxlab::rmin(a, b) == b);
  CHECK_THROWS(a / Rational(0));
}

TEST_CASE("rational parse") {
  CHECK(Rational::parse("7") == Rational(7));
  CHECK(Rational::parse("-2/6") == Rational(-1, 3));
  CHECK(Rational::parse("0.25") == Rational(1, 4));
  CHECK_THROWS(Rational::parse("x"));
}

TEST_CASE("rational overflow is reported, not wrapped") {
  const std::int64_t big = std::numeric_limits<std::int64_t>::max() / 2;
  CHECK_THROWS_AS(Rational(big) * Rational(big), std::overflow_error);
  // Cross-cancellation keeps products of large reciprocals exact.
  CHECK(Rational(big, 3) * Rational(3, big) == Rational(1));
}
