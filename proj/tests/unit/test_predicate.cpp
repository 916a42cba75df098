#include <doctest.h>

#include "slackcme/predicate.hpp"

using namespace slackcme;

namespace {

const std::vector<std::string> kSpecies{"X", "Z", "X1"};

bool eval(const char* expr, std::vector<int> x) {
  return parse_predicate(expr, kSpecies)(x);
}

}  // namespace

TEST_CASE("comparisons and boolean structure agree with direct evaluation") {
  const auto both = parse_predicate("X > 3 && Z > 3", kSpecies);
  const auto either = parse_predicate("X == 0 || Z == 0", kSpecies);
  const auto nested = parse_predicate("X1 == 1 && (X == 1 || X == 2)", kSpecies);
  const auto lin = parse_predicate("X + 2*Z <= 10", kSpecies);
  const auto neg = parse_predicate("!(X >= 2) || -X + Z - 1 != 0", kSpecies);
  for (int a = 0; a < 7; ++a)
    for (int b = 0; b < 7; ++b)
      for (int c = 0; c < 3; ++c) {
        const std::vector<int> x{a, b, c};
        CAPTURE(a);
        CAPTURE(b);
        CAPTURE(c);
        CHECK(both(x) == (a > 3 && b > 3));
        CHECK(either(x) == (a == 0 || b == 0));
        CHECK(nested(x) == (c == 1 && (a == 1 || a == 2)));
        CHECK(lin(x) == (a + 2 * b <= 10));
        CHECK(neg(x) == (!(a >= 2) || -a + b - 1 != 0));
      }
}

TEST_CASE("precedence of && over ||") {
  CHECK(eval("X == 1 || X == 0 && Z == 5", {1, 0, 0}));
  CHECK_FALSE(eval("X == 1 || X == 0 && Z == 5", {0, 0, 0}));
  CHECK(eval("3 < X", {4, 0, 0}));
  CHECK(eval("X - X == 0", {9, 9, 9}));
  CHECK(eval("2*X1 >= 4", {0, 0, 2}));
}

TEST_CASE("malformed expressions are rejected with a column") {
  CHECK_THROWS_AS(parse_predicate("Y > 1", kSpecies), ParseError);
  CHECK_THROWS_AS(parse_predicate("X >", kSpecies), ParseError);
  CHECK_THROWS_AS(parse_predicate("X 3", kSpecies), ParseError);
  CHECK_THROWS_AS(parse_predicate("(X > 1", kSpecies), ParseError);
  CHECK_THROWS_AS(parse_predicate("X > 1 Z", kSpecies), ParseError);
  CHECK_THROWS_AS(parse_predicate("2* > 1", kSpecies), ParseError);
  try {
    parse_predicate("X > 1 && Q < 2", kSpecies);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.column() == 10);
  }
}
