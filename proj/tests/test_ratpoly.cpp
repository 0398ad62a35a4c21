#include <cmath>
#include <random>

#include "doctest.h"
#include "hgd/parse.hpp"
#include "hgd/ratpoly.hpp"

using namespace hgd;

namespace {

VarTablePtr xy() {
  static VarTablePtr v = make_vars({"x", "y", "z"});
  return v;
}

RationalFunction rf(const char* s) { return parse_rational(s, xy()); }
Polynomial poly(const char* s) {
  RationalFunction r = rf(s);
  REQUIRE(r.is_polynomial());
  return r.num();
}

// Random polynomial with small integer coefficients.
Polynomial random_poly(std::mt19937_64& rng, unsigned max_deg, int terms) {
  std::uniform_int_distribution<int> coeff(-5, 5);
  std::uniform_int_distribution<unsigned> expo(0, max_deg);
  std::vector<Polynomial::Term> t;
  for (int i = 0; i < terms; ++i) {
    Monomial m;
    for (std::size_t v = 0; v < 3; ++v) m.set(v, expo(rng));
    t.push_back({m, Rational(coeff(rng))});
  }
  return Polynomial::from_terms(xy(), t);
}

RationalFunction random_rf(std::mt19937_64& rng) {
  Polynomial den;
  do {
    den = random_poly(rng, 2, 3);
  } while (den.is_zero());
  return RationalFunction(random_poly(rng, 2, 3), den);
}

}  // namespace

TEST_CASE("polynomial arithmetic") {
  CHECK(poly_arith(poly("x+1"), poly("x-1"), ArithOp::add) == poly("2*x"));
  CHECK(poly_arith(poly("x-y"), poly("x+y"), ArithOp::mul) == poly("x^2-y^2"));
  CHECK(poly("x+1").to_string() == "x + 1");
  CHECK(poly("3*x^2*y - y + 1/2").to_string() == "3*x^2*y - y + 1/2");
}

TEST_CASE("content and primitive part") {
  Polynomial p = poly("2*x+2");
  CHECK(p.content() == 2);
  CHECK(p.primitive_part() == poly("x+1"));
  CHECK(p.primitive_part().scaled(p.content()) == p);
  Polynomial q = poly("3/4*x - 3/2*y");
  CHECK(q.primitive_part().scaled(q.content()) == q);
  CHECK(q.primitive_part() == poly("x - 2*y"));
}

TEST_CASE("rational function arithmetic") {
  CHECK(rat_arith(rf("1/x"), rf("1/x"), ArithOp::add) == rf("2/x"));
  CHECK(rf("(x^2-1)/(x-1)") == rf("x+1"));
  CHECK(rat_arith(rf("(x+y)/(x-y)"), rf("(x-y)/(x+y)"), ArithOp::mul) == rf("1"));
  CHECK_THROWS_AS(rat_arith(rf("x"), rf("0"), ArithOp::div), DivisionByZero);
  // rational content lives in the numerator
  CHECK(rf("(2*x^2*y - 1)/(3*x*z)").to_string() == "(2/3*x^2*y - 1/3)/(x*z)");
  // denominators are primitive with a positive leading coefficient
  RationalFunction r = rf("1/(-2*x+4)");
  CHECK(r.den() == poly("x-2"));
  CHECK(r.num() == poly("-1/2"));
}

TEST_CASE("rational function derivative") {
  CHECK(rat_diff(rf("x^2*y"), 0) == rf("2*x*y"));
  CHECK(rat_diff(rf("1/x"), 0) == rf("-1/x^2"));
  CHECK(rat_diff(rf("x/(x+1)"), 1).is_zero());
}

TEST_CASE("rational function evaluation") {
  const double p1[] = {1.0, 0.0, 0.0};
  CHECK(rat_eval(rf("x/(x+1)"), p1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(rat_eval(rf("1/(x-1)"), p1), DenominatorNearZero);
  const double p2[] = {2.0, 1.0, 0.0};
  // (x^2-y^2)/(x-y) reduces to x+y
  RationalFunction r = rf("(x^2-y^2)/(x-y)");
  CHECK(r == rf("x+y"));
  CHECK(rat_eval(r, p2) == doctest::Approx(3.0));
  try {
    rat_eval(rf("1/(x-1)"), p1);
  } catch (const DenominatorNearZero& e) {
    CHECK(e.denominator() == "x - 1");
  }
}

TEST_CASE("gcd") {
  CHECK(gcd(poly("x^2-1"), poly("x^2+2*x+1")) == poly("x+1"));
  CHECK(gcd(poly("(x+y)*(x-z)^2*y"), poly("(x-z)*(y+1)*(x+y)")) == poly("(x+y)*(x-z)"));
  CHECK(gcd(poly("6*x*y"), poly("4*x^2")) == poly("x"));
  CHECK(gcd(poly("x+y"), poly("x-y")) == poly("1"));
  CHECK(gcd(poly("0"), poly("-2*x-2")) == poly("x+1"));
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    Polynomial a = random_poly(rng, 2, 3);
    Polynomial b = random_poly(rng, 2, 3);
    Polynomial c = random_poly(rng, 2, 3);
    if (a.is_zero() || b.is_zero() || c.is_zero()) continue;
    Polynomial g = gcd(a * c, b * c);
    // c divides the gcd, and the gcd divides both products
    CHECK(Polynomial::divide_exact(g, c.primitive_part()).has_value());
    CHECK(Polynomial::divide_exact(a * c, g).has_value());
    CHECK(Polynomial::divide_exact(b * c, g).has_value());
    Polynomial h = gcd(*Polynomial::divide_exact(a * c, g), *Polynomial::divide_exact(b * c, g));
    CHECK(h.is_constant());
  }
}

TEST_CASE("field axioms on random rational functions") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 30; ++trial) {
    RationalFunction a = random_rf(rng);
    RationalFunction b = random_rf(rng);
    CHECK((a + b) - b == a);
    if (!b.is_zero()) CHECK((a * b) / b == a);
    CHECK(a * (b + a) == a * b + a * a);
  }
}

TEST_CASE("product rule on random rational functions") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    RationalFunction f = random_rf(rng);
    RationalFunction g = random_rf(rng);
    for (std::size_t v = 0; v < 3; ++v) {
      CHECK((f * g).derivative(v) == f * g.derivative(v) + g * f.derivative(v));
    }
  }
}

TEST_CASE("canonical form is independent of construction order") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    RationalFunction a = random_rf(rng);
    RationalFunction b = random_rf(rng);
    RationalFunction c = random_rf(rng);
    RationalFunction l = (a + b) + c;
    RationalFunction r = c + (b + a);
    CHECK(l == r);
    CHECK(l.to_string() == r.to_string());
    if (!l.is_zero()) CHECK(parse_rational(l.to_string(), xy()) == l);
  }
}

TEST_CASE("evaluation agrees with separate numerator and denominator") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 30; ++trial) {
    RationalFunction a = random_rf(rng);
    std::vector<double> pt = {u(rng), u(rng), u(rng)};
    double d = a.den().evaluate(pt);
    if (std::abs(d) < 1e-3) continue;
    double expect = a.num().evaluate(pt) / d;
    CHECK(rat_eval(a, pt) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("compiled polynomial matches exact evaluation") {
  Polynomial p = poly("3*x^3*y - 2*y*z^2 + 1/3");
  CompiledPolynomial c(p);
  std::vector<double> pt = {0.7, -1.3, 2.1};
  std::vector<unsigned> deg = {3, 1, 2};
  std::vector<std::vector<double>> powers;
  fill_powers(pt, deg, powers);
  CHECK(c.evaluate(powers) == doctest::Approx(p.evaluate(pt)).epsilon(1e-14));
}

TEST_CASE("variable table mismatch") {
  auto other = make_vars({"a"});
  CHECK_THROWS_AS(Polynomial::variable(xy(), 0) + Polynomial::variable(other, 0), VarTableMismatch);
}
