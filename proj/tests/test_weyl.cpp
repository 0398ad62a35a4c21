#include <algorithm>
#include <random>

#include "doctest.h"
#include "hgd/parse.hpp"
#include "hgd/weyl.hpp"

using namespace hgd;

namespace {

VarTablePtr x12() {
  static VarTablePtr v = make_vars({"x1", "x2"});
  return v;
}

DiffOperator op(const char* s, const VarTablePtr& vars = x12()) { return parse_operator(s, vars); }

Monomial mono(std::initializer_list<unsigned> e) {
  Monomial m;
  std::size_t i = 0;
  for (unsigned k : e) m.set(i++, k);
  return m;
}

std::vector<DiffOperator> example_gens() {
  return {op("dx1*dx2 + 1"), op("2*x2*dx2^2 - dx1 + 3*dx2 + 2*x1")};
}

DiffOperator random_op(std::mt19937_64& rng, const VarTablePtr& vars) {
  std::uniform_int_distribution<int> c(-3, 3);
  std::uniform_int_distribution<unsigned> e(0, 2);
  std::vector<DiffOperator::Term> terms;
  for (int i = 0; i < 3; ++i) {
    Monomial d;
    Monomial x;
    for (std::size_t v = 0; v < vars->size(); ++v) {
      d.set(v, e(rng));
      x.set(v, e(rng) % 2);
    }
    if (d.deg > 3) continue;
    Polynomial num = Polynomial::monomial(vars, x, Rational(c(rng)));
    Polynomial den = Polynomial::constant(vars, 1) + Polynomial::variable(vars, i % vars->size());
    if (num.is_zero()) continue;
    terms.push_back({d, RationalFunction(num, i == 0 ? den : Polynomial::constant(vars, 1))});
  }
  return DiffOperator::from_terms(vars, terms);
}

}  // namespace

TEST_CASE("normally ordered products") {
  CHECK(op("dx1") * op("x1") == op("x1*dx1 + 1"));
  CHECK(op("dx1*x1*dx1") == op("x1*dx1^2 + dx1"));
  CHECK((op("dx1") * op("dx2") - op("dx2") * op("dx1")).is_zero());
  CHECK(op("dx1^2") * op("1/x1") == op("1/x1*dx1^2 - 2/x1^2*dx1 + 2/x1^3"));
}

TEST_CASE("graded reverse lexicographic order") {
  // 1 < d2 < d1 < d2^2 < d1 d2 < d1^2
  std::vector<Monomial> chain = {mono({0, 0}), mono({0, 1}), mono({1, 0}),
                                 mono({0, 2}), mono({1, 1}), mono({2, 0})};
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    CHECK(grevlex_greater(chain[i + 1], chain[i]));
    CHECK_FALSE(grevlex_greater(chain[i], chain[i + 1]));
  }
  LeadingTerm lt = leading_term(op("(x1 + x2)*dx1^2*dx2 + (x2^4 + 1)*dx2"));
  CHECK(lt.xi == mono({2, 1}));
  CHECK(lt.coeff == parse_rational("x1 + x2", x12()));
  CHECK(leading_term(op("dx2 + 1")).xi == mono({0, 1}));
  CHECK_THROWS_AS(leading_term(op("0")), ZeroOperator);
}

TEST_CASE("canonical operator text round trip") {
  DiffOperator f = op("(x1 + x2)*dx1^2*dx2 - 1/(2*x2)*dx1 + 3*dx2 - x1");
  CHECK(f.to_string() == "(x1 + x2)*dx1^2*dx2 + (-1/2)/(x2)*dx1 + 3*dx2 - x1");
  CHECK(op(f.to_string().c_str()) == f);
}

TEST_CASE("normal form with quotients") {
  auto g = example_gens();
  DiffOperator f = op("dx1*dx2^3");
  NormalFormResult nf = normal_form(f, g);
  CHECK(nf.remainder == op("1/(2*x2)*(-dx1 + 3*dx2 + 2*x1)"));
  CHECK(nf.quotients[0] == op("dx2^2"));
  // The defining identity fixes q2 = -1/(2*x2).
  CHECK(nf.quotients[1] == op("-1/(2*x2)"));
  CHECK(f - nf.quotients[0] * g[0] - nf.quotients[1] * g[1] - nf.remainder == op("0"));
  CHECK(normal_form(g[1], g).remainder.is_zero());
}

TEST_CASE("buchberger on the two-generator example") {
  auto g = example_gens();
  GroebnerBasis gb = buchberger(g);
  REQUIRE(gb.generators.size() == 3);
  CHECK(gb.standard_monomials == std::vector<Monomial>{mono({0, 0}), mono({0, 1}), mono({1, 0})});
  // The given third element lies in the ideal; its reduced form replaces
  // -3 d1 d2 by +3 using d1 d2 + 1.
  DiffOperator g3 = op("dx1^2 - 3*dx1*dx2 - 2*x1*dx1 + 2*x2*dx2 - 2");
  CHECK(normal_form(g3, gb.generators).remainder.is_zero());
  CHECK(gb.generators.back() == op("dx1^2 - 2*x1*dx1 + 2*x2*dx2 + 1"));
  CHECK(is_groebner(gb.generators));
  for (const auto& x : gb.generators) CHECK(x.leading_coeff().is_one());
}

TEST_CASE("small bases") {
  CHECK(buchberger({op("dx1"), op("dx2")}).standard_monomials == std::vector<Monomial>{mono({0, 0})});
  auto v1 = make_vars({"x"});
  GroebnerBasis b = buchberger({op("dx^2", v1)});
  CHECK(b.standard_monomials.size() == 2);
  GroebnerBasis inf = buchberger({op("dx1")});
  CHECK_THROWS_AS(standard_monomials(inf), InfiniteRank);
  CHECK_THROWS_AS(eliminate_to_ode(inf, 0), InfiniteRank);
  // a coprime-looking pair whose S-pair does not vanish
  GroebnerBasis c = buchberger({op("dx1 - x2"), op("dx2 - x1^2")});
  CHECK(c.generators.size() == 1);
  CHECK(c.generators[0] == op("1"));
  CHECK(c.standard_monomials.empty());
}

TEST_CASE("ordinary differential operator elimination") {
  auto v = make_vars({"x"});
  // homogeneous part of the Airy-type example
  GroebnerBasis b = buchberger({op("3*dx^2 + 6*dx + 3 - x", v)});
  DiffOperator ode = eliminate_to_ode(b, 0);
  CHECK(ode.left_scaled(RationalFunction::constant(v, 3)) == op("3*dx^2 + 6*dx + 3 - x", v));
  GroebnerBasis c = buchberger({op("dx - 5", v)});
  CHECK(eliminate_to_ode(c, 0) == op("dx - 5", v));
  // two-variable example: an ODE in each variable
  GroebnerBasis gb = buchberger(example_gens());
  for (std::size_t var = 0; var < 2; ++var) {
    DiffOperator o = eliminate_to_ode(gb, var);
    CHECK(o.leading_monomial().e[var] == o.order());
    CHECK(o.order() <= 3);
    CHECK(normal_form(o, gb.generators).remainder.is_zero());
  }
}

TEST_CASE("associativity of the product") {
  auto vars = make_vars({"a", "b", "c"});
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    DiffOperator p = random_op(rng, vars);
    DiffOperator q = random_op(rng, vars);
    DiffOperator r = random_op(rng, vars);
    CHECK((p * q) * r == p * (q * r));
  }
}

TEST_CASE("division identity and normal form uniqueness") {
  GroebnerBasis gb = buchberger(example_gens());
  Reducer low(gb.generators, ReducerChoice::lowest_index);
  Reducer high(gb.generators, ReducerChoice::highest_index);
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 15; ++trial) {
    DiffOperator f = random_op(rng, x12());
    NormalFormResult a = low.normal_form(f, true);
    NormalFormResult b = high.normal_form(f, true);
    DiffOperator sum = a.remainder;
    for (std::size_t i = 0; i < gb.generators.size(); ++i) sum += a.quotients[i] * gb.generators[i];
    CHECK(sum == f);
    CHECK(a.remainder == b.remainder);
    for (const auto& t : a.remainder.terms()) {
      for (const auto& g : gb.generators) CHECK_FALSE(g.leading_monomial().divides(t.d));
    }
  }
  // against a non-Groebner list the identity still holds
  auto g = example_gens();
  DiffOperator f = op("x1*dx1^2*dx2 + dx2^3 - 1/x2");
  NormalFormResult nf = normal_form(f, g);
  CHECK(f == nf.quotients[0] * g[0] + nf.quotients[1] * g[1] + nf.remainder);
}

TEST_CASE("rank is invariant under generator permutations") {
  auto g = example_gens();
  g.push_back(op("dx1^2 - 3*dx1*dx2 - 2*x1*dx1 + 2*x2*dx2 - 2"));
  std::vector<std::size_t> perm = {0, 1, 2};
  do {
    std::vector<DiffOperator> p;
    for (auto i : perm) p.push_back(g[i]);
    GroebnerBasis gb = buchberger(p);
    CHECK(gb.rank() == 3);
    CHECK(gb.generators == buchberger(g).generators);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("ideal file parsing") {
  Ideal id = parse_ideal("# example\nvars: x y\n\ndx*dy + 1  # first\n2*y*dy^2 + 3*dy - dx + 2*x\n");
  CHECK(id.vars->size() == 2);
  CHECK(id.generators.size() == 2);
  CHECK(parse_ideal(format_ideal(id)).generators == id.generators);
  CHECK_THROWS_AS(parse_ideal(""), ParseError);
  try {
    parse_ideal("vars: x\n dx + $\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 7);
  }
  CHECK_THROWS_AS(parse_ideal("vars: x\nx dx\n"), ParseError);  // no juxtaposition
  CHECK_THROWS_AS(parse_ideal("vars: x\n1/dx\n"), ParseError);
  CHECK_THROWS_AS(parse_ideal("vars: x\ndq\n"), ParseError);
  CHECK(parse_operator("0.25*x", make_vars({"x"})) == parse_operator("x/4", make_vars({"x"})));
}
