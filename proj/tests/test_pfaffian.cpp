#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace hgd;
using namespace hgd::testing;

namespace {

RationalFunction rf(const char* s, const VarTablePtr& vars) { return parse_rational(s, vars); }

RatMatrix rat_matrix(const std::vector<std::vector<const char*>>& rows, const VarTablePtr& vars) {
  RatMatrix out;
  for (const auto& row : rows) {
    out.emplace_back();
    for (const char* s : row) out.back().push_back(rf(s, vars));
  }
  return out;
}

}  // namespace

TEST_CASE("non-monic basis of the two-variable example") {
  PfaffianSystem P = yang_system();
  const auto& v = P.vars;
  CHECK(P.matrices[0] == rat_matrix({{"0", "1/x", "0"}, {"-x", "(2*x^2+1)/x", "-2*x"}, {"-y", "0", "0"}}, v));
  CHECK(P.matrices[1] == rat_matrix({{"0", "0", "1/y"}, {"-x", "0", "0"}, {"-x", "(1/2)/x", "(-1/2)/y"}}, v));
  CHECK(P.grad_matrix == rat_matrix({{"0", "1/x", "0"}, {"0", "0", "1/y"}}, v));
  CHECK(is_integrable(P));

  std::vector<double> one = {1, 1};
  Eigen::MatrixXd expected(3, 3);
  expected << 0, 1, 0, -1, 3, -2, -1, 0, 0;
  CHECK((P.eval_matrix(0, one) - expected).norm() < 1e-14);

  std::vector<double> pole = {0, 1};
  try {
    P.eval_matrix(0, pole);
    FAIL("expected a pole");
  } catch (const DenominatorNearZero& e) {
    CHECK(e.denominator() == "x");
  }
}

TEST_CASE("companion matrix of g'' = 0") {
  auto vars = make_vars({"x"});
  PfaffianSystem P = build_pfaffian(buchberger({parse_operator("dx^2", vars)}));
  CHECK(P.matrices[0] == rat_matrix({{"0", "1"}, {"0", "0"}}, vars));
  auto H = hessian_matrices(P);
  CHECK(H[0] == rat_matrix({{"0", "0"}, {"0", "0"}}, vars));
  std::vector<double> shift = {-1};
  PfaffianSystem T = gauge_tilt(P, shift);
  std::vector<double> z = {0.3};
  Eigen::MatrixXd expected(2, 2);
  expected << -1, 1, 0, -1;
  CHECK((T.eval_matrix(0, z) - expected).norm() < 1e-15);
  std::vector<double> zero = {0};
  CHECK((gauge_tilt(P, zero).eval_matrix(0, z) - P.eval_matrix(0, z)).norm() == 0);
}

TEST_CASE("a basis that does not span the quotient is rejected") {
  GroebnerBasis gb = yang_basis();
  CHECK_THROWS_AS(build_pfaffian(gb, parse_operator_list("1, dx, x*dx", gb.vars)), DimensionMismatch);
  CHECK_THROWS_AS(build_pfaffian(gb, parse_operator_list("1, dx", gb.vars)), DimensionMismatch);
}

TEST_CASE("hessian first rows against normal forms of second derivatives") {
  GroebnerBasis gb = yang_basis();
  PfaffianSystem P = build_pfaffian(gb);
  auto H = hessian_matrices(P);
  const std::size_t d = P.dim();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Monomial m;
      m.set(i, 1);
      m.set(j, i == j ? 2 : 1);
      DiffOperator nf = normal_form(DiffOperator::monomial(gb.vars, m, RationalFunction::constant(gb.vars, 1)),
                                    gb.generators)
                            .remainder;
      for (std::size_t k = 0; k < P.rank(); ++k) {
        CHECK(H[i * d + j][0][k] == nf.coefficient(gb.standard_monomials[k]));
      }
      CHECK(H[i * d + j][0] == H[j * d + i][0]);
    }
  }
}

TEST_CASE("Fisher-Bingham n = 1 system is integrable and consistent") {
  const PfaffianSystem& P = fb_pfaffian(1);
  REQUIRE(P.symbolic());
  CHECK(P.rank() == 4);
  CHECK(is_integrable(P));
  for (std::size_t i = 0; i < P.dim(); ++i) CHECK(P.matrices[i][0] == P.grad_matrix[i]);
  // rows for y1, y2 select the basis elements dy1, dy2
  std::vector<std::string> names;
  for (const auto& b : P.basis) names.push_back(b.to_string());
  CHECK(names == std::vector<std::string>{"1", "dr", "dy2", "dy1"});
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& row = P.grad_matrix[fb_y_index(1, i)];
    for (std::size_t k = 0; k < 4; ++k) CHECK(row[k].is_constant());
    CHECK(row[i == 0 ? 3 : 2].is_one());
  }
  auto H = hessian_matrices(P);
  const std::size_t d = P.dim();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) CHECK(H[i * d + j][0] == H[j * d + i][0]);

  std::vector<double> c = {0.1, -0.2, 0.3, 0.4, -0.5, 0};
  PfaffianSystem T = gauge_tilt(P, c);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 3; ++k) {
    auto z = random_params(1, rng).point();
    CHECK(integrability_defect(T, z) < 1e-12);
  }
}

TEST_CASE("pointwise system agrees with the symbolic one") {
  const PfaffianSystem& S = fb_pfaffian(1);
  PfaffianSystem L = fb_local_pfaffian(1);
  REQUIRE(!L.symbolic());
  std::mt19937_64 rng(11);
  for (int k = 0; k < 5; ++k) {
    auto z = random_params(1, rng).point();
    for (std::size_t i = 0; i < S.dim(); ++i) {
      CHECK((S.eval_matrix(i, z) - L.eval_matrix(i, z)).cwiseAbs().maxCoeff() < 1e-10);
    }
    CHECK((S.eval_grad(z) - L.eval_grad(z)).cwiseAbs().maxCoeff() < 1e-10);
    auto ds = S.eval_matrix_derivatives(z);
    auto dl = L.eval_matrix_derivatives(z);
    for (std::size_t j = 0; j < S.dim(); ++j)
      for (std::size_t i = 0; i < S.dim(); ++i) CHECK((ds[j][i] - dl[j][i]).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("matrix derivatives agree with finite differences") {
  PfaffianSystem P = yang_system();
  std::vector<double> z = {0.7, -1.3};
  auto dP = P.eval_matrix_derivatives(z);
  auto dA = P.eval_grad_derivatives(z);
  const double h = 1e-6;
  for (std::size_t j = 0; j < 2; ++j) {
    auto zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    for (std::size_t i = 0; i < 2; ++i) {
      Eigen::MatrixXd fd = (P.eval_matrix(i, zp) - P.eval_matrix(i, zm)) / (2 * h);
      CHECK((fd - dP[j][i]).cwiseAbs().maxCoeff() < 1e-6);
    }
    Eigen::MatrixXd fd = (P.eval_grad(zp) - P.eval_grad(zm)) / (2 * h);
    CHECK((fd - dA[j]).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("pointwise n = 2 system is integrable") {
  const PfaffianSystem& P = fb_pfaffian(2);
  CHECK(P.rank() == 6);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 3; ++k) CHECK(integrability_defect(P, random_params(2, rng).point()) < 1e-10);
}

TEST_CASE("JSON round trip") {
  PfaffianSystem P = yang_system();
  std::string text = to_json(P);
  PfaffianSystem Q = pfaffian_from_json(text);
  CHECK(Q.matrices == P.matrices);
  CHECK(Q.grad_matrix == P.grad_matrix);
  CHECK(to_json(Q) == text);
  CHECK_THROWS_AS(pfaffian_from_json("{"), ParseError);
}
