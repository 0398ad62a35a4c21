#ifndef HGD_TESTS_SUPPORT_HPP
#define HGD_TESTS_SUPPORT_HPP

// Independent numeric oracles shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "hgd/fisher_bingham.hpp"
#include "hgd/parse.hpp"

namespace hgd::testing {

struct Residual {
  double value = 0;  // l . F
  double scale = 0;  // largest |term|
  double relative() const { return std::abs(value) / std::max(scale, 1e-300); }
};

// Applies an operator to F at a point: sum c(z) d^beta F(z) with the
// derivatives taken from quadrature moments.
inline Residual apply_to_F(const DiffOperator& op, const FBParams& p, const QuadratureOptions& q = {}) {
  std::vector<Monomial> derivs;
  for (const auto& t : op.terms()) derivs.push_back(t.d);
  auto vals = fb_derivatives(p, derivs, q);
  auto point = p.point();
  Residual r;
  for (std::size_t k = 0; k < derivs.size(); ++k) {
    double term = op.terms()[k].coeff.evaluate(point, 0) * vals[k];
    r.value += term;
    r.scale = std::max(r.scale, std::abs(term));
  }
  return r;
}

// Normal form modulo the toric operators d_xij - d_yi d_yj in an order that
// eliminates d_x: every d_xij is replaced by d_yi d_yj.
inline DiffOperator toric_normal_form(unsigned n, const DiffOperator& f) {
  std::vector<DiffOperator::Term> terms;
  for (const auto& t : f.terms()) {
    Monomial m;
    for (std::size_t v = 0; v < f.vars()->size(); ++v) {
      if (t.d[v]) {
        Monomial s = fb_substitution(n, v);
        for (unsigned k = 0; k < t.d[v]; ++k) m = m + s;
      }
    }
    terms.push_back({m, t.coeff});
  }
  return DiffOperator::from_terms(f.vars(), std::move(terms));
}

// Random parameters with distinct diagonal entries (away from the singular
// locus of the n = 1 system) and r = 1.
inline FBParams random_params(unsigned n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  FBParams p = FBParams::zero(n);
  for (double& v : p.x) v = u(rng);
  for (double& v : p.y) v = u(rng);
  for (std::size_t i = 0; i <= n; ++i) p.x[fb_x_index(n, i, i)] += 0.7 * static_cast<double>(i);
  return p;
}

// G of a Pfaffian system with monomial basis, by quadrature.
inline StateVector quadrature_state(unsigned n, const PfaffianSystem& P, const FBParams& p,
                                    const QuadratureOptions& q = {}) {
  std::vector<Monomial> derivs;
  for (const auto& b : P.basis) derivs.push_back(b.leading_monomial());
  return {p.point(), fb_derivatives(p, derivs, q)};
}

// x + the given rotation R acting as t -> R t: x' = R x R^T, y' = R y.
inline FBParams rotate(const FBParams& p, const std::vector<std::vector<double>>& R) {
  const std::size_t m = p.n + 1;
  auto A = p.matrix();
  std::vector<std::vector<double>> B(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) B[i][j] += R[i][k] * A[k][l] * R[j][l];
  FBParams out = p;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) out.x[fb_x_index(p.n, i, j)] = i == j ? B[i][i] : 2 * B[i][j];
    out.y[i] = 0;
    for (std::size_t k = 0; k < m; ++k) out.y[i] += R[i][k] * p.y[k];
  }
  return out;
}

// Rotation by angle a in the (i, j) coordinate plane.
inline std::vector<std::vector<double>> plane_rotation(std::size_t m, std::size_t i, std::size_t j, double a) {
  std::vector<std::vector<double>> R(m, std::vector<double>(m, 0.0));
  for (std::size_t k = 0; k < m; ++k) R[k][k] = 1;
  R[i][i] = R[j][j] = std::cos(a);
  R[i][j] = -std::sin(a);
  R[j][i] = std::sin(a);
  return R;
}

// The worked two-variable example with the non-monic basis {1, x dx, y dy}.
inline GroebnerBasis yang_basis() {
  auto vars = make_vars({"x", "y"});
  return buchberger({parse_operator("dx*dy + 1", vars), parse_operator("2*y*dy^2 - dx + 3*dy + 2*x", vars)});
}

inline PfaffianSystem yang_system() {
  GroebnerBasis gb = yang_basis();
  return build_pfaffian(gb, parse_operator_list("1, x*dx, y*dy", gb.vars));
}

// Airy-type objective g = e^{1-x} int_0^inf e^{xt - t^3} dt and g'.
inline double airy_moment(double x, int k) {
  // midpoint rule; the integrand is negligible beyond t = 8 for x <= 5
  const int N = 400000;
  const double h = 12.0 / N;
  double s = 0;
  for (int i = 0; i < N; ++i) {
    double t = (i + 0.5) * h;
    s += std::pow(t, k) * std::exp(x * t - t * t * t);
  }
  return s * h;
}

inline StateVector airy_state(double x) {
  double e = std::exp(1 - x);
  double m0 = airy_moment(x, 0), m1 = airy_moment(x, 1);
  return {{x}, {e * m0, e * (m1 - m0)}};
}

inline PfaffianSystem airy_system() {
  auto vars = make_vars({"x"});
  PfaffianSystem P = build_pfaffian(buchberger({parse_operator("3*dx^2 + 6*dx - x + 3", vars)}));
  P.inhomo = [](std::size_t, std::span<const double> z) {
    Eigen::VectorXd q(2);
    q << 0, std::exp(1 - z[0]) / 3;
    return q;
  };
  return P;
}

inline SufficientStats astro_stats() {
  SufficientStats s;
  s.n = 2;
  s.s_x = {0.3119, 0.0292, 0.0707, 0.3605, 0.0462, 0.3276};
  s.s_y = {-0.0063, -0.0054, -0.0762};
  s.N = 188;
  return s;
}

inline SufficientStats magnetism_stats() {
  SufficientStats s;
  s.n = 2;
  s.s_x = {0.045, -0.075, 0.014, 0.921, -0.122, 0.034};
  s.s_y = {0.082, -0.959, 0.131};
  return s;
}

}  // namespace hgd::testing

#endif  // HGD_TESTS_SUPPORT_HPP
