#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace hgd;
using namespace hgd::testing;

namespace {

const double pi = std::numbers::pi;

std::vector<std::string> texts(const std::vector<DiffOperator>& ops) {
  std::vector<std::string> out;
  for (const auto& g : ops) out.push_back(g.to_string());
  return out;
}

}  // namespace

TEST_CASE("generators for the circle") {
  auto g = texts(fb_generators(1));
  REQUIRE(g.size() == 6);
  CHECK(g[4] == "x12*dx11 + (-2*x11 + 2*x22)*dx12 - x12*dx22 + y2*dy1 - y1*dy2");
  CHECK(g[3] == "dx11 + dx22 - r^2");
  CHECK(fb_generators(2).size() == 11);
  CHECK(fb_generators(3).size() == 10 + 1 + 6 + 1);
  auto red = texts(fb_reduced_generators(1));
  CHECK(std::find(red.begin(), red.end(), "dy1^2 + dy2^2 - r^2") != red.end());
}

TEST_CASE("both generating sets give the same ideal for n = 1") {
  const GroebnerBasis& gb = fb_groebner(1);
  GroebnerBasis rb = buchberger(fb_reduced_generators(1));
  for (const auto& g : fb_reduced_generators(1)) CHECK(normal_form(g, gb.generators).remainder.is_zero());
  for (const auto& g : fb_generators(1)) CHECK(normal_form(g, rb.generators).remainder.is_zero());
  CHECK(texts(gb.generators) == texts(rb.generators));
}

TEST_CASE("toric normal forms of the two generating sets coincide") {
  for (unsigned n : {1u, 2u}) {
    auto a = fb_generators(n), b = fb_reduced_generators(n);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(toric_normal_form(n, a[k]) == toric_normal_form(n, b[k]));
  }
}

TEST_CASE("holonomic ranks") {
  const GroebnerBasis& gb = fb_groebner(1);
  std::vector<std::string> names;
  for (const auto& m : gb.standard_monomials) names.push_back(derivation_string(*gb.vars, m));
  CHECK(names == std::vector<std::string>{"1", "dr", "dy2", "dy1"});
  FBStaircase s = fb_staircase(2);
  names.clear();
  for (const auto& m : s.standard) names.push_back(derivation_string(*fb_vars(2), m));
  CHECK(names == std::vector<std::string>{"1", "dr", "dy3", "dy2", "dy1", "dx33"});
  CHECK(fb_staircase(2, 99).standard == s.standard);
}

TEST_CASE("first and second y-derivatives span the quotient") {
  for (unsigned n : {1u, 2u}) {
    LocalPfaffian::Spec spec;
    spec.vars = fb_vars(n);
    spec.relations = fb_y_relations(n);
    for (std::size_t v = 0; v < spec.vars->size(); ++v) spec.substitution.push_back(fb_substitution(n, v));
    spec.basis.push_back(Monomial{});
    for (std::size_t i = 0; i <= n; ++i) {
      Monomial m;
      m.set(fb_y_index(n, i), 1);
      spec.basis.push_back(m);
    }
    for (std::size_t i = 0; i < n; ++i) {
      Monomial m;
      m.set(fb_y_index(n, i), 2);
      spec.basis.push_back(m);
    }
    CHECK(spec.basis.size() == fb_pfaffian(n).rank());
    CHECK_NOTHROW(LocalPfaffian{spec});
  }
}

TEST_CASE("quadrature at trivial parameters") {
  CHECK(fb_quadrature(FBParams::zero(1), {{0, 0}})[0] == doctest::Approx(2 * pi).epsilon(1e-14));
  auto v = fb_quadrature(FBParams::zero(2), {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(v[0] == doctest::Approx(4 * pi).epsilon(1e-13));
  for (int k = 1; k < 4; ++k) CHECK(std::abs(v[k]) < 1e-13);

  // against a dense trapezoid sum (2 pi I_0(1) = 7.95493)
  FBParams p = FBParams::zero(1);
  p.y = {1, 0};
  const int N = 1000000;
  double s = 0;
  for (int k = 0; k < N; ++k) s += std::exp(std::cos(2 * pi * k / N));
  s *= 2 * pi / N;
  double F = fb_quadrature(p, {{0, 0}})[0];
  CHECK(F == doctest::Approx(s).epsilon(1e-12));
  CHECK(F == doctest::Approx(7.95493).epsilon(1e-6));

  FBParams big = FBParams::zero(2);
  big.x[0] = 400;
  QuadratureOptions tight;
  tight.max_panels = 8;
  CHECK_THROWS_AS(fb_quadrature(big, {{0, 0, 0}}, tight), ToleranceNotReached);
  FBParams n3 = FBParams::zero(3);
  CHECK_THROWS_AS(fb_quadrature(n3, {{0, 0, 0, 0}}), Unsupported);
}

TEST_CASE("radial derivative agrees with finite differences") {
  std::mt19937_64 rng(41);
  for (unsigned n : {1u, 2u}) {
    FBParams p = random_params(n, rng);
    p.r = 1.3;
    Monomial dr, dry;
    dr.set(fb_r_index(n), 1);
    dry.set(fb_r_index(n), 1);
    dry.set(fb_y_index(n, 0), 1);
    Monomial dy;
    dy.set(fb_y_index(n, 0), 1);
    auto v = fb_derivatives(p, {dr, dry});
    const double h = 1e-4;
    FBParams a = p, b = p;
    a.r += h;
    b.r -= h;
    auto fa = fb_derivatives(a, {Monomial{}, dy}), fb = fb_derivatives(b, {Monomial{}, dy});
    CHECK(v[0] == doctest::Approx((fa[0] - fb[0]) / (2 * h)).epsilon(1e-7));
    CHECK(v[1] == doctest::Approx((fa[1] - fb[1]) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("generators annihilate F") {
  std::mt19937_64 rng(43);
  for (unsigned n : {1u, 2u}) {
    for (int k = 0; k < 2; ++k) {
      FBParams p = random_params(n, rng);
      p.r = 0.9;
      for (const auto& g : fb_generators(n)) CHECK(apply_to_F(g, p).relative() < 1e-9);
    }
  }
}

TEST_CASE("density integrates to one") {
  std::mt19937_64 rng(47);
  FBParams p = random_params(2, rng);
  // int p(t) dt = F^{-1} int exp(...) dt, computed by two independent panel counts
  QuadratureOptions coarse;
  coarse.min_panels = 8;
  double a = fb_quadrature(p, {{0, 0, 0}})[0];
  double b = fb_quadrature(p, {{0, 0, 0}}, coarse)[0];
  CHECK(b / a == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("sufficient statistics") {
  SufficientStats s = suff_stats({{1, 0, 0}});
  CHECK(s.s_x == std::vector<double>{1, 0, 0, 0, 0, 0});
  CHECK(s.s_y == std::vector<double>{1, 0, 0});
  s = suff_stats({{1, 0, 0}, {-1, 0, 0}});
  CHECK(s.s_x[0] == 1);
  CHECK(s.s_y[0] == 0);
  std::mt19937_64 rng(53);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> pts;
  for (int k = 0; k < 50; ++k) {
    std::vector<double> t = {nd(rng), nd(rng), nd(rng)};
    double r = std::sqrt(t[0] * t[0] + t[1] * t[1] + t[2] * t[2]);
    for (double& v : t) v /= r;
    pts.push_back(t);
  }
  s = suff_stats(pts);
  CHECK(s.s_x[fb_x_index(2, 0, 0)] + s.s_x[fb_x_index(2, 1, 1)] + s.s_x[fb_x_index(2, 2, 2)] ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(suff_stats({}), EmptySample);
  try {
    suff_stats({{1, 0, 0}, {1, 1, 0}});
    FAIL("expected a non-unit row");
  } catch (const NonUnitPoint& e) {
    CHECK(e.row() == 2);
  }
}

TEST_CASE("statistics files") {
  SufficientStats s = parse_stats_json(
      R"({"n":2,"S_ij":{"11":0.3119,"12":0.0292,"13":0.0707,"22":0.3605,"23":0.0462,"33":0.3276},)"
      R"("S_i":[-0.0063,-0.0054,-0.0762],"N":188})");
  SufficientStats a = astro_stats();
  CHECK(s.s_x == a.s_x);
  CHECK(s.s_y == a.s_y);
  CHECK(s.N == 188);
  CHECK_THROWS_AS(parse_stats_json("{\"n\":2}"), ParseError);
  CHECK_THROWS_AS(parse_stats_json("not json"), ParseError);

  std::string path = "hgd_test_sample.csv";
  {
    std::ofstream out(path);
    out << "t1,t2\n1,0\n0,-1\n";
  }
  auto rows = read_sample_csv(path);
  std::remove(path.c_str());
  CHECK(rows == std::vector<std::vector<double>>{{1, 0}, {0, -1}});
}

TEST_CASE("uniform moments and the start point") {
  for (unsigned n : {1u, 2u}) {
    auto m = uniform_moments(n);
    std::vector<TMonomial> ms(4, TMonomial(n + 1, 0));
    ms[1][0] = 2;
    ms[2][0] = 4;
    ms[3][0] = 2;
    ms[3][1] = 2;
    auto v = fb_quadrature(FBParams::zero(n), ms);
    for (int k = 0; k < 3; ++k) CHECK(v[k + 1] / v[0] == doctest::Approx(m[k]).epsilon(1e-10));
  }
  CHECK(uniform_moments(2)[1] == doctest::Approx(0.2));
  CHECK(uniform_moments(2)[2] == doctest::Approx(1.0 / 15));

  SufficientStats u;
  u.n = 2;
  u.s_x = {1.0 / 3, 0, 0, 1.0 / 3, 0, 1.0 / 3};
  u.s_y = {0, 0, 0};
  auto z0 = start_point(2, u);
  REQUIRE(z0.size() == 10);
  for (std::size_t k = 0; k < 9; ++k) CHECK(std::abs(z0[k]) < 1e-12);
  CHECK(z0[9] == 1);

  MLEObjective obj(2, astro_stats());
  DomainPreset box = domain_preset("astro");
  auto dom = obj.domain(box.x, box.y);
  auto z = start_point(2, astro_stats(), &dom);
  for (std::size_t k = 0; k < z.size(); ++k) CHECK(dom[k].contains(z[k]));
  CHECK(std::isfinite(obj.value(z)));
  std::vector<double> origin(10, 0.0);
  origin[9] = 1;
  CHECK(obj.value(z) < obj.value(origin));
}

TEST_CASE("initial state matches the tilted objective") {
  MLEObjective obj(1, suff_stats({{0.6, 0.8}, {1, 0}, {0, 1}}));
  std::vector<double> z = {0.3, -0.2, 0.9, 0.5, -0.4, 1.0};
  StateVector s = obj.initial_state(z);
  CHECK(s.values[0] == doctest::Approx(obj.value(z)).epsilon(1e-13));
  std::vector<double> bad = z;
  bad[5] = 2;
  CHECK_THROWS_AS(obj.initial_state(bad), DimensionMismatch);
}

TEST_CASE("objective is invariant under identity shifts") {
  MLEObjective obj(2, astro_stats());
  std::vector<double> z = {0.3, 0.1, -0.5, 0.2, 0.4, -1.0, 0.1, -0.2, 0.3, 1.0};
  std::vector<double> w = z;
  for (std::size_t i = 0; i < 3; ++i) w[fb_x_index(2, i, i)] += 0.7;
  CHECK(obj.value(w) == doctest::Approx(obj.value(z)).epsilon(1e-12));
  FBParams tf = trace_free(FBParams::from_point(2, z));
  CHECK(obj.value(tf.point()) == doctest::Approx(obj.value(z)).epsilon(1e-12));
}

TEST_CASE("spectral report") {
  FBParams p = FBParams::zero(2);
  p.x = {0.5, 0, 0, -2, 0, 1};
  p.y = {3, 0, 4};
  SpectralReport r = spectral_report(p);
  CHECK(r.lambda[0] == doctest::Approx(1));
  CHECK(r.lambda[1] == doctest::Approx(0.5));
  CHECK(r.lambda[2] == doctest::Approx(-2));
  CHECK(r.y_norm == doctest::Approx(5));
  std::mt19937_64 rng(59);
  FBParams q = random_params(2, rng);
  r = spectral_report(q);
  auto A = q.matrix();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double v = 0;
      for (std::size_t k = 0; k < 3; ++k) v += r.lambda[k] * r.axes[k][i] * r.axes[k][j];
      CHECK(v == doctest::Approx(A[i][j]).epsilon(1e-10));
    }
}

TEST_CASE("domain presets") {
  DomainPreset a = domain_preset("astro");
  CHECK(a.x[fb_x_index(2, 1, 2)].hi == 20);
  CHECK(a.y[1].hi == -0.001);
  CHECK(a.start.empty());
  DomainPreset m = domain_preset("magnetism");
  CHECK(m.y[1].lo == -32);
  CHECK(m.start.size() == 10);
  CHECK_THROWS_AS(domain_preset("nowhere"), ParseError);
}
