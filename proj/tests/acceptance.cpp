// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace hgd;
using namespace hgd::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("criterion %2d %s  %s:%s (%.2f s)\n", id, o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str(),
              secs);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::set<std::string> names(const VarTable& vars, const std::vector<Monomial>& ms) {
  std::set<std::string> out;
  for (const auto& m : ms) out.insert(derivation_string(vars, m));
  return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

FitResult fit(const MLEObjective& obj, const std::string& preset, double grid, const std::vector<double>& start) {
  DomainPreset box = domain_preset(preset);
  DescentConfig cfg;
  cfg.domain = obj.domain(box.x, box.y);
  cfg.step = grid;
  cfg.transport.grid = grid;
  cfg.max_iter = 200000;
  cfg.record_trajectory = false;
  return minimize(obj.system(), obj.initial_state(start), cfg);
}

}  // namespace

int main() {
  std::cout.precision(10);
  std::optional<FitResult> astro;

  criterion(1, "worked two-variable example", [](Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    GroebnerBasis gb = yang_basis();
    const auto& v = gb.vars;
    DiffOperator g1 = parse_operator("dx*dy + 1", v);
    DiffOperator g3 = parse_operator("dx^2 - 3*dx*dy - 2*x*dx + 2*y*dy - 2", v);
    o.require(normal_form(g3, gb.generators).remainder.is_zero(), "g3 in the ideal");
    o.require(gb.generators.size() == 3 && gb.generators.back() == g3 + g1.left_scaled(RationalFunction::constant(v, 3)),
              "basis element with leading term dx^2 is g3 reduced by 3 g1");
    o.require(names(*v, gb.standard_monomials) == std::set<std::string>{"1", "dx", "dy"}, "standard monomials");
    PfaffianSystem P = build_pfaffian(gb, parse_operator_list("1, x*dx, y*dy", v));
    auto M = [&](std::vector<std::vector<const char*>> rows) {
      RatMatrix out;
      for (auto& r : rows) {
        out.emplace_back();
        for (const char* s : r) out.back().push_back(parse_rational(s, v));
      }
      return out;
    };
    o.require(P.matrices[0] == M({{"0", "1/x", "0"}, {"-x", "(2*x^2+1)/x", "-2*x"}, {"-y", "0", "0"}}), "P1");
    o.require(P.matrices[1] == M({{"0", "0", "1/y"}, {"-x", "0", "0"}, {"-x", "(1/2)/x", "(-1/2)/y"}}), "P2");
    double t = seconds_since(t0);
    o.detail << " basis, staircase {1, dx, dy}, P1 and P2 exact";
    o.require(t < 1, "runtime < 1 s");
  });

  criterion(2, "holonomic ranks", [](Outcome& o) {
    const GroebnerBasis& gb1 = fb_groebner(1);
    o.require(gb1.rank() == 4 && names(*gb1.vars, gb1.standard_monomials) ==
                                     std::set<std::string>{"1", "dy1", "dy2", "dr"},
              "n = 1 rank 4");
    auto t0 = std::chrono::steady_clock::now();
    FBStaircase s2 = fb_staircase(2);
    double t = seconds_since(t0);
    o.require(s2.standard.size() == 6 && names(*fb_vars(2), s2.standard) ==
                                             std::set<std::string>{"1", "dy1", "dy2", "dy3", "dr", "dx33"},
              "n = 2 rank 6");
    o.require(fb_staircase(2, 7).standard == s2.standard, "n = 2 staircase independent of the specialization");
    o.detail << " n=1 {1, dy1, dy2, dr}; n=2 {1, dy1, dy2, dy3, dr, dx33} in " << t << " s";
    o.require(t < 60, "runtime < 60 s");
  });

  criterion(3, "Airy-type example", [](Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    PfaffianSystem P = airy_system();
    DescentConfig cfg;
    cfg.step = 0.1;
    cfg.transport.grid = 0.1;
    cfg.domain = {{0, 5}};
    FitResult r = minimize(P, airy_state(0), cfg);
    double t = seconds_since(t0);
    o.detail << " argmin " << r.argmin[0] << ", value " << r.value;
    o.require(std::abs(r.argmin[0] - 3.4) <= 0.1, "argmin within 0.1 of 3.4");
    o.require(std::abs(r.value - 1.016) <= 5e-3, "value within 5e-3 of 1.016");
    o.require(t < 1, "runtime < 1 s");
  });

  criterion(4, "astronomical MLE", [&](Outcome& o) {
    MLEObjective obj(2, astro_stats());
    DomainPreset box = domain_preset("astro");
    auto dom = obj.domain(box.x, box.y);
    FitResult r = fit(obj, "astro", 0.05, start_point(2, astro_stats(), &dom));
    astro = r;
    const double expected = 11.68573121328159669;
    o.detail << " objective " << r.value << " (rel " << rel(r.value, expected) << ")";
    o.require(rel(r.value, expected) < 1e-3, "objective within relative 1e-3");
    // x is determined up to adding cI; the reference matrix has trace zero
    FBParams tf = trace_free(FBParams::from_point(2, r.argmin));
    const std::vector<double> reference = {-0.161, 0.3377, 1.1104, 0.2538, 0.6424, -0.0928};
    double dx = 0;
    for (std::size_t k = 0; k < 6; ++k) dx = std::max(dx, std::abs(tf.x[k] - reference[k]));
    o.detail << ", max |x - reference| " << dx;
    o.require(dx <= 0.05, "x within 0.05");
    o.require(r.boundary_flags[fb_y_index(2, 0)] && r.boundary_flags[fb_y_index(2, 1)], "y1, y2 at the border");
    o.require(std::abs(obj.value(r.argmin) - r.value) < 1e-6 * r.value, "transported value matches quadrature");
  });

  criterion(5, "magnetism MLE", [](Outcome& o) {
    MLEObjective obj(2, magnetism_stats());
    FitResult r = fit(obj, "magnetism", 0.01, domain_preset("magnetism").start);
    const double expected = 0.4373096253840751950;
    o.detail << " objective " << r.value << " (rel " << rel(r.value, expected) << ")";
    o.require(rel(r.value, expected) < 1e-2, "objective within relative 1e-2");
  });

  criterion(6, "spectral report", [&](Outcome& o) {
    if (!astro) throw Error("astronomical fit unavailable");
    SpectralReport rep = spectral_report(trace_free(FBParams::from_point(2, astro->argmin)));
    const double expected[3] = {0.7047, -0.0103, -0.6944};
    double dl = 0;
    for (int k = 0; k < 3; ++k) dl = std::max(dl, std::abs(rep.lambda[k] - expected[k]));
    o.detail << " lambda (" << rep.lambda[0] << ", " << rep.lambda[1] << ", " << rep.lambda[2] << "), |y| "
             << rep.y_norm;
    o.require(dl <= 0.01, "eigenvalues within 0.01");
    o.require(std::abs(rep.y_norm - 0.230) <= 0.01, "|y| within 0.01");
  });

  criterion(7, "annihilation", [](Outcome& o) {
    std::mt19937_64 rng(7);
    double worst = 0;
    for (unsigned n : {1u, 2u}) {
      for (int k = 0; k < 5; ++k) {
        FBParams p = random_params(n, rng);
        p.r = std::uniform_real_distribution<double>(0.7, 1.4)(rng);
        for (const auto& g : fb_generators(n)) worst = std::max(worst, apply_to_F(g, p).relative());
      }
    }
    o.detail << " worst relative residual " << worst;
    o.require(worst < 1e-6, "residual < 1e-6");
  });

  criterion(8, "integrability", [](Outcome& o) {
    o.require(is_integrable(fb_pfaffian(1)), "n = 1 exact");
    std::mt19937_64 rng(8);
    double worst = 0;
    for (int k = 0; k < 10; ++k) worst = std::max(worst, integrability_defect(fb_pfaffian(2), random_params(2, rng).point()));
    o.detail << " n=1 symbolic zero; n=2 worst defect " << worst;
    o.require(worst < 1e-10, "n = 2 defect < 1e-10");
  });

  criterion(9, "gradient", [](Outcome& o) {
    MLEObjective obj(2, astro_stats());
    std::mt19937_64 rng(9);
    double worst = 0;
    for (int k = 0; k < 5; ++k) {
      auto z = random_params(2, rng).point();
      auto g = gradient_at(obj.system(), obj.initial_state(z));
      double diff = 0, norm = 0;
      for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double h = 1e-4;
        auto zp = z, zm = z;
        zp[i] += h;
        zm[i] -= h;
        double fd = (obj.value(zp) - obj.value(zm)) / (2 * h);
        diff = std::max(diff, std::abs(fd - g[i]));
        norm = std::max(norm, std::abs(fd));
      }
      worst = std::max(worst, diff / norm);
    }
    o.detail << " worst relative difference " << worst;
    o.require(worst < 1e-5, "relative 1e-5");
  });

  criterion(10, "RK4 order", [](Outcome& o) {
    const PfaffianSystem& P = fb_pfaffian(1);
    std::mt19937_64 rng(10);
    FBParams a = random_params(1, rng), b = a;
    b.x[1] += 0.6;
    b.y[0] -= 0.8;  // segment of length 1
    StateVector s = quadrature_state(1, P, a);
    StateVector truth = quadrature_state(1, P, b);
    auto err = [&](double grid) {
      StateVector r = transport(P, s, b.point(), TransportConfig{grid});
      double e = 0;
      for (std::size_t k = 0; k < 4; ++k) e = std::max(e, std::abs(r.values[k] - truth.values[k]) / std::abs(truth.values[k]));
      return e;
    };
    double e1 = err(0.25), e2 = err(0.125);
    o.detail << " errors " << e1 << " -> " << e2 << ", ratio " << e1 / e2;
    o.require(e1 / e2 >= 8 && e1 / e2 <= 32, "ratio in [8, 32]");
  });

  criterion(11, "invariances and ideal equality", [](Outcome& o) {
    std::mt19937_64 rng(11);
    double worst = 0;
    auto F = [](const FBParams& p) { return fb_quadrature(p, {TMonomial(p.n + 1, 0)})[0]; };
    for (unsigned n : {1u, 2u}) {
      const std::size_t m = n + 1;
      for (int k = 0; k < 3; ++k) {
        FBParams p = random_params(n, rng);
        double f = F(p);
        double angle = std::uniform_real_distribution<double>(0, 6.2)(rng);
        std::size_t i = k % m, j = (k + 1) % m;
        worst = std::max(worst, rel(F(rotate(p, plane_rotation(m, std::min(i, j), std::max(i, j), angle))), f));
        for (double rho : {0.5, 2.0}) {
          FBParams scaled = p, radius = p;
          for (std::size_t a = 0; a < p.x.size(); ++a) scaled.x[a] *= rho * rho;
          for (std::size_t a = 0; a < m; ++a) scaled.y[a] *= rho;
          radius.r = rho;
          worst = std::max(worst, rel(std::pow(rho, n) * F(scaled), F(radius)));
        }
        FBParams shifted = p;
        shifted.r = 1.3;
        double c = 0.7;
        FBParams base = shifted;
        for (std::size_t a = 0; a < m; ++a) shifted.x[fb_x_index(n, a, a)] += c;
        worst = std::max(worst, rel(F(shifted), std::exp(c * 1.3 * 1.3) * F(base)));
      }
    }
    o.detail << " worst relative deviation " << worst;
    o.require(worst < 1e-10, "identities to quadrature tolerance");

    // n = 1: mutual zero reduction against both Groebner bases
    const GroebnerBasis& gb = fb_groebner(1);
    GroebnerBasis rb = buchberger(fb_reduced_generators(1));
    bool ok = true;
    for (const auto& g : fb_reduced_generators(1)) ok = ok && normal_form(g, gb.generators).remainder.is_zero();
    for (const auto& g : fb_generators(1)) ok = ok && normal_form(g, rb.generators).remainder.is_zero();
    o.require(ok, "n = 1 mutual reduction");
    // n = 1, 2: both sets contain the toric operators and agree modulo them
    for (unsigned n : {1u, 2u}) {
      auto a = fb_generators(n), b = fb_reduced_generators(n);
      bool same = a.size() == b.size();
      for (std::size_t k = 0; same && k < a.size(); ++k) same = toric_normal_form(n, a[k]) == toric_normal_form(n, b[k]);
      o.require(same, "n = " + std::to_string(n) + " reduction modulo the toric operators");
    }
    o.detail << "; ideals equal for n=1, 2";
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
