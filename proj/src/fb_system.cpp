// Annihilating operators of the Fisher–Bingham integral.

#include <algorithm>
#include <mutex>
#include <random>

#include "hgd/fisher_bingham.hpp"

namespace hgd {

namespace {

void check_dim(unsigned n) {
  if (n < 1) throw Error("sphere dimension must be at least 1");
  const std::size_t m = n + 1;
  if (m * (m + 1) / 2 + m + 1 > kMaxVars) {
    throw Unsupported("sphere dimension " + std::to_string(n) + " needs more than " +
                      std::to_string(kMaxVars) + " variables");
  }
}

struct Builder {
  unsigned n;
  VarTablePtr vars;
  // y1..ym, r positions in `vars`; x positions when x is symbolic.
  std::vector<std::size_t> yidx;
  std::size_t ridx = 0;
  // Numeric x (upper triangle, fb_vars order) or empty for symbolic x.
  std::vector<Rational> xval;

  static Builder full(unsigned n) {
    Builder b{n, fb_vars(n), {}, fb_r_index(n), {}};
    for (unsigned i = 0; i <= n; ++i) b.yidx.push_back(fb_y_index(n, i));
    return b;
  }

  RationalFunction var(std::size_t i) const { return RationalFunction::variable(vars, i); }
  RationalFunction num(const Rational& c) const { return RationalFunction::constant(vars, c); }
  DiffOperator d(std::size_t i) const { return DiffOperator::partial(vars, i); }
  DiffOperator c(const RationalFunction& f) const { return DiffOperator(f); }

  std::size_t x(std::size_t i, std::size_t j) const { return fb_x_index(n, i, j); }
  RationalFunction xc(std::size_t i, std::size_t j) const {
    return xval.empty() ? var(x(i, j)) : num(xval[x(i, j)]);
  }
  std::size_t y(std::size_t i) const { return yidx[i]; }
  std::size_t r() const { return ridx; }
  DiffOperator dy2(std::size_t i, std::size_t j) const { return d(y(i)) * d(y(j)); }

  DiffOperator toric(std::size_t i, std::size_t j) const { return d(x(i, j)) - dy2(i, j); }

  // x_ij d_ii + 2(x_jj - x_ii) d_ij - x_ij d_jj + sum_k (x_jk d_ik - x_ik d_jk)
  //   + y_j d_yi - y_i d_yj; `second` maps the pair (a, b) to d_ab.
  template <class Second>
  DiffOperator rotation(std::size_t i, std::size_t j, Second second) const {
    const std::size_t m = n + 1;
    DiffOperator op = c(xc(i, j)) * second(i, i) + c((xc(j, j) - xc(i, i)).scaled(2)) * second(i, j) -
                      c(xc(i, j)) * second(j, j);
    for (std::size_t k = 0; k < m; ++k) {
      if (k == i || k == j) continue;
      op += c(xc(j, k)) * second(i, k) - c(xc(i, k)) * second(j, k);
    }
    op += c(var(y(j))) * d(y(i)) - c(var(y(i))) * d(y(j));
    return op;
  }

  // r d_r - 2 sum x_ij d_ij - sum y_i d_yi - n
  template <class Second>
  DiffOperator scaling(Second second) const {
    const std::size_t m = n + 1;
    DiffOperator op = c(var(r())) * d(r());
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) op -= c(xc(i, j).scaled(2)) * second(i, j);
    }
    for (std::size_t i = 0; i < m; ++i) op -= c(var(y(i))) * d(y(i));
    op -= c(num(n));
    return op;
  }

  // sum_i d_yi^2 - r^2
  DiffOperator sphere() const {
    DiffOperator op = -c(var(r()) * var(r()));
    for (std::size_t i = 0; i <= n; ++i) op += dy2(i, i);
    return op;
  }

  // Sphere, rotation and scaling operators in y- and r-derivatives only.
  std::vector<DiffOperator> y_relations() const {
    auto second = [&](std::size_t i, std::size_t j) { return dy2(i, j); };
    std::vector<DiffOperator> out{sphere()};
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = i + 1; j <= n; ++j) out.push_back(rotation(i, j, second));
    }
    out.push_back(scaling(second));
    return out;
  }
};

}  // namespace

VarTablePtr fb_vars(unsigned n) {
  check_dim(n);
  std::vector<std::string> names;
  const unsigned m = n + 1;
  for (unsigned i = 1; i <= m; ++i) {
    for (unsigned j = i; j <= m; ++j) names.push_back("x" + std::to_string(i) + std::to_string(j));
  }
  for (unsigned i = 1; i <= m; ++i) names.push_back("y" + std::to_string(i));
  names.push_back("r");
  return make_vars(std::move(names));
}

std::size_t fb_num_x(unsigned n) { return (n + 1) * (n + 2) / 2; }

std::size_t fb_x_index(unsigned n, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  const std::size_t m = n + 1;
  // rows 0..i-1 contribute m, m-1, ..., m-i+1 entries
  return i * m - i * (i - 1) / 2 + (j - i);
}

std::size_t fb_y_index(unsigned n, std::size_t i) { return fb_num_x(n) + i; }
std::size_t fb_r_index(unsigned n) { return fb_num_x(n) + n + 1; }

std::vector<DiffOperator> fb_generators(unsigned n) {
  Builder b = Builder::full(n);
  const std::size_t m = n + 1;
  auto second = [&](std::size_t i, std::size_t j) { return b.d(b.x(i, j)); };
  std::vector<DiffOperator> out;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) out.push_back(b.toric(i, j));
  }
  DiffOperator trace = -b.c(b.var(b.r()) * b.var(b.r()));
  for (std::size_t i = 0; i < m; ++i) trace += b.d(b.x(i, i));
  out.push_back(trace);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) out.push_back(b.rotation(i, j, second));
  }
  out.push_back(b.scaling(second));
  return out;
}

std::vector<DiffOperator> fb_reduced_generators(unsigned n) {
  Builder b = Builder::full(n);
  const std::size_t m = n + 1;
  std::vector<DiffOperator> out;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) out.push_back(b.toric(i, j));
  }
  auto rel = b.y_relations();
  out.insert(out.end(), rel.begin(), rel.end());
  return out;
}

std::vector<DiffOperator> fb_y_relations(unsigned n) { return Builder::full(n).y_relations(); }

Monomial fb_substitution(unsigned n, std::size_t var) {
  check_dim(n);
  Monomial m;
  if (var < fb_num_x(n)) {
    // Invert the upper-triangle index.
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = i; j <= n; ++j) {
        if (fb_x_index(n, i, j) != var) continue;
        m.set(fb_y_index(n, i), 1);
        m.set(fb_y_index(n, j), m.e[fb_y_index(n, j)] + 1u);
      }
    }
  } else if (var <= fb_r_index(n)) {
    m.set(var, 1);
  } else {
    throw UnknownVariable("#" + std::to_string(var));
  }
  return m;
}

FBStaircase fb_staircase(unsigned n, std::uint64_t seed) {
  check_dim(n);
  const std::size_t m = n + 1;
  // The y/r subsystem over its own variables with x fixed at random
  // integers; generic values keep the leading terms of the parametric case.
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= m; ++i) names.push_back("y" + std::to_string(i));
  names.push_back("r");
  Builder b{n, make_vars(names), {}, m, {}};
  for (std::size_t i = 0; i < m; ++i) b.yidx.push_back(i);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < fb_num_x(n); ++k) b.xval.emplace_back(static_cast<long>(rng() % 199) - 99);

  FBStaircase out;
  out.x_values.assign(b.xval.begin(), b.xval.end());
  GroebnerBasis gb = buchberger(b.y_relations());
  out.reduced_rank = standard_monomials(gb).size();
  Reducer red(gb.generators);
  const auto& smons = gb.standard_monomials;

  // Full-ring derivations in ascending grevlex order, degree by degree; a
  // derivation is standard iff its image is independent of the images of
  // all smaller ones, i.e. of the standard derivations found so far.
  VarTablePtr full = fb_vars(n);
  const std::size_t d = full->size();
  auto image = [&](const Monomial& mono) {
    Monomial img;
    for (std::size_t v = 0; v < d; ++v) {
      Monomial s = fb_substitution(n, v);
      for (unsigned k = 0; k < mono.e[v]; ++k) img = img + s;
    }
    // Re-index fb_vars positions (y's, r) into the subsystem table.
    Monomial local;
    for (std::size_t i = 0; i < m; ++i) local.set(i, img.e[fb_y_index(n, i)]);
    local.set(m, img.e[fb_r_index(n)]);
    return local;
  };
  std::vector<std::vector<RationalFunction>> rows;
  std::vector<Monomial> layer{Monomial{}};
  for (unsigned deg = 0; !layer.empty(); ++deg) {
    std::sort(layer.begin(), layer.end(), [](const Monomial& a, const Monomial& c) { return grevlex_greater(c, a); });
    std::vector<Monomial> next_seed;
    for (const auto& mono : layer) {
      DiffOperator op = DiffOperator::monomial(gb.vars, image(mono), RationalFunction::constant(gb.vars, 1));
      auto coords = coordinates(red.normal_form(op).remainder, smons);
      rows.push_back(coords);
      if (matrix_rank(rows) == rows.size()) {
        out.standard.push_back(mono);
        next_seed.push_back(mono);
      } else {
        rows.pop_back();
      }
    }
    // Standard derivations form an order ideal: the next degree only
    // needs multiples of the standard ones just found.
    std::vector<Monomial> next;
    for (const auto& mono : next_seed) {
      for (std::size_t v = 0; v < d; ++v) {
        Monomial t = mono;
        t.set(v, mono.e[v] + 1u);
        if (std::find(next.begin(), next.end(), t) == next.end()) next.push_back(t);
      }
    }
    layer = std::move(next);
  }
  return out;
}

const GroebnerBasis& fb_groebner(unsigned n) {
  static std::mutex mu;
  static std::map<unsigned, std::unique_ptr<GroebnerBasis>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GroebnerBasis>(buchberger(fb_generators(n)));
  return *slot;
}

PfaffianSystem fb_local_pfaffian(unsigned n) {
  VarTablePtr vars = fb_vars(n);
  LocalPfaffian::Spec spec;
  spec.relations = fb_y_relations(n);
  spec.vars = spec.relations.front().vars();
  for (std::size_t v = 0; v < vars->size(); ++v) spec.substitution.push_back(fb_substitution(n, v));
  std::vector<DiffOperator> basis;
  for (const auto& mono : fb_staircase(n).standard) {
    Monomial img;
    for (std::size_t v = 0; v < vars->size(); ++v) {
      for (unsigned k = 0; k < mono.e[v]; ++k) img = img + spec.substitution[v];
    }
    spec.basis.push_back(img);
    basis.push_back(DiffOperator::monomial(spec.vars, mono, RationalFunction::constant(spec.vars, 1)));
  }
  spec.prolongation = 2;
  return local_pfaffian_system(std::make_shared<LocalPfaffian>(std::move(spec)), std::move(basis));
}

const PfaffianSystem& fb_pfaffian(unsigned n) {
  static std::mutex mu;
  static std::map<unsigned, std::unique_ptr<PfaffianSystem>> cache;
  if (n == 1) {
    const GroebnerBasis& gb = fb_groebner(n);
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<PfaffianSystem>(build_pfaffian(gb));
    return *slot;
  }
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<PfaffianSystem>(fb_local_pfaffian(n));
  return *slot;
}

}  // namespace hgd
