// Fraction-free reduction and Buchberger's algorithm in R.
//
// A left ideal is unchanged when an element is multiplied from the left by
// a nonzero rational function, so elements are kept with primitive
// polynomial coefficients. Rational functions only appear when results are
// handed back as DiffOperator.

#include <algorithm>
#include <map>
#include <unordered_map>

#include "hgd/weyl.hpp"

namespace hgd {

namespace {

struct GrevlexDesc {
  bool operator()(const Monomial& a, const Monomial& b) const { return grevlex_greater(a, b); }
};

struct PTerm {
  Monomial d;
  Polynomial c;
};
using POp = std::vector<PTerm>;  // strictly descending, nonzero coefficients

Polynomial lcm(const Polynomial& a, const Polynomial& b) {
  Polynomial g = gcd(a, b);
  return *Polynomial::divide_exact(a, g) * b;
}

// Integer content of all coefficients removed; sign of the leading
// coefficient made positive.
void normalize_integer(POp& p) {
  if (p.empty()) return;
  Integer num = 0;
  Integer den = 1;
  for (const auto& t : p) {
    for (const auto& c : t.c.terms()) {
      mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), c.coeff.get_num_mpz_t());
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.coeff.get_den_mpz_t());
    }
  }
  Rational f(den, num);
  f.canonicalize();
  if (sgn(p.front().c.leading().coeff) < 0) f = -f;
  if (f == 1) return;
  for (auto& t : p) t.c = t.c.scaled(f);
}

// Polynomial content of all coefficients removed.
void normalize_content(POp& p) {
  if (p.empty()) return;
  normalize_integer(p);
  std::vector<std::size_t> order(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a].c.size() < p[b].c.size(); });
  Polynomial g = p[order[0]].c.primitive_part();
  for (std::size_t k = 1; k < order.size() && !g.is_constant(); ++k) g = gcd(g, p[order[k]].c);
  if (g.is_constant()) return;
  for (auto& t : p) t.c = *Polynomial::divide_exact(t.c, g);
  normalize_integer(p);
}

POp from_operator(const DiffOperator& f) {
  POp out;
  if (f.is_zero()) return out;
  Polynomial common = f.terms().front().coeff.den();
  for (const auto& t : f.terms()) {
    if (!t.coeff.den().is_one()) common = lcm(common, t.coeff.den());
  }
  out.reserve(f.size());
  for (const auto& t : f.terms()) {
    out.push_back({t.d, *Polynomial::divide_exact(common, t.coeff.den()) * t.coeff.num()});
  }
  normalize_integer(out);
  return out;
}

// Operator with coefficients c_k / scale.
DiffOperator to_operator(const VarTablePtr& vars, const POp& p, const Polynomial& scale) {
  std::vector<DiffOperator::Term> terms;
  terms.reserve(p.size());
  for (const auto& t : p) terms.push_back({t.d, RationalFunction(t.c, scale)});
  return DiffOperator::from_terms(vars, std::move(terms));
}

DiffOperator to_monic_operator(const VarTablePtr& vars, const POp& p) {
  if (p.empty()) return DiffOperator(vars);
  return to_operator(vars, p, p.front().c);
}

Integer binomial(unsigned n, unsigned k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// d^beta * g, normally ordered.
POp shift(const POp& g, const Monomial& beta) {
  if (beta.deg == 0) return g;
  std::map<Monomial, Polynomial, GrevlexDesc> acc;
  auto add = [&](const Monomial& d, Polynomial c) {
    if (c.is_zero()) return;
    auto it = acc.find(d);
    if (it == acc.end()) {
      acc.emplace(d, std::move(c));
    } else {
      it->second += c;
    }
  };
  for (const auto& t : g) {
    // Expand variable by variable: d_v^k c = sum_j C(k,j) (d_v^j c) d_v^(k-j).
    std::vector<std::pair<Monomial, Polynomial>> cur = {{Monomial{}, t.c}};
    for (std::size_t v = 0; v < kMaxVars; ++v) {
      const unsigned k = beta.e[v];
      if (k == 0) continue;
      std::vector<std::pair<Monomial, Polynomial>> next;
      for (auto& [shiftm, c] : cur) {
        Polynomial dc = c;
        for (unsigned j = 0; j <= k && !dc.is_zero(); ++j) {
          Monomial m = shiftm;
          m.set(v, k - j);
          Integer b = binomial(k, j);
          next.emplace_back(m, b == 1 ? dc : dc.scaled(Rational(b)));
          if (j < k) dc = dc.derivative(v);
        }
      }
      cur = std::move(next);
    }
    for (auto& [m, c] : cur) add(m + t.d, std::move(c));
  }
  POp out;
  out.reserve(acc.size());
  for (auto& [d, c] : acc) {
    if (!c.is_zero()) out.push_back({d, std::move(c)});
  }
  return out;
}

// a * p - b * q over the terms from index `from` on (callers skip the
// cancelling leading terms).
POp combine(const POp& p, const Polynomial& a, const POp& q, const Polynomial& b, std::size_t from = 1) {
  POp out;
  out.reserve(p.size() + q.size());
  std::size_t i = from;
  std::size_t j = from;
  const bool a_one = a.is_one();
  const bool b_one = b.is_one();
  auto ap = [&](const Polynomial& c) { return a_one ? c : a * c; };
  auto bq = [&](const Polynomial& c) { return b_one ? c : b * c; };
  while (i < p.size() || j < q.size()) {
    if (j == q.size() || (i < p.size() && grevlex_greater(p[i].d, q[j].d))) {
      out.push_back({p[i].d, ap(p[i].c)});
      ++i;
    } else if (i == p.size() || grevlex_greater(q[j].d, p[i].d)) {
      out.push_back({q[j].d, -bq(q[j].c)});
      ++j;
    } else {
      Polynomial c = ap(p[i].c) - bq(q[j].c);
      if (!c.is_zero()) out.push_back({p[i].d, std::move(c)});
      ++i;
      ++j;
    }
  }
  return out;
}

class Engine {
 public:
  Engine(VarTablePtr vars, std::vector<POp> basis) : vars_(std::move(vars)), basis_(std::move(basis)) {}

  const std::vector<POp>& basis() const { return basis_; }
  void add(POp g) {
    basis_.push_back(std::move(g));
  }

  // Returns r and the multiplier m with m * f - r in the ideal, i.e. the
  // normal form of f is r / m. With `full` false only the leading term
  // is reduced.
  POp reduce(POp p, bool full, Polynomial* multiplier) const {
    POp r;
    Polynomial mult = Polynomial::constant(vars_, 1);
    if (multiplier) *multiplier = mult;
    if (p.empty()) return r;
    std::size_t steps = 0;
    while (!p.empty()) {
      const Monomial lead = p.front().d;
      std::optional<std::size_t> idx;
      for (std::size_t i = 0; i < basis_.size(); ++i) {
        if (basis_[i].front().d.divides(lead)) {
          idx = i;
          break;
        }
      }
      if (!idx) {
        if (!full) {
          // top-irreducible: the rest is kept as is
          r.insert(r.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
          p.clear();
          break;
        }
        r.push_back(std::move(p.front()));
        p.erase(p.begin());
        continue;
      }
      const POp& sg = shifted(*idx, lead - basis_[*idx].front().d);
      const Polynomial& lp = p.front().c;
      const Polynomial& lg = sg.front().c;
      Polynomial a;
      Polynomial b;
      if (lg.is_constant()) {
        a = lg;
        b = lp;
      } else {
        Polynomial h = gcd(lp, lg);
        a = *Polynomial::divide_exact(lg, h);
        b = *Polynomial::divide_exact(lp, h);
      }
      p = combine(p, a, sg, b);
      if (!a.is_one()) {
        for (auto& t : r) t.c = a * t.c;
        if (multiplier) mult = a * mult;
      }
      if (++steps % 8 == 0 && !multiplier) {
        // keep numbers small; the scale of r is irrelevant here
        normalize_pair(r, p);
      }
    }
    if (multiplier) *multiplier = mult;
    return r;
  }

 private:
  // Removes the common integer content of r and p together.
  static void normalize_pair(POp& r, POp& p) {
    Integer num = 0;
    for (const POp* q : {&r, &p}) {
      for (const auto& t : *q) {
        for (const auto& c : t.c.terms()) mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), c.coeff.get_num_mpz_t());
      }
    }
    if (num <= 1) return;
    Rational f(1, num);
    f.canonicalize();
    for (POp* q : {&r, &p}) {
      for (auto& t : *q) t.c = t.c.scaled(f);
    }
  }

  const POp& shifted(std::size_t index, const Monomial& beta) const {
    std::uint64_t key = index;
    for (std::size_t i = 0; i < kMaxVars; ++i) key = key * 131 + beta.e[i];
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_.emplace(key, shift(basis_[index], beta)).first->second;
  }

  VarTablePtr vars_;
  std::vector<POp> basis_;
  mutable std::unordered_map<std::uint64_t, POp> cache_;
};

struct Pair {
  std::size_t i;
  std::size_t j;
  Monomial lcm;
};

POp spair(const POp& f, const POp& g, const Monomial& l) {
  POp a = shift(f, l - f.front().d);
  POp b = shift(g, l - g.front().d);
  const Polynomial& la = a.front().c;
  const Polynomial& lb = b.front().c;
  Polynomial h = gcd(la, lb);
  Polynomial ca = *Polynomial::divide_exact(lb, h);
  Polynomial cb = *Polynomial::divide_exact(la, h);
  return combine(a, ca, b, cb);
}

bool lead_less(const POp& a, const POp& b) {
  if (a.front().d != b.front().d) return grevlex_greater(b.front().d, a.front().d);
  return a.size() < b.size();
}

}  // namespace

// ------------------------------------------------------ public entry points

struct FractionFreeReducer::Impl {
  VarTablePtr vars;
  Engine engine;
};

FractionFreeReducer::FractionFreeReducer(const std::vector<DiffOperator>& basis) {
  if (basis.empty()) throw Error("empty basis");
  std::vector<POp> b;
  for (const auto& g : basis) {
    if (!g.is_zero()) b.push_back(from_operator(g));
  }
  impl_ = std::make_shared<Impl>(Impl{basis.front().vars(), Engine(basis.front().vars(), std::move(b))});
}

DiffOperator FractionFreeReducer::normal_form(const DiffOperator& f) const {
  require_same(impl_->vars, f.vars());
  if (f.is_zero()) return f;
  // f = factor * F with F polynomial; NF(F) = r / scale
  POp p = from_operator(f);
  RationalFunction factor = f.leading_coeff() / RationalFunction(p.front().c);
  Polynomial scale;
  POp r = impl_->engine.reduce(std::move(p), true, &scale);
  if (r.empty()) return DiffOperator(f.vars());
  return to_operator(f.vars(), r, scale).left_scaled(factor);
}

GroebnerBasis buchberger(const std::vector<DiffOperator>& gens, BuchbergerStats* stats) {
  if (gens.empty()) throw Error("buchberger needs at least one generator");
  VarTablePtr vars = gens.front().vars();
  for (const auto& g : gens) require_same(vars, g.vars());
  BuchbergerStats local;
  BuchbergerStats& st = stats ? *stats : local;

  std::vector<POp> sorted;
  for (const auto& g : gens) {
    if (!g.is_zero()) sorted.push_back(from_operator(g));
  }
  if (sorted.empty()) throw Error("buchberger needs a nonzero generator");
  std::sort(sorted.begin(), sorted.end(), lead_less);

  // Interreduce the input by ascending leading monomial.
  Engine engine(vars, {});
  for (auto& g : sorted) {
    POp h = engine.reduce(std::move(g), true, nullptr);
    if (!h.empty()) {
      normalize_content(h);
      engine.add(std::move(h));
    }
  }

  std::vector<Pair> pending;
  std::vector<std::vector<bool>> treated;
  auto add_pairs = [&](std::size_t k) {
    treated.resize(engine.basis().size());
    for (auto& row : treated) row.resize(engine.basis().size(), false);
    for (std::size_t i = 0; i < k; ++i) {
      pending.push_back({i, k, Monomial::lcm(engine.basis()[i].front().d, engine.basis()[k].front().d)});
    }
  };
  for (std::size_t k = 0; k < engine.basis().size(); ++k) add_pairs(k);
  auto is_treated = [&](std::size_t a, std::size_t b) { return a < b ? treated[a][b] : treated[b][a]; };

  while (!pending.empty()) {
    // normal strategy: smallest lcm first
    auto it = std::min_element(pending.begin(), pending.end(), [](const Pair& a, const Pair& b) {
      if (a.lcm != b.lcm) return grevlex_greater(b.lcm, a.lcm);
      if (a.j != b.j) return a.j < b.j;
      return a.i < b.i;
    });
    Pair p = *it;
    pending.erase(it);
    ++st.pairs_considered;

    // Chain criterion. The product criterion does not hold in R: the
    // S-pair of d1 - a and d2 - b reduces to d1(b) - d2(a).
    bool chain = false;
    const auto& basis = engine.basis();
    for (std::size_t k = 0; k < basis.size() && !chain; ++k) {
      if (k == p.i || k == p.j) continue;
      if (!basis[k].front().d.divides(p.lcm)) continue;
      if (is_treated(p.i, k) && is_treated(p.j, k)) chain = true;
    }
    treated[p.i][p.j] = true;
    if (chain) {
      ++st.chain_skipped;
      continue;
    }
    ++st.pairs_reduced;
    POp s = spair(basis[p.i], basis[p.j], p.lcm);
    POp h = engine.reduce(std::move(s), true, nullptr);
    if (h.empty()) {
      ++st.zero_reductions;
      continue;
    }
    normalize_content(h);
    engine.add(std::move(h));
    add_pairs(engine.basis().size() - 1);
  }

  // Minimal basis.
  const auto& basis = engine.basis();
  std::vector<POp> minimal;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    bool redundant = false;
    for (std::size_t j = 0; j < basis.size() && !redundant; ++j) {
      if (i == j) continue;
      const Monomial& mi = basis[i].front().d;
      const Monomial& mj = basis[j].front().d;
      if (mj.divides(mi) && (mi != mj || j < i)) redundant = true;
    }
    if (!redundant) minimal.push_back(basis[i]);
  }
  std::sort(minimal.begin(), minimal.end(), lead_less);

  // Tail reduction, then monic rational form.
  GroebnerBasis out;
  out.vars = vars;
  for (std::size_t i = 0; i < minimal.size(); ++i) {
    std::vector<POp> others;
    for (std::size_t j = 0; j < minimal.size(); ++j) {
      if (j != i) others.push_back(minimal[j]);
    }
    Engine red(vars, std::move(others));
    POp head = {minimal[i].front()};
    POp tail(minimal[i].begin() + 1, minimal[i].end());
    Polynomial m;
    POp t = red.reduce(std::move(tail), true, &m);
    // g = lc d^alpha + tail  ==  lc d^alpha + t / m (mod the others)
    POp g;
    g.push_back({head.front().d, m * head.front().c});
    g.insert(g.end(), t.begin(), t.end());
    normalize_content(g);
    out.generators.push_back(to_monic_operator(vars, g));
  }

  std::vector<Monomial> leading;
  for (const auto& g : out.generators) leading.push_back(g.leading_monomial());
  if (auto s = staircase(leading, vars->size())) {
    out.standard_monomials = std::move(*s);
    out.zero_dimensional = true;
  }
  return out;
}

}  // namespace hgd
