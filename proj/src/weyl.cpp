#include "hgd/weyl.hpp"

#include <algorithm>
#include <map>

namespace hgd {

bool grevlex_greater(const Monomial& a, const Monomial& b) {
  if (a.deg != b.deg) return a.deg > b.deg;
  for (std::size_t i = kMaxVars; i-- > 0;) {
    if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
  }
  return false;
}

namespace {

struct GrevlexDesc {
  bool operator()(const Monomial& a, const Monomial& b) const { return grevlex_greater(a, b); }
};

Integer binomial(unsigned n, unsigned k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// Product of binomial(alpha_i, gamma_i).
Integer multi_binomial(const Monomial& alpha, const Monomial& gamma) {
  Integer r = 1;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    if (gamma.e[i]) r *= binomial(alpha.e[i], gamma.e[i]);
  }
  return r;
}

// All gamma <= alpha componentwise.
void sub_monomials(const Monomial& alpha, std::vector<Monomial>& out) {
  out.clear();
  out.push_back(Monomial{});
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    if (alpha.e[i] == 0) continue;
    const std::size_t n = out.size();
    for (unsigned k = 1; k <= alpha.e[i]; ++k) {
      for (std::size_t j = 0; j < n; ++j) {
        Monomial m = out[j];
        m.set(i, k);
        out.push_back(m);
      }
    }
  }
}

RationalFunction apply_derivation(const RationalFunction& f, const Monomial& gamma) {
  RationalFunction r = f;
  for (std::size_t i = 0; i < kMaxVars && !r.is_zero(); ++i) {
    for (unsigned k = 0; k < gamma.e[i] && !r.is_zero(); ++k) r = r.derivative(i);
  }
  return r;
}

using Accumulator = std::map<Monomial, RationalFunction, GrevlexDesc>;

void accumulate(Accumulator& acc, const Monomial& d, RationalFunction c) {
  if (c.is_zero()) return;
  auto it = acc.find(d);
  if (it == acc.end()) {
    acc.emplace(d, std::move(c));
  } else {
    it->second += c;
  }
}

std::vector<DiffOperator::Term> drain(Accumulator& acc) {
  std::vector<DiffOperator::Term> out;
  out.reserve(acc.size());
  for (auto& [d, c] : acc) {
    if (!c.is_zero()) out.push_back({d, std::move(c)});
  }
  return out;
}

}  // namespace

// ------------------------------------------------------------ DiffOperator

DiffOperator::DiffOperator(const RationalFunction& c) : vars_(c.vars()) {
  if (!c.is_zero()) terms_.push_back({Monomial{}, c});
}

DiffOperator DiffOperator::partial(VarTablePtr vars, std::size_t var) {
  if (var >= vars->size()) throw UnknownVariable("#" + std::to_string(var));
  Monomial d;
  d.set(var, 1);
  return monomial(vars, d, RationalFunction::constant(vars, 1));
}

DiffOperator DiffOperator::monomial(VarTablePtr vars, const Monomial& d, const RationalFunction& c) {
  DiffOperator r(std::move(vars));
  if (!c.is_zero()) r.terms_.push_back({d, c});
  return r;
}

DiffOperator DiffOperator::from_terms(VarTablePtr vars, std::vector<Term> terms) {
  Accumulator acc;
  for (auto& t : terms) accumulate(acc, t.d, std::move(t.coeff));
  DiffOperator r(std::move(vars));
  r.terms_ = drain(acc);
  return r;
}

RationalFunction DiffOperator::coefficient(const Monomial& beta) const {
  for (const auto& t : terms_) {
    if (t.d == beta) return t.coeff;
  }
  return RationalFunction(vars_);
}

DiffOperator DiffOperator::operator-() const {
  DiffOperator r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

namespace {

template <bool Subtract>
DiffOperator combine(const DiffOperator& a, const DiffOperator& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::vector<DiffOperator::Term> out;
  out.reserve(x.size() + y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].d == y[j].d) {
      RationalFunction c = Subtract ? x[i].coeff - y[j].coeff : x[i].coeff + y[j].coeff;
      if (!c.is_zero()) out.push_back({x[i].d, std::move(c)});
      ++i;
      ++j;
    } else if (grevlex_greater(x[i].d, y[j].d)) {
      out.push_back(x[i++]);
    } else {
      out.push_back({y[j].d, Subtract ? -y[j].coeff : y[j].coeff});
      ++j;
    }
  }
  for (; i < x.size(); ++i) out.push_back(x[i]);
  for (; j < y.size(); ++j) out.push_back({y[j].d, Subtract ? -y[j].coeff : y[j].coeff});
  VarTablePtr vars = a.vars() ? a.vars() : b.vars();
  DiffOperator r(vars);
  // out is already strictly descending
  return DiffOperator::from_terms(vars, std::move(out));
}

}  // namespace

DiffOperator operator+(const DiffOperator& a, const DiffOperator& b) {
  if (a.vars_ && b.vars_) require_same(a.vars_, b.vars_);
  if (b.is_zero()) return a.vars_ ? a : DiffOperator(b.vars_);
  if (a.is_zero()) return b;
  return combine<false>(a, b);
}

DiffOperator operator-(const DiffOperator& a, const DiffOperator& b) {
  if (a.vars_ && b.vars_) require_same(a.vars_, b.vars_);
  if (b.is_zero()) return a.vars_ ? a : DiffOperator(b.vars_);
  if (a.is_zero()) return -b;
  return combine<true>(a, b);
}

DiffOperator operator*(const DiffOperator& a, const DiffOperator& b) {
  require_same(a.vars_, b.vars_);
  DiffOperator r(a.vars_);
  if (a.is_zero() || b.is_zero()) return r;
  Accumulator acc;
  std::vector<Monomial> gammas;
  // Derivatives of b's coefficients, memoized per (term, gamma).
  std::vector<std::map<Monomial, RationalFunction, GrevlexDesc>> memo(b.terms_.size());
  for (const auto& s : a.terms_) {
    sub_monomials(s.d, gammas);
    for (std::size_t j = 0; j < b.terms_.size(); ++j) {
      const auto& t = b.terms_[j];
      const bool constant = t.coeff.is_constant();
      for (const auto& gamma : gammas) {
        if (gamma.deg > 0 && constant) continue;
        RationalFunction dc;
        if (gamma.deg == 0) {
          dc = t.coeff;
        } else {
          auto it = memo[j].find(gamma);
          if (it == memo[j].end()) it = memo[j].emplace(gamma, apply_derivation(t.coeff, gamma)).first;
          dc = it->second;
        }
        if (dc.is_zero()) continue;
        Integer bin = multi_binomial(s.d, gamma);
        RationalFunction c = s.coeff * dc;
        if (bin != 1) c = c.scaled(Rational(bin));
        accumulate(acc, (s.d - gamma) + t.d, std::move(c));
      }
    }
  }
  r.terms_ = drain(acc);
  return r;
}

DiffOperator op_mul(const DiffOperator& a, const DiffOperator& b) { return a * b; }

DiffOperator DiffOperator::left_scaled(const RationalFunction& c) const {
  DiffOperator r(vars_);
  if (c.is_zero()) return r;
  r.terms_.reserve(terms_.size());
  for (const auto& t : terms_) r.terms_.push_back({t.d, c * t.coeff});
  return r;
}

DiffOperator DiffOperator::left_shifted(const Monomial& beta) const {
  if (beta.deg == 0) return *this;
  return DiffOperator::monomial(vars_, beta, RationalFunction::constant(vars_, 1)) * *this;
}

DiffOperator DiffOperator::monic() const {
  if (is_zero() || leading_coeff().is_one()) return *this;
  return left_scaled(leading_coeff().inverse());
}

bool DiffOperator::operator==(const DiffOperator& other) const {
  if (terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].d != other.terms_[i].d || terms_[i].coeff != other.terms_[i].coeff) return false;
  }
  return true;
}

std::string derivation_string(const VarTable& vars, const Monomial& d) {
  std::string s;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (d.e[i] == 0) continue;
    if (!s.empty()) s += '*';
    s += 'd' + vars.name(i);
    if (d.e[i] > 1) s += '^' + std::to_string(d.e[i]);
  }
  return s.empty() ? "1" : s;
}

std::string DiffOperator::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& t : terms_) {
    const RationalFunction& c = t.coeff;
    std::string coeff;
    bool negative = false;
    if (c.is_polynomial() && c.num().size() == 1) {
      // single term: pull the sign out
      negative = sgn(c.num().leading().coeff) < 0;
      coeff = (negative ? (-c.num()) : c.num()).to_string();
    } else if (c.is_polynomial()) {
      coeff = "(" + c.to_string() + ")";
    } else {
      coeff = c.to_string();
    }
    if (first) {
      if (negative) s += '-';
    } else {
      s += negative ? " - " : " + ";
    }
    first = false;
    if (t.d.deg == 0) {
      s += coeff;
    } else if (coeff == "1") {
      s += derivation_string(*vars_, t.d);
    } else {
      s += coeff + "*" + derivation_string(*vars_, t.d);
    }
  }
  return s;
}

LeadingTerm leading_term(const DiffOperator& f) {
  if (f.is_zero()) throw ZeroOperator();
  return {f.leading_coeff(), f.leading_monomial()};
}

// ----------------------------------------------------------------- Reducer

Reducer::Reducer(std::vector<DiffOperator> basis, ReducerChoice choice)
    : basis_(std::move(basis)), choice_(choice) {
  basis_.erase(std::remove_if(basis_.begin(), basis_.end(), [](const auto& g) { return g.is_zero(); }),
               basis_.end());
}

std::optional<std::size_t> Reducer::find_reducer(const Monomial& m) const {
  if (choice_ == ReducerChoice::lowest_index) {
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i].leading_monomial().divides(m)) return i;
    }
  } else {
    for (std::size_t i = basis_.size(); i-- > 0;) {
      if (basis_[i].leading_monomial().divides(m)) return i;
    }
  }
  return std::nullopt;
}

const DiffOperator& Reducer::shifted(std::size_t index, const Monomial& beta) const {
  std::uint64_t key = index;
  for (std::size_t i = 0; i < kMaxVars; ++i) key = key * 131 + beta.e[i];
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(key, basis_[index].left_shifted(beta)).first->second;
}

void Reducer::reduce_top(DiffOperator& p, std::vector<DiffOperator>* quotients) const {
  while (!p.is_zero()) {
    auto idx = find_reducer(p.leading_monomial());
    if (!idx) return;
    const Monomial beta = p.leading_monomial() - basis_[*idx].leading_monomial();
    const DiffOperator& sg = shifted(*idx, beta);
    // lc(d^beta g) = lc(g): derivatives only reach lower terms
    RationalFunction c = p.leading_coeff() / sg.leading_coeff();
    if (quotients) (*quotients)[*idx] += DiffOperator::monomial(p.vars(), beta, c);
    p = p - sg.left_scaled(c);
  }
}

NormalFormResult Reducer::weak_normal_form(const DiffOperator& f, bool with_quotients) const {
  NormalFormResult out{f, {}};
  if (with_quotients) out.quotients.assign(basis_.size(), DiffOperator(f.vars()));
  reduce_top(out.remainder, with_quotients ? &out.quotients : nullptr);
  return out;
}

NormalFormResult Reducer::normal_form(const DiffOperator& f, bool with_quotients) const {
  NormalFormResult out{DiffOperator(f.vars()), {}};
  if (with_quotients) out.quotients.assign(basis_.size(), DiffOperator(f.vars()));
  std::vector<DiffOperator::Term> remainder;
  DiffOperator p = f;
  while (!p.is_zero()) {
    reduce_top(p, with_quotients ? &out.quotients : nullptr);
    if (p.is_zero()) break;
    remainder.push_back(p.terms().front());
    std::vector<DiffOperator::Term> rest(p.terms().begin() + 1, p.terms().end());
    p = DiffOperator::from_terms(f.vars(), std::move(rest));
  }
  out.remainder = DiffOperator::from_terms(f.vars(), std::move(remainder));
  return out;
}

NormalFormResult normal_form(const DiffOperator& f, const std::vector<DiffOperator>& g,
                             bool with_quotients) {
  for (const auto& x : g) require_same(f.vars(), x.vars());
  return Reducer(g).normal_form(f, with_quotients);
}

// -------------------------------------------------------------- Buchberger

std::optional<std::vector<Monomial>> staircase(const std::vector<Monomial>& leading,
                                               std::size_t nvars) {
  std::vector<unsigned> bound(nvars, 0);
  for (std::size_t v = 0; v < nvars; ++v) {
    for (const auto& m : leading) {
      if (m.deg == m.e[v] && m.deg > 0) {
        bound[v] = bound[v] ? std::min<unsigned>(bound[v], m.deg) : m.deg;
      }
    }
    if (bound[v] == 0) return std::nullopt;
  }
  auto divisible = [&](const Monomial& m) {
    for (const auto& l : leading) {
      if (l.divides(m)) return true;
    }
    return false;
  };
  std::vector<Monomial> out;
  // Depth-first over exponent vectors; divisibility is inherited by multiples.
  std::function<void(std::size_t, Monomial)> walk = [&](std::size_t v, Monomial m) {
    if (v == nvars) {
      out.push_back(m);
      return;
    }
    for (unsigned k = 0; k < bound[v]; ++k) {
      m.set(v, k);
      if (divisible(m)) break;
      walk(v + 1, m);
    }
  };
  walk(0, Monomial{});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return grevlex_greater(b, a); });
  return out;
}

namespace {

struct Pair {
  std::size_t i;
  std::size_t j;
  Monomial lcm;
};

DiffOperator spair(const DiffOperator& f, const DiffOperator& g, const Monomial& lcm) {
  DiffOperator a = f.left_shifted(lcm - f.leading_monomial());
  DiffOperator b = g.left_shifted(lcm - g.leading_monomial());
  return a - b;
}

}  // namespace

const std::vector<Monomial>& standard_monomials(const GroebnerBasis& basis) {
  if (!basis.zero_dimensional) throw InfiniteRank();
  return basis.standard_monomials;
}

bool is_groebner(const std::vector<DiffOperator>& basis) {
  Reducer red(basis);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      Monomial l = Monomial::lcm(basis[i].leading_monomial(), basis[j].leading_monomial());
      DiffOperator s = spair(basis[i].monic(), basis[j].monic(), l);
      if (!red.normal_form(s).remainder.is_zero()) return false;
    }
  }
  return true;
}

std::vector<RationalFunction> coordinates(const DiffOperator& reduced,
                                          const std::vector<Monomial>& smons) {
  std::vector<RationalFunction> out(smons.size(), RationalFunction(reduced.vars()));
  for (const auto& t : reduced.terms()) {
    auto it = std::find(smons.begin(), smons.end(), t.d);
    if (it == smons.end()) {
      throw Error("operator has a term outside the standard monomials");
    }
    out[static_cast<std::size_t>(it - smons.begin())] = t.coeff;
  }
  return out;
}

// --------------------------------------------------------- linear algebra

namespace {

// Row reduction in place; returns pivot columns.
std::vector<std::size_t> row_reduce(std::vector<std::vector<RationalFunction>>& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    // Prefer the simplest nonzero pivot.
    std::optional<std::size_t> best;
    for (std::size_t i = r; i < rows; ++i) {
      if (m[i][c].is_zero()) continue;
      auto cost = [&](std::size_t k) { return m[k][c].num().size() + m[k][c].den().size(); };
      if (!best || cost(i) < cost(*best)) best = i;
    }
    if (!best) continue;
    std::swap(m[r], m[*best]);
    RationalFunction inv = m[r][c].inverse();
    for (std::size_t k = c; k < cols; ++k) m[r][k] = m[r][k] * inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      RationalFunction f = m[i][c];
      for (std::size_t k = c; k < cols; ++k) {
        if (!m[r][k].is_zero()) m[i][k] = m[i][k] - f * m[r][k];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::optional<std::vector<RationalFunction>> solve_linear(std::vector<std::vector<RationalFunction>> m,
                                                          std::vector<RationalFunction> rhs) {
  const std::size_t n = m.size();
  if (rhs.size() != n) throw DimensionMismatch("right-hand side length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw DimensionMismatch("matrix is not square");
    m[i].push_back(rhs[i]);
  }
  auto pivots = row_reduce(m);
  if (pivots.size() < n || (!pivots.empty() && pivots.back() >= n)) return std::nullopt;
  std::vector<RationalFunction> sol;
  sol.reserve(n);
  for (std::size_t i = 0; i < n; ++i) sol.push_back(m[i][n]);
  return sol;
}

std::size_t matrix_rank(std::vector<std::vector<RationalFunction>> m) { return row_reduce(m).size(); }

// ------------------------------------------------------------- elimination

DiffOperator eliminate_to_ode(const GroebnerBasis& basis, std::size_t var) {
  const auto& smons = standard_monomials(basis);
  const VarTablePtr& vars = basis.vars;
  if (var >= vars->size()) throw UnknownVariable("#" + std::to_string(var));
  Reducer red(basis.generators);
  const std::size_t p = smons.size();
  DiffOperator dv = DiffOperator::partial(vars, var);

  // Columns: coordinates of NF(d_v^k), k = 0, 1, ...
  std::vector<std::vector<RationalFunction>> columns;
  DiffOperator power = red.normal_form(DiffOperator(RationalFunction::constant(vars, 1))).remainder;
  for (std::size_t k = 0; k <= p; ++k) {
    std::vector<RationalFunction> col = coordinates(power, smons);
    if (k > 0) {
      // Is col in the span of previous columns? Solve the p x k system by
      // reducing the augmented matrix.
      std::vector<std::vector<RationalFunction>> aug(p);
      for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < k; ++j) aug[i].push_back(columns[j][i]);
        aug[i].push_back(col[i]);
      }
      auto pivots = row_reduce(aug);
      if (pivots.empty() || pivots.back() != k) {
        // Dependent: d_v^k - sum c_j d_v^j lies in the ideal.
        std::vector<RationalFunction> c(k, RationalFunction(vars));
        for (std::size_t r = 0; r < pivots.size(); ++r) c[pivots[r]] = aug[r][k];
        Monomial top;
        top.set(var, static_cast<unsigned>(k));
        DiffOperator ode = DiffOperator::monomial(vars, top, RationalFunction::constant(vars, 1));
        for (std::size_t j = 0; j < k; ++j) {
          Monomial m;
          m.set(var, static_cast<unsigned>(j));
          ode -= DiffOperator::monomial(vars, m, c[j]);
        }
        return ode;
      }
    }
    columns.push_back(std::move(col));
    power = red.normal_form(dv * power).remainder;
  }
  throw Error("elimination failed: powers stayed independent beyond the rank");
}

}  // namespace hgd
