#include "hgd/ratpoly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace hgd {

// ---------------------------------------------------------------- VarTable

VarTable::VarTable(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() > kMaxVars) {
    throw Error("at most " + std::to_string(kMaxVars) + " variables are supported");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw Error("empty variable name");
    if (!index_.emplace(names_[i], i).second) {
      throw Error("duplicate variable name '" + names_[i] + "'");
    }
  }
}

std::optional<std::size_t> VarTable::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t VarTable::index(const std::string& name) const {
  auto i = find(name);
  if (!i) throw UnknownVariable(name);
  return *i;
}

VarTablePtr make_vars(std::vector<std::string> names) {
  return std::make_shared<const VarTable>(std::move(names));
}

void require_same(const VarTablePtr& a, const VarTablePtr& b) {
  if (a == b) return;
  if (!a || !b || !(*a == *b)) throw VarTableMismatch();
}

// ---------------------------------------------------------------- Monomial

void Monomial::set(std::size_t i, unsigned value) {
  if (value > 255) throw Error("exponent overflow");
  deg = static_cast<std::uint16_t>(deg - e[i] + value);
  e[i] = static_cast<std::uint8_t>(value);
}

bool Monomial::divides(const Monomial& other) const {
  if (deg > other.deg) return false;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    if (e[i] > other.e[i]) return false;
  }
  return true;
}

Monomial Monomial::operator+(const Monomial& other) const {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    unsigned s = unsigned(e[i]) + other.e[i];
    if (s > 255) throw Error("exponent overflow");
    r.e[i] = static_cast<std::uint8_t>(s);
  }
  r.deg = static_cast<std::uint16_t>(deg + other.deg);
  return r;
}

Monomial Monomial::operator-(const Monomial& other) const {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    r.e[i] = static_cast<std::uint8_t>(e[i] - other.e[i]);
  }
  r.deg = static_cast<std::uint16_t>(deg - other.deg);
  return r;
}

Monomial Monomial::lcm(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    r.e[i] = std::max(a.e[i], b.e[i]);
    r.deg = static_cast<std::uint16_t>(r.deg + r.e[i]);
  }
  return r;
}

Monomial Monomial::min(const Monomial& a, const Monomial& b) {
  Monomial r;
  for (std::size_t i = 0; i < kMaxVars; ++i) {
    r.e[i] = std::min(a.e[i], b.e[i]);
    r.deg = static_cast<std::uint16_t>(r.deg + r.e[i]);
  }
  return r;
}

bool grlex_greater(const Monomial& a, const Monomial& b) {
  if (a.deg != b.deg) return a.deg > b.deg;
  return a.e > b.e;
}

std::size_t MonomialHash::operator()(const Monomial& m) const {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  for (std::size_t i = 0; i < 8; ++i) lo |= std::uint64_t(m.e[i]) << (8 * i);
  for (std::size_t i = 0; i < 8; ++i) hi |= std::uint64_t(m.e[8 + i]) << (8 * i);
  std::uint64_t h = lo * 0x9E3779B97F4A7C15ull ^ (hi + 0x632BE59BD9B4E019ull + (lo << 6));
  return static_cast<std::size_t>(h ^ (h >> 29));
}

// -------------------------------------------------------------- Polynomial

namespace {

void canonicalize(std::vector<Polynomial::Term>& terms) {
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return grlex_greater(a.mono, b.mono);
  });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size();) {
    std::size_t j = i + 1;
    Rational c = std::move(terms[i].coeff);
    while (j < terms.size() && terms[j].mono == terms[i].mono) {
      c += terms[j].coeff;
      ++j;
    }
    if (sgn(c) != 0) {
      terms[out].mono = terms[i].mono;
      terms[out].coeff = std::move(c);
      ++out;
    }
    i = j;
  }
  terms.resize(out);
}

std::string monomial_string(const VarTable& vars, const Monomial& m) {
  std::string s;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (m.e[i] == 0) continue;
    if (!s.empty()) s += '*';
    s += vars.name(i);
    if (m.e[i] > 1) s += '^' + std::to_string(m.e[i]);
  }
  return s;
}

}  // namespace

void Polynomial::check(const Polynomial& other) const { require_same(vars_, other.vars_); }

Polynomial Polynomial::constant(VarTablePtr vars, const Rational& c) {
  Polynomial p(std::move(vars));
  if (sgn(c) != 0) p.terms_.push_back({Monomial{}, c});
  return p;
}

Polynomial Polynomial::variable(VarTablePtr vars, std::size_t index) {
  if (index >= vars->size()) throw Error("variable index out of range");
  Monomial m;
  m.set(index, 1);
  Polynomial p(std::move(vars));
  p.terms_.push_back({m, Rational(1)});
  return p;
}

Polynomial Polynomial::monomial(VarTablePtr vars, const Monomial& m, const Rational& c) {
  Polynomial p(std::move(vars));
  if (sgn(c) != 0) p.terms_.push_back({m, c});
  return p;
}

Polynomial Polynomial::from_terms(VarTablePtr vars, std::vector<Term> terms) {
  Polynomial p(std::move(vars));
  canonicalize(terms);
  p.terms_ = std::move(terms);
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.deg == 0);
}

bool Polynomial::is_one() const {
  return terms_.size() == 1 && terms_[0].mono.deg == 0 && terms_[0].coeff == 1;
}

Rational Polynomial::constant_value() const {
  if (terms_.empty()) return Rational(0);
  return terms_.back().mono.deg == 0 ? terms_.back().coeff : Rational(0);
}

unsigned Polynomial::total_degree() const { return terms_.empty() ? 0 : terms_.front().mono.deg; }

unsigned Polynomial::degree(std::size_t var) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max<unsigned>(d, t.mono.e[var]);
  return d;
}

Monomial Polynomial::min_exponents() const {
  if (terms_.empty()) return Monomial{};
  Monomial m = terms_.front().mono;
  for (const auto& t : terms_) m = Monomial::min(m, t.mono);
  return m;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

namespace {

template <bool Subtract>
std::vector<Polynomial::Term> merge(const std::vector<Polynomial::Term>& a,
                                    const std::vector<Polynomial::Term>& b) {
  std::vector<Polynomial::Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].mono == b[j].mono) {
      Rational c = Subtract ? Rational(a[i].coeff - b[j].coeff) : Rational(a[i].coeff + b[j].coeff);
      if (sgn(c) != 0) out.push_back({a[i].mono, std::move(c)});
      ++i;
      ++j;
    } else if (grlex_greater(a[i].mono, b[j].mono)) {
      out.push_back(a[i++]);
    } else {
      out.push_back({b[j].mono, Subtract ? Rational(-b[j].coeff) : b[j].coeff});
      ++j;
    }
  }
  for (; i < a.size(); ++i) out.push_back(a[i]);
  for (; j < b.size(); ++j) out.push_back({b[j].mono, Subtract ? Rational(-b[j].coeff) : b[j].coeff});
  return out;
}

}  // namespace

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (!vars_) vars_ = other.vars_;
  check(other);
  if (other.terms_.empty()) return *this;
  if (terms_.empty()) {
    terms_ = other.terms_;
    return *this;
  }
  terms_ = merge<false>(terms_, other.terms_);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (!vars_) vars_ = other.vars_;
  check(other);
  if (other.terms_.empty()) return *this;
  terms_ = merge<true>(terms_, other.terms_);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check(b);
  Polynomial r(a.vars_);
  if (a.terms_.empty() || b.terms_.empty()) return r;
  if (a.terms_.size() == 1) {
    r = b.shifted(a.terms_[0].mono);
    if (a.terms_[0].coeff != 1) {
      for (auto& t : r.terms_) t.coeff *= a.terms_[0].coeff;
    }
    return r;
  }
  if (b.terms_.size() == 1) return b * a;
  std::unordered_map<Monomial, Rational, MonomialHash> acc;
  acc.reserve(a.terms_.size() * b.terms_.size());
  Rational prod;
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) {
      mpq_mul(prod.get_mpq_t(), s.coeff.get_mpq_t(), t.coeff.get_mpq_t());
      auto [it, inserted] = acc.try_emplace(s.mono + t.mono, prod);
      if (!inserted) it->second += prod;
    }
  }
  r.terms_.reserve(acc.size());
  for (auto& [m, c] : acc) {
    if (sgn(c) != 0) r.terms_.push_back({m, std::move(c)});
  }
  std::sort(r.terms_.begin(), r.terms_.end(),
            [](const auto& x, const auto& y) { return grlex_greater(x.mono, y.mono); });
  return r;
}

Polynomial Polynomial::scaled(const Rational& c) const {
  Polynomial r(vars_);
  if (sgn(c) == 0) return r;
  r.terms_ = terms_;
  if (c != 1) {
    for (auto& t : r.terms_) t.coeff *= c;
  }
  return r;
}

Polynomial Polynomial::shifted(const Monomial& m) const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.mono = t.mono + m;
  return r;
}

Polynomial Polynomial::unshifted(const Monomial& m) const {
  Polynomial r = *this;
  for (auto& t : r.terms_) t.mono = t.mono - m;
  return r;
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& a, const Polynomial& b) {
  a.check(b);
  if (b.is_zero()) throw DivisionByZero();
  Polynomial q(a.vars_);
  if (a.is_zero()) return q;
  if (b.terms_.size() == 1) {
    const auto& lt = b.terms_[0];
    if (!lt.mono.divides(a.min_exponents())) return std::nullopt;
    Polynomial r = a.unshifted(lt.mono);
    Rational inv = 1 / lt.coeff;
    for (auto& t : r.terms_) t.coeff *= inv;
    return r;
  }
  const std::size_t n = a.vars_ ? a.vars_->size() : 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (a.degree(v) < b.degree(v)) return std::nullopt;
  }
  if (!b.min_exponents().divides(a.min_exponents())) return std::nullopt;
  // Trailing terms multiply like leading ones.
  if (!b.terms_.back().mono.divides(a.terms_.back().mono)) return std::nullopt;

  struct Greater {
    bool operator()(const Monomial& x, const Monomial& y) const { return grlex_greater(x, y); }
  };
  std::map<Monomial, Rational, Greater> r;
  for (const auto& t : a.terms_) r.emplace_hint(r.end(), t.mono, t.coeff);
  const auto& blt = b.terms_.front();
  const Rational inv = 1 / blt.coeff;
  std::vector<Term> qterms;
  Rational prod;
  while (!r.empty()) {
    auto lead = r.begin();
    if (lead->first.deg < blt.mono.deg || !blt.mono.divides(lead->first)) return std::nullopt;
    Term t{lead->first - blt.mono, lead->second * inv};
    r.erase(lead);
    for (std::size_t k = 1; k < b.terms_.size(); ++k) {
      const auto& bt = b.terms_[k];
      mpq_mul(prod.get_mpq_t(), bt.coeff.get_mpq_t(), t.coeff.get_mpq_t());
      auto [it, inserted] = r.try_emplace(bt.mono + t.mono);
      if (inserted) {
        it->second = -prod;
      } else {
        it->second -= prod;
        if (sgn(it->second) == 0) r.erase(it);
      }
    }
    qterms.push_back(std::move(t));
  }
  q.terms_ = std::move(qterms);  // generated in descending order
  return q;
}

Polynomial Polynomial::derivative(std::size_t var) const {
  if (vars_ && var >= vars_->size()) throw UnknownVariable("#" + std::to_string(var));
  std::vector<Term> out;
  for (const auto& t : terms_) {
    unsigned k = t.mono.e[var];
    if (k == 0) continue;
    Monomial m = t.mono;
    m.set(var, k - 1);
    out.push_back({m, t.coeff * k});
  }
  return from_terms(vars_, std::move(out));
}

std::map<unsigned, Polynomial> Polynomial::coefficients_in(std::size_t var) const {
  std::map<unsigned, std::vector<Term>> groups;
  for (const auto& t : terms_) {
    Monomial m = t.mono;
    unsigned k = m.e[var];
    m.set(var, 0);
    groups[k].push_back({m, t.coeff});
  }
  std::map<unsigned, Polynomial> out;
  for (auto& [k, ts] : groups) {
    // Removing one variable from a graded-lex sorted list can break the order.
    out.emplace(k, from_terms(vars_, std::move(ts)));
  }
  return out;
}

Rational Polynomial::content() const {
  if (terms_.empty()) return Rational(1);
  Integer g = 0;
  Integer l = 1;
  for (const auto& t : terms_) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.coeff.get_num_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), t.coeff.get_den_mpz_t());
  }
  Rational c(g, l);
  c.canonicalize();
  return c;
}

Polynomial Polynomial::primitive_part() const {
  if (terms_.empty()) return *this;
  Rational c = content();
  if (c == 1) return *this;
  return scaled(1 / c);
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (vars_ && point.size() != vars_->size()) {
    throw DimensionMismatch("point has " + std::to_string(point.size()) +
                            " coordinates, expected " + std::to_string(vars_->size()));
  }
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff.get_d();
    for (std::size_t i = 0; i < point.size(); ++i) {
      for (unsigned k = 0; k < t.mono.e[i]; ++k) v *= point[i];
    }
    sum += v;
  }
  return sum;
}

bool Polynomial::operator==(const Polynomial& other) const {
  if (terms_.size() != other.terms_.size()) return false;
  if (!terms_.empty()) require_same(vars_, other.vars_);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].mono != other.terms_[i].mono || terms_[i].coeff != other.terms_[i].coeff) {
      return false;
    }
  }
  return true;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& t : terms_) {
    Rational c = t.coeff;
    bool negative = sgn(c) < 0;
    if (negative) c = -c;
    if (first) {
      if (negative) s += '-';
    } else {
      s += negative ? " - " : " + ";
    }
    first = false;
    std::string mono = vars_ ? monomial_string(*vars_, t.mono) : std::string();
    if (mono.empty()) {
      s += c.get_str();
    } else if (c == 1) {
      s += mono;
    } else {
      s += c.get_str() + '*' + mono;
    }
  }
  return s;
}

// -------------------------------------------------------- RationalFunction

RationalFunction::RationalFunction(VarTablePtr vars)
    : num_(vars), den_(Polynomial::constant(vars, 1)) {}

RationalFunction::RationalFunction(Polynomial num)
    : num_(std::move(num)), den_(Polynomial::constant(num_.vars(), 1)) {}

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  require_same(num_.vars(), den_.vars());
  if (den_.is_zero()) throw DivisionByZero();
  normalize();
}

RationalFunction RationalFunction::constant(VarTablePtr vars, const Rational& c) {
  return RationalFunction(Polynomial::constant(std::move(vars), c));
}

RationalFunction RationalFunction::variable(VarTablePtr vars, std::size_t index) {
  return RationalFunction(Polynomial::variable(std::move(vars), index));
}

void RationalFunction::fix_denominator() {
  const Rational& lc = den_.leading().coeff;
  Rational factor = den_.content();
  if (sgn(lc) < 0) factor = -factor;
  if (factor != 1) {
    Rational inv = 1 / factor;
    den_ = den_.scaled(inv);
    num_ = num_.scaled(inv);
  }
}

void RationalFunction::normalize() {
  if (num_.is_zero()) {
    den_ = Polynomial::constant(num_.vars(), 1);
    return;
  }
  if (!den_.is_constant()) {
    Polynomial g = gcd(num_, den_);
    if (!g.is_constant()) {
      num_ = *Polynomial::divide_exact(num_, g);
      den_ = *Polynomial::divide_exact(den_, g);
    }
  }
  fix_denominator();
}

RationalFunction RationalFunction::operator-() const {
  return RationalFunction(-num_, den_, Normalized{});
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  require_same(a.vars(), b.vars());
  if (a.den_.is_one() && b.den_.is_one()) {
    return RationalFunction(a.num_ + b.num_, a.den_, RationalFunction::Normalized{});
  }
  if (a.den_ == b.den_) {
    RationalFunction r(a.num_ + b.num_, a.den_, RationalFunction::Normalized{});
    r.normalize();
    return r;
  }
  if (b.den_.is_one()) {
    return RationalFunction(a.num_ + b.num_ * a.den_, a.den_, RationalFunction::Normalized{});
  }
  if (a.den_.is_one()) {
    return RationalFunction(a.num_ * b.den_ + b.num_, b.den_, RationalFunction::Normalized{});
  }
  Polynomial g = gcd(a.den_, b.den_);
  if (g.is_constant()) {
    RationalFunction r(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_,
                       RationalFunction::Normalized{});
    r.fix_denominator();
    return r;
  }
  Polynomial ad = *Polynomial::divide_exact(a.den_, g);
  Polynomial bd = *Polynomial::divide_exact(b.den_, g);
  Polynomial num = a.num_ * bd + b.num_ * ad;
  Polynomial den = ad * b.den_;
  if (num.is_zero()) return RationalFunction(a.vars());
  Polynomial h = gcd(num, g);
  if (!h.is_constant()) {
    num = *Polynomial::divide_exact(num, h);
    den = *Polynomial::divide_exact(den, h);
  }
  RationalFunction r(std::move(num), std::move(den), RationalFunction::Normalized{});
  r.fix_denominator();
  return r;
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  require_same(a.vars(), b.vars());
  if (a.is_zero() || b.is_zero()) return RationalFunction(a.vars());
  if (a.den_.is_one() && b.den_.is_one()) {
    return RationalFunction(a.num_ * b.num_, a.den_, RationalFunction::Normalized{});
  }
  if (a.is_constant()) return b.scaled(a.num_.constant_value());
  if (b.is_constant()) return a.scaled(b.num_.constant_value());
  Polynomial an = a.num_;
  Polynomial bd = b.den_;
  Polynomial bn = b.num_;
  Polynomial ad = a.den_;
  if (!b.den_.is_one()) {
    Polynomial g = gcd(a.num_, b.den_);
    if (!g.is_constant()) {
      an = *Polynomial::divide_exact(an, g);
      bd = *Polynomial::divide_exact(bd, g);
    }
  }
  if (!a.den_.is_one()) {
    Polynomial g = gcd(b.num_, a.den_);
    if (!g.is_constant()) {
      bn = *Polynomial::divide_exact(bn, g);
      ad = *Polynomial::divide_exact(ad, g);
    }
  }
  RationalFunction r(an * bn, ad * bd, RationalFunction::Normalized{});
  r.fix_denominator();
  return r;
}

RationalFunction RationalFunction::inverse() const {
  if (is_zero()) throw DivisionByZero();
  RationalFunction r(den_, num_, Normalized{});
  r.fix_denominator();
  return r;
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  return a * b.inverse();
}

RationalFunction RationalFunction::scaled(const Rational& c) const {
  if (sgn(c) == 0) return RationalFunction(vars());
  return RationalFunction(num_.scaled(c), den_, Normalized{});
}

RationalFunction RationalFunction::derivative(std::size_t var) const {
  if (!vars() || var >= vars()->size()) throw UnknownVariable("#" + std::to_string(var));
  if (den_.is_one()) return RationalFunction(num_.derivative(var), den_, Normalized{});
  Polynomial dd = den_.derivative(var);
  if (dd.is_zero()) {
    RationalFunction r(num_.derivative(var), den_, Normalized{});
    r.normalize();
    return r;
  }
  // (n/d)' = (n' d - n d') / d^2; divide the common factor gcd(d, d') first.
  Polynomial g = gcd(den_, dd);
  Polynomial dr = *Polynomial::divide_exact(den_, g);
  Polynomial ddr = *Polynomial::divide_exact(dd, g);
  Polynomial num = num_.derivative(var) * dr - num_ * ddr;
  Polynomial den = den_ * dr;
  RationalFunction r(std::move(num), std::move(den), Normalized{});
  r.normalize();
  return r;
}

double RationalFunction::evaluate(std::span<const double> point, double guard) const {
  double d = den_.evaluate(point);
  if (std::abs(d) < guard) {
    throw DenominatorNearZero(den_.to_string(), std::vector<double>(point.begin(), point.end()), d);
  }
  return num_.evaluate(point) / d;
}

std::string RationalFunction::to_string() const {
  if (den_.is_one()) return num_.to_string();
  return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
}

// ------------------------------------------------------- free operations

Polynomial poly_arith(const Polynomial& a, const Polynomial& b, ArithOp op) {
  require_same(a.vars(), b.vars());
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: break;
  }
  throw Error("polynomial division is not a ring operation; use RationalFunction");
}

RationalFunction rat_arith(const RationalFunction& a, const RationalFunction& b, ArithOp op) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: return a / b;
  }
  return a;
}

RationalFunction rat_diff(const RationalFunction& a, std::size_t var) { return a.derivative(var); }

double rat_eval(const RationalFunction& a, std::span<const double> point, double guard) {
  return a.evaluate(point, guard);
}

// ---------------------------------------------------- CompiledPolynomial

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) {
  nvars_ = p.vars() ? p.vars()->size() : 0;
  degrees_.assign(nvars_, 0);
  terms_.reserve(p.size());
  for (const auto& t : p.terms()) {
    terms_.push_back({t.coeff.get_d(), t.mono.e});
    for (std::size_t v = 0; v < nvars_; ++v) degrees_[v] = std::max<unsigned>(degrees_[v], t.mono.e[v]);
  }
}

unsigned CompiledPolynomial::max_degree(std::size_t var) const {
  return var < degrees_.size() ? degrees_[var] : 0;
}

double CompiledPolynomial::evaluate(const std::vector<std::vector<double>>& powers) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (t.e[i]) v *= powers[i][t.e[i]];
    }
    sum += v;
  }
  return sum;
}

void fill_powers(std::span<const double> point, std::span<const unsigned> max_degree,
                 std::vector<std::vector<double>>& powers) {
  powers.resize(point.size());
  for (std::size_t v = 0; v < point.size(); ++v) {
    unsigned d = v < max_degree.size() ? max_degree[v] : 0;
    auto& row = powers[v];
    row.resize(d + 1);
    row[0] = 1.0;
    for (unsigned k = 1; k <= d; ++k) row[k] = row[k - 1] * point[v];
  }
}

}  // namespace hgd
