// Multivariate gcd over Z.
//
// Degree bounds per variable come from gcds of univariate images modulo a
// prime; a zero bound proves the gcd is free of that variable, which splits
// the problem into gcds of coefficient polynomials. Only when every shared
// variable survives do we fall back to the subresultant PRS.

#include <algorithm>
#include <map>
#include <optional>
#include <random>

#include "hgd/ratpoly.hpp"

namespace hgd {
namespace {

constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(p & kPrime);
  std::uint64_t hi = static_cast<std::uint64_t>(p >> 61);
  std::uint64_t s = lo + hi;
  if (s >= kPrime) s -= kPrime;
  return s;
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  if (s >= kPrime) s -= kPrime;
  return s;
}

std::uint64_t submod(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + kPrime - b; }

std::uint64_t powmod(std::uint64_t a, std::uint64_t e) {
  std::uint64_t r = 1;
  while (e) {
    if (e & 1) r = mulmod(r, a);
    a = mulmod(a, a);
    e >>= 1;
  }
  return r;
}

std::uint64_t invmod(std::uint64_t a) { return powmod(a, kPrime - 2); }

std::uint64_t coeff_mod(const Rational& c) {
  std::uint64_t n = mpz_fdiv_ui(c.get_num_mpz_t(), kPrime);
  if (c.get_den() != 1) {
    std::uint64_t d = mpz_fdiv_ui(c.get_den_mpz_t(), kPrime);
    n = mulmod(n, invmod(d));
  }
  return n;
}

using UPolyMod = std::vector<std::uint64_t>;  // index = degree

void trim(UPolyMod& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

// Image of p in (Z/p)[var] after substituting `point` for the other variables.
UPolyMod image(const Polynomial& p, std::size_t var, const std::vector<std::vector<std::uint64_t>>& powers) {
  UPolyMod out(p.degree(var) + 1, 0);
  const std::size_t n = p.vars()->size();
  for (const auto& t : p.terms()) {
    std::uint64_t v = coeff_mod(t.coeff);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != var && t.mono.e[i]) v = mulmod(v, powers[i][t.mono.e[i]]);
    }
    out[t.mono.e[var]] = addmod(out[t.mono.e[var]], v);
  }
  trim(out);
  return out;
}

std::size_t gcd_degree_mod(UPolyMod a, UPolyMod b) {
  while (!b.empty()) {
    // a <- a mod b
    std::uint64_t inv = invmod(b.back());
    while (a.size() >= b.size()) {
      std::uint64_t f = mulmod(a.back(), inv);
      std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) {
        a[shift + i] = submod(a[shift + i], mulmod(f, b[i]));
      }
      trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return a.empty() ? 0 : a.size() - 1;
}

class DegreeBounds {
 public:
  DegreeBounds() : rng_(0x5eed1234abcdULL) {}

  // Upper bound on deg_var gcd(a, b). Exact when it returns 0.
  unsigned bound(const Polynomial& a, const Polynomial& b, std::size_t var) {
    const unsigned da = a.degree(var);
    const unsigned db = b.degree(var);
    unsigned best = std::min(da, db);
    const std::size_t n = a.vars()->size();
    int successes = 0;
    for (int attempt = 0; attempt < 6 && successes < 2 && best > 0; ++attempt) {
      std::vector<std::vector<std::uint64_t>> powers(n);
      for (std::size_t i = 0; i < n; ++i) {
        unsigned d = std::max(a.degree(i), b.degree(i));
        std::uint64_t x = rng_() % kPrime;
        powers[i].resize(d + 1);
        powers[i][0] = 1;
        for (unsigned k = 1; k <= d; ++k) powers[i][k] = mulmod(powers[i][k - 1], x);
      }
      UPolyMod ia = image(a, var, powers);
      UPolyMod ib = image(b, var, powers);
      if (ia.size() != da + 1 || ib.size() != db + 1) continue;  // leading coefficient vanished
      ++successes;
      best = std::min<unsigned>(best, static_cast<unsigned>(gcd_degree_mod(std::move(ia), std::move(ib))));
    }
    return best;
  }

 private:
  std::mt19937_64 rng_;
};

Polynomial normalized(const Polynomial& p) {
  Polynomial q = p.primitive_part();
  if (!q.is_zero() && sgn(q.leading().coeff) < 0) q = -q;
  return q;
}

Polynomial one_like(const Polynomial& p) { return Polynomial::constant(p.vars(), 1); }

Polynomial gcd_primitive(const Polynomial& a, const Polynomial& b);

// gcd of a list of polynomials; stops early once it becomes constant.
Polynomial gcd_list(std::vector<Polynomial> list) {
  std::sort(list.begin(), list.end(), [](const auto& x, const auto& y) { return x.size() < y.size(); });
  Polynomial g = normalized(list.front());
  for (std::size_t i = 1; i < list.size() && !g.is_constant(); ++i) {
    g = gcd_primitive(g, normalized(list[i]));
  }
  return g.is_constant() ? one_like(g) : g;
}

// Dense representation in one variable with coefficients free of it.
using Dense = std::vector<Polynomial>;

Dense to_dense(const Polynomial& p, std::size_t var) {
  auto coeffs = p.coefficients_in(var);
  Dense d(coeffs.rbegin()->first + 1, Polynomial(p.vars()));
  for (auto& [k, c] : coeffs) d[k] = std::move(c);
  return d;
}

Polynomial from_dense(const Dense& d, std::size_t var) {
  Polynomial out(d.front().vars());
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k].is_zero()) continue;
    Monomial m;
    m.set(var, static_cast<unsigned>(k));
    out += d[k].shifted(m);
  }
  return out;
}

void trim(Dense& d) {
  while (d.size() > 1 && d.back().is_zero()) d.pop_back();
}

bool is_zero(const Dense& d) { return d.size() == 1 && d[0].is_zero(); }

Polynomial dense_content(const Dense& d) {
  std::vector<Polynomial> nz;
  for (const auto& c : d) {
    if (!c.is_zero()) nz.push_back(c);
  }
  return gcd_list(std::move(nz));
}

Dense dense_divide(const Dense& d, const Polynomial& c) {
  Dense out;
  out.reserve(d.size());
  for (const auto& x : d) out.push_back(*Polynomial::divide_exact(x, c));
  return out;
}

// Pseudo-remainder: lc(b)^(deg a - deg b + 1) * a mod b.
Dense prem(Dense a, const Dense& b) {
  const std::size_t db = b.size() - 1;
  const Polynomial& lb = b.back();
  int delta = static_cast<int>(a.size()) - static_cast<int>(db);
  int steps = 0;
  while (!is_zero(a) && a.size() - 1 >= db) {
    Polynomial la = a.back();
    std::size_t shift = a.size() - 1 - db;
    for (auto& c : a) c = c * lb;
    for (std::size_t i = 0; i <= db; ++i) a[shift + i] -= la * b[i];
    a.pop_back();
    if (a.empty()) a.push_back(Polynomial(lb.vars()));
    trim(a);
    ++steps;
  }
  for (int k = steps; k < delta; ++k) {
    for (auto& c : a) c = c * lb;
  }
  return a;
}

Polynomial pow(const Polynomial& p, unsigned e) {
  Polynomial r = one_like(p);
  for (unsigned i = 0; i < e; ++i) r = r * p;
  return r;
}

Polynomial subresultant_gcd(const Polynomial& pa, const Polynomial& pb, std::size_t var) {
  Dense a = to_dense(pa, var);
  Dense b = to_dense(pb, var);
  Polynomial ca = dense_content(a);
  Polynomial cb = dense_content(b);
  Polynomial d = gcd_primitive(ca, cb);
  a = dense_divide(a, ca);
  b = dense_divide(b, cb);
  if (a.size() < b.size()) std::swap(a, b);
  Polynomial g = one_like(pa);
  Polynomial h = one_like(pa);
  while (true) {
    unsigned delta = static_cast<unsigned>(a.size() - b.size());
    Dense r = prem(a, b);
    if (is_zero(r)) break;
    if (r.size() == 1) {
      b = Dense{one_like(pa)};
      break;
    }
    a = std::move(b);
    Polynomial divisor = g * pow(h, delta);
    b = dense_divide(r, divisor);
    g = a.back();
    if (delta == 0) {
      // h unchanged
    } else if (delta == 1) {
      h = g;
    } else {
      h = *Polynomial::divide_exact(pow(g, delta), pow(h, delta - 1));
    }
  }
  Dense prim = dense_divide(b, dense_content(b));
  return normalized(from_dense(prim, var) * d);
}

Polynomial gcd_primitive(const Polynomial& a0, const Polynomial& b0) {
  if (a0.is_zero()) return normalized(b0);
  if (b0.is_zero()) return normalized(a0);
  if (a0.is_constant() || b0.is_constant()) return one_like(a0);
  if (a0 == b0 || a0 == -b0) return normalized(a0);

  Monomial ma = a0.min_exponents();
  Monomial mb = b0.min_exponents();
  Monomial m = Monomial::min(ma, mb);
  Polynomial a = ma.deg ? a0.unshifted(ma) : a0;
  Polynomial b = mb.deg ? b0.unshifted(mb) : b0;
  auto with_mono = [&](Polynomial g) {
    return m.deg ? normalized(g.shifted(m)) : normalized(g);
  };
  if (a.is_constant() || b.is_constant()) return with_mono(one_like(a0));

  const std::size_t n = a.vars()->size();
  std::vector<unsigned> da(n), db(n);
  for (std::size_t v = 0; v < n; ++v) {
    da[v] = a.degree(v);
    db[v] = b.degree(v);
  }

  // The gcd is free of v: it divides every coefficient of a and b in v.
  // Random integer combinations of those coefficients have the same gcd
  // with high probability; exact division of a and b confirms it.
  auto gcd_free_of = [&](std::size_t v) {
    auto ca = a.coefficients_in(v);
    auto cb = b.coefficients_in(v);
    std::mt19937_64 rng(0xc0ffee + v);
    auto mix = [&](const std::map<unsigned, Polynomial>& cs) {
      Polynomial s(a.vars());
      for (const auto& [k, c] : cs) s += c.scaled(Rational(static_cast<long>(rng() % 1000003) + 1));
      return s;
    };
    for (int attempt = 0; attempt < 3; ++attempt) {
      Polynomial g = gcd_primitive(normalized(mix(ca)), normalized(mix(cb)));
      if (g.is_constant()) return with_mono(one_like(a0));
      if (Polynomial::divide_exact(a, g) && Polynomial::divide_exact(b, g)) return with_mono(g);
    }
    std::vector<Polynomial> list;
    for (auto& [k, c] : ca) list.push_back(std::move(c));
    for (auto& [k, c] : cb) list.push_back(std::move(c));
    return with_mono(gcd_list(std::move(list)));
  };

  // A variable present in only one operand cannot occur in the gcd.
  for (std::size_t v = 0; v < n; ++v) {
    if ((da[v] == 0) != (db[v] == 0)) return gcd_free_of(v);
  }

  DegreeBounds bounds;
  std::vector<unsigned> bound(n, 0);
  bool all_zero = true;
  std::optional<std::size_t> free_var;
  for (std::size_t v = 0; v < n; ++v) {
    if (da[v] == 0) continue;
    bound[v] = bounds.bound(a, b, v);
    if (bound[v] == 0) {
      if (!free_var) free_var = v;
    } else {
      all_zero = false;
    }
  }
  // Degree bounds are upper bounds: all zero means the gcd is constant.
  if (all_zero) return with_mono(one_like(a0));

  if (free_var) return gcd_free_of(*free_var);

  auto bound_matches = [&](const std::vector<unsigned>& deg) {
    for (std::size_t v = 0; v < n; ++v) {
      if (bound[v] != deg[v]) return false;
    }
    return true;
  };
  if (bound_matches(da)) {
    if (auto q = Polynomial::divide_exact(b, a)) return with_mono(a);
  }
  if (bound_matches(db)) {
    if (auto q = Polynomial::divide_exact(a, b)) return with_mono(b);
  }

  std::size_t best = n;
  for (std::size_t v = 0; v < n; ++v) {
    if (da[v] == 0) continue;
    if (best == n || std::max(da[v], db[v]) < std::max(da[best], db[best])) best = v;
  }
  return with_mono(subresultant_gcd(a, b, best));
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) {
  require_same(a.vars(), b.vars());
  if (a.is_zero() && b.is_zero()) return Polynomial(a.vars());
  return gcd_primitive(a.primitive_part(), b.primitive_part());
}

}  // namespace hgd
