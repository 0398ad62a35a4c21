#ifndef HGD_WEYL_HPP
#define HGD_WEYL_HPP

// Differential operators with rational-function coefficients,
// R = Q(x_1..x_d)<d_1..d_d>, kept in normally ordered form
// (coefficients to the left of the derivation monomials).

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hgd/ratpoly.hpp"

namespace hgd {

/// Graded reverse lexicographic order on derivation monomials: true when a > b.
/// For two variables: 1 < d2 < d1 < d2^2 < d1*d2 < d1^2 < ...
bool grevlex_greater(const Monomial& a, const Monomial& b);

struct LeadingTerm {
  RationalFunction coeff;
  Monomial xi;
};

class DiffOperator {
 public:
  struct Term {
    Monomial d;
    RationalFunction coeff;
  };

  DiffOperator() = default;
  explicit DiffOperator(VarTablePtr vars) : vars_(std::move(vars)) {}
  explicit DiffOperator(const RationalFunction& c);

  static DiffOperator partial(VarTablePtr vars, std::size_t var);
  static DiffOperator monomial(VarTablePtr vars, const Monomial& d, const RationalFunction& c);
  static DiffOperator from_terms(VarTablePtr vars, std::vector<Term> terms);

  const VarTablePtr& vars() const { return vars_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  /// Largest derivation degree occurring.
  unsigned order() const { return terms_.empty() ? 0 : terms_.front().d.deg; }
  const Monomial& leading_monomial() const { return terms_.front().d; }
  const RationalFunction& leading_coeff() const { return terms_.front().coeff; }
  /// Coefficient of d^beta (zero when absent).
  RationalFunction coefficient(const Monomial& beta) const;

  DiffOperator operator-() const;
  friend DiffOperator operator+(const DiffOperator& a, const DiffOperator& b);
  friend DiffOperator operator-(const DiffOperator& a, const DiffOperator& b);
  DiffOperator& operator+=(const DiffOperator& b) { return *this = *this + b; }
  DiffOperator& operator-=(const DiffOperator& b) { return *this = *this - b; }
  /// Noncommutative product, normally ordered via d_i a = a d_i + da/dx_i.
  friend DiffOperator operator*(const DiffOperator& a, const DiffOperator& b);

  /// c * this (c multiplies from the left, no derivatives involved).
  DiffOperator left_scaled(const RationalFunction& c) const;
  /// d^beta * this.
  DiffOperator left_shifted(const Monomial& beta) const;
  /// Divides by the leading coefficient.
  DiffOperator monic() const;

  bool operator==(const DiffOperator& other) const;
  bool operator!=(const DiffOperator& other) const { return !(*this == other); }

  /// Canonical text, e.g. "(x1 + x2)*dx1^2*dx2 + dx2".
  std::string to_string() const;

 private:
  VarTablePtr vars_;
  std::vector<Term> terms_;  // strictly descending in grevlex
};

DiffOperator op_mul(const DiffOperator& a, const DiffOperator& b);

/// Throws ZeroOperator for f = 0.
LeadingTerm leading_term(const DiffOperator& f);

/// "dx1^2*dx2" style text of a derivation monomial ("1" for the empty one).
std::string derivation_string(const VarTable& vars, const Monomial& d);

struct NormalFormResult {
  DiffOperator remainder;
  std::vector<DiffOperator> quotients;  // empty unless requested
};

/// Reducer strategy for wNormalForm step 2.
enum class ReducerChoice {
  lowest_index,   // first basis element whose leading monomial divides
  highest_index,  // last such element (used to check uniqueness)
};

/// Division of operators by a fixed list, caching d^beta * g products.
class Reducer {
 public:
  explicit Reducer(std::vector<DiffOperator> basis,
                   ReducerChoice choice = ReducerChoice::lowest_index);

  const std::vector<DiffOperator>& basis() const { return basis_; }

  /// NormalForm: full reduction built from repeated wNormalForm passes.
  NormalFormResult normal_form(const DiffOperator& f, bool with_quotients = false) const;
  /// wNormalForm: reduces only the leading term until it is irreducible.
  NormalFormResult weak_normal_form(const DiffOperator& f, bool with_quotients = false) const;

 private:
  std::optional<std::size_t> find_reducer(const Monomial& m) const;
  const DiffOperator& shifted(std::size_t index, const Monomial& beta) const;
  void reduce_top(DiffOperator& p, std::vector<DiffOperator>* quotients) const;

  std::vector<DiffOperator> basis_;
  ReducerChoice choice_;
  mutable std::unordered_map<std::uint64_t, DiffOperator> cache_;
};

NormalFormResult normal_form(const DiffOperator& f, const std::vector<DiffOperator>& g,
                             bool with_quotients = true);

/// Normal forms against a fixed basis computed with polynomial
/// coefficients internally; the result equals Reducer::normal_form.
class FractionFreeReducer {
 public:
  explicit FractionFreeReducer(const std::vector<DiffOperator>& basis);
  DiffOperator normal_form(const DiffOperator& f) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

struct GroebnerBasis {
  VarTablePtr vars;
  /// Reduced, monic, sorted by ascending leading monomial.
  std::vector<DiffOperator> generators;
  /// Standard monomials in ascending order (1 first); empty when infinite.
  std::vector<Monomial> standard_monomials;
  bool zero_dimensional = false;

  std::size_t rank() const { return standard_monomials.size(); }
};

struct BuchbergerStats {
  std::size_t pairs_considered = 0;
  std::size_t pairs_reduced = 0;
  std::size_t chain_skipped = 0;
  std::size_t zero_reductions = 0;
};

/// Reduced Groebner basis of the left ideal generated by `gens` in R.
GroebnerBasis buchberger(const std::vector<DiffOperator>& gens, BuchbergerStats* stats = nullptr);

/// Throws InfiniteRank for a non-zero-dimensional basis.
const std::vector<Monomial>& standard_monomials(const GroebnerBasis& basis);

/// Staircase of a set of leading monomials; nullopt if unbounded.
std::optional<std::vector<Monomial>> staircase(const std::vector<Monomial>& leading, std::size_t nvars);

/// Coordinates of a reduced operator with respect to the standard monomials.
std::vector<RationalFunction> coordinates(const DiffOperator& reduced,
                                          const std::vector<Monomial>& smons);

/// Nonzero ordinary operator sum_k c_k d_v^k in the ideal, monic in the
/// top power.
DiffOperator eliminate_to_ode(const GroebnerBasis& basis, std::size_t var);

/// Checks that all S-pairs of a basis reduce to zero.
bool is_groebner(const std::vector<DiffOperator>& basis);

/// Gaussian elimination over Q(x). Solves M * sol = rhs for square,
/// nonsingular M; nullopt when singular.
std::optional<std::vector<RationalFunction>> solve_linear(
    std::vector<std::vector<RationalFunction>> m, std::vector<RationalFunction> rhs);

/// Rank of a matrix over Q(x).
std::size_t matrix_rank(std::vector<std::vector<RationalFunction>> m);

}  // namespace hgd

#endif  // HGD_WEYL_HPP
