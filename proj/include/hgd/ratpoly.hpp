#ifndef HGD_RATPOLY_HPP
#define HGD_RATPOLY_HPP

// Exact sparse multivariate polynomials and rational functions over Q.

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hgd/errors.hpp"

namespace hgd {

using Rational = mpq_class;
using Integer = mpz_class;

inline constexpr std::size_t kMaxVars = 16;

/// Ordered, immutable list of variable names.
class VarTable {
 public:
  explicit VarTable(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index(const std::string& name) const;  // throws UnknownVariable

  bool operator==(const VarTable& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

using VarTablePtr = std::shared_ptr<const VarTable>;

VarTablePtr make_vars(std::vector<std::string> names);

/// Throws VarTableMismatch unless both tables name the same variables.
void require_same(const VarTablePtr& a, const VarTablePtr& b);

/// Exponent vector of a monomial. Unused slots stay zero.
struct Monomial {
  std::array<std::uint8_t, kMaxVars> e{};
  std::uint16_t deg = 0;

  std::uint8_t operator[](std::size_t i) const { return e[i]; }
  void set(std::size_t i, unsigned value);

  bool divides(const Monomial& other) const;
  Monomial operator+(const Monomial& other) const;
  Monomial operator-(const Monomial& other) const;  // requires divides
  static Monomial lcm(const Monomial& a, const Monomial& b);
  static Monomial min(const Monomial& a, const Monomial& b);

  bool operator==(const Monomial& other) const { return e == other.e; }
  bool operator!=(const Monomial& other) const { return e != other.e; }
};

/// Graded lexicographic order: true when a > b.
bool grlex_greater(const Monomial& a, const Monomial& b);

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const;
};

/// Sparse polynomial with rational coefficients. Terms are kept sorted
/// in descending graded-lex order with no zero coefficients.
class Polynomial {
 public:
  struct Term {
    Monomial mono;
    Rational coeff;
  };

  Polynomial() = default;
  explicit Polynomial(VarTablePtr vars) : vars_(std::move(vars)) {}

  static Polynomial constant(VarTablePtr vars, const Rational& c);
  static Polynomial variable(VarTablePtr vars, std::size_t index);
  static Polynomial monomial(VarTablePtr vars, const Monomial& m, const Rational& c);
  /// Builds from arbitrary (possibly repeated, possibly zero) terms.
  static Polynomial from_terms(VarTablePtr vars, std::vector<Term> terms);

  const VarTablePtr& vars() const { return vars_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_one() const;
  /// Constant value; requires is_constant().
  Rational constant_value() const;

  const Term& leading() const { return terms_.front(); }
  unsigned total_degree() const;
  unsigned degree(std::size_t var) const;
  /// Per-variable minimum exponent over all terms.
  Monomial min_exponents() const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial scaled(const Rational& c) const;
  Polynomial shifted(const Monomial& m) const;  // multiply by a monomial
  Polynomial unshifted(const Monomial& m) const;  // divide by a monomial that divides every term

  /// Exact quotient a / b if b divides a, otherwise nullopt.
  static std::optional<Polynomial> divide_exact(const Polynomial& a, const Polynomial& b);

  Polynomial derivative(std::size_t var) const;

  /// Coefficients with respect to `var`: degree -> coefficient polynomial
  /// (which does not involve `var`).
  std::map<unsigned, Polynomial> coefficients_in(std::size_t var) const;

  /// Positive rational c such that this = c * p with p having coprime
  /// integer coefficients; the sign of p's leading coefficient is kept.
  Rational content() const;
  Polynomial primitive_part() const;

  double evaluate(std::span<const double> point) const;

  bool operator==(const Polynomial& other) const;
  bool operator!=(const Polynomial& other) const { return !(*this == other); }

  /// Canonical text, terms in descending graded-lex order, e.g. "2*x^2*y - 1".
  std::string to_string() const;

 private:
  void check(const Polynomial& other) const;

  VarTablePtr vars_;
  std::vector<Term> terms_;
};

/// gcd of two polynomials, normalized to a primitive integer polynomial
/// with positive leading coefficient. gcd(0, 0) = 0.
Polynomial gcd(const Polynomial& a, const Polynomial& b);

/// Normalized rational function num/den: gcd(num, den) = 1, den is a
/// primitive integer polynomial with positive graded-lex leading coefficient.
class RationalFunction {
 public:
  RationalFunction() = default;
  explicit RationalFunction(VarTablePtr vars);
  explicit RationalFunction(Polynomial num);
  RationalFunction(Polynomial num, Polynomial den);  // throws DivisionByZero

  static RationalFunction constant(VarTablePtr vars, const Rational& c);
  static RationalFunction variable(VarTablePtr vars, std::size_t index);

  const VarTablePtr& vars() const { return num_.vars(); }
  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return den_.is_one() && num_.is_one(); }
  bool is_polynomial() const { return den_.is_one(); }
  bool is_constant() const { return den_.is_one() && num_.is_constant(); }

  RationalFunction operator-() const;
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);
  RationalFunction& operator+=(const RationalFunction& b) { return *this = *this + b; }
  RationalFunction& operator-=(const RationalFunction& b) { return *this = *this - b; }
  RationalFunction& operator*=(const RationalFunction& b) { return *this = *this * b; }
  RationalFunction scaled(const Rational& c) const;
  RationalFunction inverse() const;

  RationalFunction derivative(std::size_t var) const;

  /// Evaluates num/den; throws DenominatorNearZero when |den| < guard.
  double evaluate(std::span<const double> point, double guard = kDefaultGuard) const;

  bool operator==(const RationalFunction& other) const {
    return num_ == other.num_ && den_ == other.den_;
  }
  bool operator!=(const RationalFunction& other) const { return !(*this == other); }

  /// "num" when den = 1, otherwise "(num)/(den)".
  std::string to_string() const;

  static constexpr double kDefaultGuard = 1e-8;

 private:
  struct Normalized {};
  RationalFunction(Polynomial num, Polynomial den, Normalized)
      : num_(std::move(num)), den_(std::move(den)) {}
  void normalize();
  void fix_denominator();

  Polynomial num_;
  Polynomial den_;
};

enum class ArithOp { add, sub, mul, div };

Polynomial poly_arith(const Polynomial& a, const Polynomial& b, ArithOp op);
RationalFunction rat_arith(const RationalFunction& a, const RationalFunction& b, ArithOp op);
RationalFunction rat_diff(const RationalFunction& a, std::size_t var);
double rat_eval(const RationalFunction& a, std::span<const double> point,
                double guard = RationalFunction::kDefaultGuard);

/// Double-precision copy of a polynomial for repeated evaluation.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const Polynomial& p);

  /// `powers[v][k]` must hold point[v]^k up to the largest exponent used.
  double evaluate(const std::vector<std::vector<double>>& powers) const;
  unsigned max_degree(std::size_t var) const;
  std::size_t num_vars() const { return degrees_.size(); }

 private:
  struct Term {
    double coeff;
    std::array<std::uint8_t, kMaxVars> e;
  };
  std::vector<Term> terms_;
  std::vector<unsigned> degrees_;
  std::size_t nvars_ = 0;
};

/// Fills the power table used by CompiledPolynomial::evaluate.
void fill_powers(std::span<const double> point, std::span<const unsigned> max_degree,
                 std::vector<std::vector<double>>& powers);

}  // namespace hgd

#endif  // HGD_RATPOLY_HPP
