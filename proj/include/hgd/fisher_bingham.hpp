#ifndef HGD_FISHER_BINGHAM_HPP
#define HGD_FISHER_BINGHAM_HPP

// Fisher–Bingham integral F(x, y, r) = \int_{S^n(r)} exp(t'xt + yt) |dt|
// where the symmetric matrix has x_ii on the diagonal and x_ij/2 off it,
// so t'xt = sum_i x_ii t_i^2 + sum_{i<j} x_ij t_i t_j.
//
// Variables are ordered x11 x12 .. x1m x22 .. xmm y1 .. ym r (m = n+1).

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "hgd/hgd.hpp"
#include "hgd/pfaffian.hpp"
#include "hgd/weyl.hpp"

namespace hgd {

VarTablePtr fb_vars(unsigned n);

/// Index helpers into fb_vars(n); i, j are 0-based and unordered.
std::size_t fb_x_index(unsigned n, std::size_t i, std::size_t j);
std::size_t fb_y_index(unsigned n, std::size_t i);
std::size_t fb_r_index(unsigned n);
std::size_t fb_num_x(unsigned n);

/// Annihilators: toric, trace, rotation and scaling operators.
std::vector<DiffOperator> fb_generators(unsigned n);
/// The same ideal written with y-derivatives only (A_ij, B, C_ij, E).
std::vector<DiffOperator> fb_reduced_generators(unsigned n);
/// The non-toric part of fb_reduced_generators: sphere, rotation and
/// scaling operators in d_y and d_r only.
std::vector<DiffOperator> fb_y_relations(unsigned n);
/// d_v as a monomial in d_y, d_r modulo the toric operators
/// (d_xij -> d_yi d_yj).
Monomial fb_substitution(unsigned n, std::size_t var);

/// Standard derivations of the ideal of fb_generators(n) in the grevlex
/// order of fb_vars(n), computed through the toric reduction: the y/r
/// subsystem is reduced by Buchberger with x fixed at random integers and
/// full-ring derivations are tested for independence in its quotient.
/// Correct for generic x (Monte Carlo over `seed`).
struct FBStaircase {
  std::vector<Monomial> standard;  // ascending
  std::size_t reduced_rank = 0;    // rank of the y/r subsystem
  std::vector<Rational> x_values;
};
FBStaircase fb_staircase(unsigned n, std::uint64_t seed = 1);

struct FBParams {
  unsigned n = 1;
  std::vector<double> x;  // upper triangle, fb_vars order
  std::vector<double> y;
  double r = 1.0;

  static FBParams zero(unsigned n);
  /// From a point of fb_vars(n) (the r slot included).
  static FBParams from_point(unsigned n, std::span<const double> point);
  std::vector<double> point() const;
  /// Symmetric matrix with x_ij/2 off the diagonal.
  std::vector<std::vector<double>> matrix() const;
};

/// Exponent vector of a monomial in t (length n+1).
using TMonomial = std::vector<unsigned>;

struct QuadratureOptions {
  double tol = 1e-12;       // relative, against the largest result
  unsigned order = 20;      // Gauss–Legendre points per panel
  unsigned min_panels = 4;
  unsigned max_panels = 1024;
};

/// Moments \int_{S^n(r)} t^alpha exp(t'xt + yt) |dt| for n = 1, 2.
std::vector<double> fb_quadrature(const FBParams& params, const std::vector<TMonomial>& monomials,
                                  const QuadratureOptions& opts = {});

/// F and its derivatives d^beta F for derivation monomials of fb_vars(n),
/// each with at most one d_r.
std::vector<double> fb_derivatives(const FBParams& params, const std::vector<Monomial>& derivations,
                                   const QuadratureOptions& opts = {});

struct SufficientStats {
  unsigned n = 1;
  std::vector<double> s_x;  // S_ij for i <= j, fb_vars order
  std::vector<double> s_y;  // S_i
  std::size_t N = 0;
};

/// Averages of t_i t_j and t_i over unit vectors; rows off the unit sphere
/// by more than 1e-6 raise NonUnitPoint, others are renormalized.
SufficientStats suff_stats(const std::vector<std::vector<double>>& points);

SufficientStats read_stats_json(const std::string& path);
SufficientStats parse_stats_json(const std::string& text);
std::vector<std::vector<double>> read_sample_csv(const std::string& path);

/// Exact Groebner basis of fb_generators(n), computed once per process.
/// Practical for n = 1 only (see fb_staircase for n = 2).
const GroebnerBasis& fb_groebner(unsigned n);
/// Pfaffian system in the basis of standard derivations, computed once per
/// process: symbolic (from fb_groebner) for n = 1, evaluated pointwise by a
/// LocalPfaffian over the y/r relations for n >= 2.
const PfaffianSystem& fb_pfaffian(unsigned n);
/// The pointwise system for any n (n = 1 included, for cross-checks).
PfaffianSystem fb_local_pfaffian(unsigned n);

/// The objective F(x, y, 1) exp(-sum S_ij x_ij - sum S_i y_i), as a tilted
/// Pfaffian system plus quadrature-based initial values.
class MLEObjective {
 public:
  MLEObjective(unsigned n, SufficientStats stats, QuadratureOptions quad = {});

  unsigned n() const { return n_; }
  const SufficientStats& stats() const { return stats_; }
  const PfaffianSystem& system() const { return tilted_; }
  /// Coefficients of the exponent's linear form, one per variable.
  const std::vector<double>& linear_coeffs() const { return linear_; }

  /// G of the tilted system at `point` (r slot must be 1) by quadrature.
  StateVector initial_state(std::span<const double> point) const;
  /// Objective value by quadrature.
  double value(std::span<const double> point) const;

  /// Box with r frozen at 1 from per-parameter intervals.
  std::vector<Interval> domain(const std::vector<Interval>& x_box, const std::vector<Interval>& y_box) const;

 private:
  unsigned n_;
  SufficientStats stats_;
  QuadratureOptions quad_;
  PfaffianSystem tilted_;
  std::vector<double> linear_;
};

/// Minimizer of the quadratic model of the log-objective at 0, built from
/// uniform-sphere moments; projected into `box` when given.
std::vector<double> start_point(unsigned n, const SufficientStats& stats,
                                const std::vector<Interval>* box = nullptr);

/// Moments of the uniform distribution on S^n: E[t_i^2], E[t_i^4], E[t_i^2 t_j^2].
std::array<double, 3> uniform_moments(unsigned n);

struct SpectralReport {
  std::vector<double> lambda;             // descending
  std::vector<std::vector<double>> axes;  // axes[k] belongs to lambda[k]
  double y_norm = 0;
};

SpectralReport spectral_report(const FBParams& params);

/// Representative with trace zero of the class x + cI (same objective for
/// unit-sphere statistics).
FBParams trace_free(const FBParams& params);

/// Search boxes of the two shipped experiments (x and y intervals in
/// fb_vars order) and, for magnetism, a published start point.
struct DomainPreset {
  unsigned n;
  std::vector<Interval> x;
  std::vector<Interval> y;
  std::vector<double> start;  // full point with r = 1; empty: use start_point
};
DomainPreset domain_preset(const std::string& name);

}  // namespace hgd

#endif  // HGD_FISHER_BINGHAM_HPP
