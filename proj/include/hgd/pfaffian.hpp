#ifndef HGD_PFAFFIAN_HPP
#define HGD_PFAFFIAN_HPP

// Pfaffian systems dG/dz_i = P_i G (+ q_i) built from a Groebner basis.

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hgd/weyl.hpp"

namespace hgd {

using RatMatrix = std::vector<std::vector<RationalFunction>>;

/// Point of the domain and the numeric vector G = (s_k . g).
struct StateVector {
  std::vector<double> point;
  std::vector<double> values;
};

/// Inhomogeneous part q_i(z) of dG/dz_i = P_i G + q_i.
using InhomogeneousTerm = std::function<Eigen::VectorXd(std::size_t var, std::span<const double> point)>;

/// Pfaffian matrices evaluated pointwise from a truncated Macaulay matrix:
/// the rows d^beta g (|beta| <= prolongation) of the relations are
/// evaluated at the point and the jets outside the basis are solved for.
/// Derivations outside the active set are rewritten as monomials in the
/// active ones (d_v -> d^substitution[v]), which is valid when the ideal
/// contains d_v - d^substitution[v] with constant coefficients.
class LocalPfaffian {
 public:
  struct Spec {
    VarTablePtr vars;
    /// Polynomial coefficients; derivations from the active set only.
    std::vector<DiffOperator> relations;
    /// One entry per variable, in active derivations.
    std::vector<Monomial> substitution;
    /// Basis monomials of the quotient, in active derivations; the first
    /// one must be 1.
    std::vector<Monomial> basis;
    unsigned prolongation = 2;
  };

  struct Values {
    std::vector<Eigen::MatrixXd> matrices;  // P_i, one per variable
    Eigen::MatrixXd grad;                   // row i: coordinates of d_i
    // Filled on request: dmatrices[j][i] = dP_i/dz_j, dgrad[j] = d grad/dz_j.
    std::vector<std::vector<Eigen::MatrixXd>> dmatrices;
    std::vector<Eigen::MatrixXd> dgrad;
  };

  explicit LocalPfaffian(Spec spec);

  const Spec& spec() const { return spec_; }
  std::size_t rows() const { return rows_.size(); }
  std::size_t columns() const { return columns_.size(); }

  /// Throws DenominatorNearZero when the relations lose rank at the point
  /// (the point lies on, or within `guard` of, the singular locus).
  /// Derivatives come from differentiating the linear solve.
  Values evaluate(std::span<const double> point, double guard = RationalFunction::kDefaultGuard,
                  bool derivatives = false) const;

 private:
  struct Entry {
    std::size_t col;
    CompiledPolynomial coeff;
    std::vector<std::pair<std::size_t, CompiledPolynomial>> dcoeff;  // nonzero partials
  };
  Spec spec_;
  std::vector<Monomial> columns_;                // descending grevlex
  std::vector<std::vector<Entry>> rows_;
  std::vector<unsigned> max_degree_;
  std::vector<std::size_t> basis_cols_;
  std::vector<std::size_t> free_cols_;           // all others
  std::vector<std::size_t> target_of_;           // column -> position in free_cols_
  std::vector<std::vector<std::size_t>> targets_;  // [var][k] column of d_var * basis[k]
  std::vector<std::size_t> grad_targets_;
  std::size_t generic_rank_ = 0;
};

class PfaffianSystem {
 public:
  PfaffianSystem() = default;

  VarTablePtr vars;
  /// s_1 = 1, possibly non-monic elements c(x) d^beta.
  std::vector<DiffOperator> basis;
  /// P_i, one per variable.
  std::vector<RatMatrix> matrices;
  /// Row i: coordinates of d_i in the basis.
  RatMatrix grad_matrix;
  /// Distinct reduced denominators of all entries.
  std::vector<Polynomial> denominators;
  /// Gauge shift c_i: the numeric P_i is P_i + c_i I.
  std::vector<double> shift;
  /// Coordinates of 1 in the basis (e_1 for s_1 = 1).
  std::vector<RationalFunction> unit;
  InhomogeneousTerm inhomo;
  /// When set, matrices and grad_matrix are empty and all numeric
  /// evaluations go through this evaluator.
  std::shared_ptr<const LocalPfaffian> local;

  std::size_t dim() const { return vars ? vars->size() : 0; }
  std::size_t rank() const { return local ? local->spec().basis.size() : basis.size(); }
  bool symbolic() const { return !local; }

  /// Numeric P_i + c_i I. Throws DenominatorNearZero.
  Eigen::MatrixXd eval_matrix(std::size_t var, std::span<const double> point,
                              double guard = RationalFunction::kDefaultGuard) const;
  /// sum_i w_i (P_i + c_i I) for the variables with w_i != 0.
  Eigen::MatrixXd eval_combination(std::span<const double> weights, std::span<const double> point,
                                   double guard = RationalFunction::kDefaultGuard) const;
  /// Numeric coordinates of 1 in the basis (e_1 for s_1 = 1).
  Eigen::VectorXd eval_unit(std::span<const double> point, double guard = RationalFunction::kDefaultGuard) const;
  /// Numeric grad_matrix, gauge shift included.
  Eigen::MatrixXd eval_grad(std::span<const double> point,
                            double guard = RationalFunction::kDefaultGuard) const;
  /// Numeric dP_i/dz_j: result[j][i] (the gauge shift is constant).
  std::vector<std::vector<Eigen::MatrixXd>> eval_matrix_derivatives(
      std::span<const double> point, double guard = RationalFunction::kDefaultGuard) const;
  /// Numeric d(grad row i)/dz_j for all i, j: result[j] is d x p.
  std::vector<Eigen::MatrixXd> eval_grad_derivatives(std::span<const double> point,
                                                     double guard = RationalFunction::kDefaultGuard) const;
  /// sum_i w_i q_i(point); zero without an inhomogeneous term.
  Eigen::VectorXd eval_inhomo(std::span<const double> weights, std::span<const double> point) const;

  /// Rebuilds the compiled numeric form; called by the constructors below.
  void compile();

 private:
  struct Entry {
    std::size_t row;
    std::size_t col;
    CompiledPolynomial num;
    std::size_t den;  // index into denominators
  };
  struct Compiled {
    std::vector<CompiledPolynomial> dens;
    std::vector<std::vector<Entry>> matrices;  // nonzero entries per variable
    std::vector<Entry> grad;
    std::vector<Entry> unit;
    std::vector<unsigned> max_degree;
  };
  struct Workspace {
    std::vector<std::vector<double>> powers;
    std::vector<double> den_values;
    std::vector<char> den_done;
  };
  void prepare(std::span<const double> point, Workspace& ws) const;
  const LocalPfaffian::Values& local_values(std::span<const double> point, double guard,
                                           bool derivatives = false) const;
  double den_value(std::size_t k, std::span<const double> point, double guard, Workspace& ws) const;
  double entry_value(const Entry& e, std::span<const double> point, double guard, Workspace& ws) const;

  std::shared_ptr<const Compiled> compiled_;
  mutable std::shared_ptr<const std::vector<std::vector<Entry>>> grad_derivs_;  // lazily built, per variable j
  mutable std::shared_ptr<const std::vector<CompiledPolynomial>> grad_deriv_dens_;
  // dP_i/dz_j entries, index j * d + i, with their own denominators.
  mutable std::shared_ptr<const std::vector<std::vector<Entry>>> matrix_derivs_;
  mutable std::shared_ptr<const std::vector<CompiledPolynomial>> matrix_deriv_dens_;
  // Last evaluation of the local evaluator (same point, same guard).
  struct LocalCache {
    std::vector<double> point;
    double guard = 0;
    bool derivatives = false;
    LocalPfaffian::Values values;
  };
  mutable std::shared_ptr<LocalCache> local_cache_;
};

/// Numeric-only system backed by a LocalPfaffian; `basis` holds the basis
/// monomials as operators for reporting.
PfaffianSystem local_pfaffian_system(std::shared_ptr<const LocalPfaffian> local,
                                     std::vector<DiffOperator> basis);

/// Pfaffian system for the standard monomials of `B`, or for an explicit
/// basis whose normal forms span R/I (DimensionMismatch otherwise).
PfaffianSystem build_pfaffian(const GroebnerBasis& B);
PfaffianSystem build_pfaffian(const GroebnerBasis& B, const std::vector<DiffOperator>& basis);

/// Rows: coordinates of d_i (monic standard monomials).
RatMatrix gradient_coeffs(const GroebnerBasis& B);

/// H_ij = dP_i/dz_j + P_i P_j for all i, j (index i * d + j).
std::vector<RatMatrix> hessian_matrices(const PfaffianSystem& P);

/// Adds c_i I to every P_i.
PfaffianSystem gauge_tilt(const PfaffianSystem& P, std::span<const double> linear_coeffs);

/// Entrywise numeric evaluation (gauge shift included).
Eigen::MatrixXd eval_matrix(const PfaffianSystem& P, std::size_t var, std::span<const double> point,
                            double guard = RationalFunction::kDefaultGuard);

/// Exact check of dP_i/dz_j + P_i P_j = dP_j/dz_i + P_j P_i for all pairs.
bool is_integrable(const PfaffianSystem& P);
/// Largest entry of dP_i/dz_j + P_i P_j - dP_j/dz_i - P_j P_i at a point,
/// relative to max(1, largest entry of the terms); exact derivatives.
double integrability_defect(const PfaffianSystem& P, std::span<const double> point);

RatMatrix mat_mul(const RatMatrix& a, const RatMatrix& b);
RatMatrix mat_diff(const RatMatrix& a, std::size_t var);

/// JSON text of the system (rational functions in canonical form).
std::string to_json(const PfaffianSystem& P);
PfaffianSystem pfaffian_from_json(const std::string& text);

}  // namespace hgd

#endif  // HGD_PFAFFIAN_HPP
