#ifndef HGD_ODESTEP_HPP
#define HGD_ODESTEP_HPP

// Transport of G along straight segments with classical RK4.

#include <span>
#include <vector>

#include "hgd/pfaffian.hpp"

namespace hgd {

struct TransportConfig {
  double grid = 0.05;  // RK4 step length in domain units
  double guard = RationalFunction::kDefaultGuard;
  std::size_t max_steps = 1000000;

  static TransportConfig coarse() { return {0.05}; }
  static TransportConfig fine() { return {0.01}; }
};

/// G at `target`, integrating dG/dt = sum_i c_i'(t) (P_i G + q_i) along
/// c(t) = start + t (target - start). Throws SingularCrossing and
/// StepBudgetExceeded.
StateVector transport(const PfaffianSystem& P, const StateVector& s, std::span<const double> target,
                      const TransportConfig& cfg = {});

struct OrderEstimate {
  double order = 0;  // meaningless when exact
  bool exact = false;
  std::vector<double> differences;  // |G_h - G_{h/2}| for consecutive grids
};

/// Richardson estimate of the order from at least three grids; the last two
/// differences are compared using the effective RK4 step counts, so grids
/// whose step counts double give the cleanest estimate.
OrderEstimate convergence_order(const PfaffianSystem& P, const StateVector& s, std::span<const double> target,
                                const std::vector<double>& grids, double guard = RationalFunction::kDefaultGuard);

}  // namespace hgd

#endif  // HGD_ODESTEP_HPP
