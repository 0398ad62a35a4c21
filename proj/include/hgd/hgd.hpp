#ifndef HGD_HGD_HPP
#define HGD_HGD_HPP

// Holonomic gradient descent: the objective g is the first entry of G,
// gradients come from the Pfaffian system and G is transported between
// iterates instead of being recomputed.

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hgd/odestep.hpp"

namespace hgd {

struct Interval {
  double lo;
  double hi;
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool frozen() const { return lo == hi; }
};

enum class DescentMode { gradient, coordinate, newton };
enum class LineSearch { fixed, backtracking };
enum class Termination { GradTol, Boundary, MaxIter, SingularBlocked };

const char* to_string(DescentMode m);
const char* to_string(Termination t);
std::optional<DescentMode> parse_mode(const std::string& s);

struct DescentConfig {
  DescentMode mode = DescentMode::coordinate;
  double step = 0.05;
  std::vector<Interval> domain;
  double grad_tol = 1e-6;
  std::size_t max_iter = 10000;
  TransportConfig transport;
  LineSearch line_search = LineSearch::backtracking;
  double beta = 0.5;   // backtracking contraction
  double armijo = 1e-4;
  /// Coordinate mode stops refining once the step is below this.
  double min_step = 1e-6;
  /// Distance to a bound under which a coordinate counts as on the border.
  double border_tol = 1e-6;
  bool record_trajectory = true;
  /// Recomputes G from scratch (e.g. by quadrature).
  std::function<StateVector(std::span<const double>)> restart;
  /// Restart every this many accepted moves (0: never).
  std::size_t restart_every = 0;
};

struct TrajectoryPoint {
  std::vector<double> point;
  double value;
  double grad_norm;
};

struct FitResult {
  std::vector<double> argmin;
  double value = 0;
  StateVector state;
  std::size_t iterations = 0;
  Termination termination = Termination::MaxIter;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<bool> boundary_flags;
  std::string blocked_by;  // denominator when SingularBlocked
  double grad_norm = 0;     // projected gradient at the end
};

FitResult minimize(const PfaffianSystem& P, const StateVector& start, const DescentConfig& cfg);

/// A(z) G, gauge shift included.
std::vector<double> gradient_at(const PfaffianSystem& P, const StateVector& s,
                                double guard = RationalFunction::kDefaultGuard);
/// Symmetrized Hessian d(A_i G)/dz_j = (dA_i/dz_j) G + A_i P_j G.
std::vector<std::vector<double>> hessian_at(const PfaffianSystem& P, const StateVector& s,
                                            double guard = RationalFunction::kDefaultGuard,
                                            bool symmetrize = true);

/// Gradient with components that push out of the box zeroed.
std::vector<double> projected_gradient(std::span<const double> grad, std::span<const double> point,
                                       const std::vector<Interval>& domain, double tol);

/// CSV: iter, one column per variable, value, grad_norm.
void write_trajectory_csv(const FitResult& r, const VarTable& vars, std::ostream& out);

}  // namespace hgd

#endif  // HGD_HGD_HPP
