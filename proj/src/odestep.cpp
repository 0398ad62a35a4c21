#include "hgd/odestep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hgd {

namespace {

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

StateVector transport(const PfaffianSystem& P, const StateVector& s, std::span<const double> target,
                      const TransportConfig& cfg) {
  const std::size_t d = P.dim();
  if (s.point.size() != d || target.size() != d) throw DimensionMismatch("transport: point has the wrong dimension");
  if (s.values.size() != P.rank()) throw DimensionMismatch("transport: state has the wrong rank");
  if (!(cfg.grid > 0) || !(cfg.guard > 0)) throw DimensionMismatch("transport: grid and guard must be positive");

  std::vector<double> delta(d);
  double length = 0;
  for (std::size_t i = 0; i < d; ++i) {
    delta[i] = target[i] - s.point[i];
    length += delta[i] * delta[i];
  }
  length = std::sqrt(length);
  StateVector out{std::vector<double>(target.begin(), target.end()), s.values};
  if (length == 0) return out;

  double nsteps_real = std::ceil(length / cfg.grid * (1 - 1e-12));  // as in convergence_order
  if (nsteps_real > static_cast<double>(cfg.max_steps)) throw StepBudgetExceeded(cfg.max_steps);
  const std::size_t nsteps = std::max<std::size_t>(1, static_cast<std::size_t>(nsteps_real));
  const double h = 1.0 / static_cast<double>(nsteps);

  std::vector<double> z(d);
  auto at = [&](double t) -> std::span<const double> {
    for (std::size_t i = 0; i < d; ++i) z[i] = s.point[i] + t * delta[i];
    if (t == 1.0) std::copy(target.begin(), target.end(), z.begin());
    return z;
  };
  // dG/dt = M(t) G + q(t) with M = sum_i delta_i P_i(c(t)).
  auto rhs = [&](double t, const Eigen::VectorXd& G) -> Eigen::VectorXd {
    try {
      auto pt = at(t);
      Eigen::VectorXd f = P.eval_combination(delta, pt, cfg.guard) * G;
      if (P.inhomo) f += P.eval_inhomo(delta, pt);
      return f;
    } catch (const DenominatorNearZero& e) {
      throw SingularCrossing(e, t);
    }
  };

  Eigen::VectorXd G = to_eigen(s.values);
  for (std::size_t k = 0; k < nsteps; ++k) {
    double t = static_cast<double>(k) * h;
    double t1 = k + 1 == nsteps ? 1.0 : static_cast<double>(k + 1) * h;
    Eigen::VectorXd k1 = rhs(t, G);
    Eigen::VectorXd k2 = rhs(t + h / 2, G + (h / 2) * k1);
    Eigen::VectorXd k3 = rhs(t + h / 2, G + (h / 2) * k2);
    Eigen::VectorXd k4 = rhs(t1, G + h * k3);
    G += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  out.values.assign(G.data(), G.data() + G.size());
  return out;
}

OrderEstimate convergence_order(const PfaffianSystem& P, const StateVector& s, std::span<const double> target,
                                const std::vector<double>& grids, double guard) {
  if (grids.size() < 3) throw DimensionMismatch("convergence_order needs at least three grids");
  std::vector<Eigen::VectorXd> results;
  std::vector<double> steps;  // effective number of RK4 steps per grid
  double length = 0;
  for (std::size_t i = 0; i < target.size() && i < s.point.size(); ++i) {
    length += (target[i] - s.point[i]) * (target[i] - s.point[i]);
  }
  length = std::sqrt(length);
  double scale = 0;
  for (double h : grids) {
    steps.push_back(std::max(1.0, std::ceil(length / h * (1 - 1e-12))));
    TransportConfig cfg{h, guard};
    StateVector r = transport(P, s, target, cfg);
    results.push_back(to_eigen(r.values));
    scale = std::max(scale, results.back().cwiseAbs().maxCoeff());
  }
  OrderEstimate est;
  for (std::size_t k = 0; k + 1 < results.size(); ++k) {
    est.differences.push_back((results[k] - results[k + 1]).cwiseAbs().maxCoeff());
  }
  const double floor = 64 * std::numeric_limits<double>::epsilon() * std::max(1.0, scale);
  est.exact = std::all_of(est.differences.begin(), est.differences.end(), [&](double v) { return v <= floor; });
  if (!est.exact) {
    std::size_t k = est.differences.size() - 2;
    double ratio = steps[k + 1] / steps[k];
    est.order = std::log(est.differences[k] / est.differences[k + 1]) / std::log(ratio);
  }
  return est;
}

}  // namespace hgd
