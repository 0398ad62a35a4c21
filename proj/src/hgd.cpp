#include "hgd/hgd.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace hgd {

const char* to_string(DescentMode m) {
  switch (m) {
    case DescentMode::gradient: return "gradient";
    case DescentMode::coordinate: return "coordinate";
    case DescentMode::newton: return "newton";
  }
  return "?";
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::GradTol: return "GradTol";
    case Termination::Boundary: return "Boundary";
    case Termination::MaxIter: return "MaxIter";
    case Termination::SingularBlocked: return "SingularBlocked";
  }
  return "?";
}

std::optional<DescentMode> parse_mode(const std::string& s) {
  if (s == "gradient") return DescentMode::gradient;
  if (s == "coordinate") return DescentMode::coordinate;
  if (s == "newton") return DescentMode::newton;
  return std::nullopt;
}

namespace {

Eigen::VectorXd as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// dG/dz_j = P_j G + q_j for every j, as the columns of a p x d matrix.
Eigen::MatrixXd state_derivatives(const PfaffianSystem& P, const StateVector& s, double guard) {
  const std::size_t d = P.dim();
  Eigen::VectorXd G = as_vector(s.values);
  Eigen::MatrixXd out(P.rank(), d);
  std::vector<double> w(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    out.col(j) = P.eval_matrix(j, s.point, guard) * G;
    if (P.inhomo) {
      w[j] = 1;
      out.col(j) += P.eval_inhomo(w, s.point);
      w[j] = 0;
    }
  }
  return out;
}

double norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

class Driver {
 public:
  Driver(const PfaffianSystem& P, const StateVector& start, const DescentConfig& cfg)
      : P_(P), cfg_(cfg), d_(P.dim()), state_(start) {
    if (start.point.size() != d_) throw DimensionMismatch("start point has the wrong dimension");
    if (start.values.size() != P.rank()) throw DimensionMismatch("start state has the wrong rank");
    if (cfg.domain.size() != d_) throw DimensionMismatch("domain must have one interval per variable");
    if (!(cfg.step > 0) || !(cfg.grad_tol > 0)) throw DimensionMismatch("step and grad_tol must be positive");
    for (std::size_t i = 0; i < d_; ++i) {
      const Interval& iv = cfg.domain[i];
      if (!(iv.lo <= iv.hi)) throw DimensionMismatch("empty interval for variable " + std::to_string(i));
      if (!iv.contains(start.point[i])) {
        throw DimensionMismatch("start point outside the domain in coordinate " + std::to_string(i));
      }
    }
    value_ = state_.values[0];
    grad_ = gradient_at(P_, state_, cfg_.transport.guard);
    record();
  }

  FitResult run() {
    switch (cfg_.mode) {
      case DescentMode::coordinate: coordinate(); break;
      case DescentMode::gradient: line_search_descent(false); break;
      case DescentMode::newton: line_search_descent(true); break;
    }
    return finish();
  }

 private:
  double clip(std::size_t i, double v) const { return std::clamp(v, cfg_.domain[i].lo, cfg_.domain[i].hi); }

  std::vector<double> projected() const {
    return projected_gradient(grad_, state_.point, cfg_.domain, cfg_.border_tol);
  }

  void record() {
    if (!cfg_.record_trajectory) return;
    trajectory_.push_back({state_.point, value_, norm(projected())});
  }

  // Transports to `target`; true and the new state when it decreases the
  // objective. Singular crossings count as rejections.
  bool try_move(const std::vector<double>& target, StateVector& out, double* bound = nullptr) {
    try {
      out = transport(P_, state_, target, cfg_.transport);
    } catch (const SingularCrossing& e) {
      blocked_by_ = e.denominator();
      return false;
    }
    double v = out.values[0];
    if (!std::isfinite(v)) return false;
    return bound ? v <= *bound : v < value_;
  }

  void accept(StateVector next) {
    state_ = std::move(next);
    ++iterations_;
    ++since_restart_;
    if (cfg_.restart && cfg_.restart_every > 0 && since_restart_ >= cfg_.restart_every) {
      state_ = cfg_.restart(state_.point);
      since_restart_ = 0;
    }
    value_ = state_.values[0];
    grad_ = gradient_at(P_, state_, cfg_.transport.guard);
    blocked_by_.clear();
    record();
  }

  bool budget_left() const { return iterations_ < cfg_.max_iter; }

  // Cyclic sweeps over the free axes; along each axis march at the current
  // step while the objective decreases. A sweep without moves halves the step.
  void coordinate() {
    double h = cfg_.step;
    while (budget_left()) {
      if (norm(projected()) <= cfg_.grad_tol) {
        termination_ = Termination::GradTol;
        return;
      }
      bool moved = false;
      bool all_blocked = true;
      for (std::size_t i = 0; i < d_ && budget_left(); ++i) {
        if (cfg_.domain[i].frozen() || grad_[i] == 0) continue;
        const double dir = grad_[i] > 0 ? -1.0 : 1.0;
        bool first = true;
        while (budget_left()) {
          std::vector<double> target = state_.point;
          target[i] = clip(i, state_.point[i] + dir * h);
          if (target[i] == state_.point[i]) {
            if (first) all_blocked = false;
            break;
          }
          StateVector next;
          if (!try_move(target, next)) {
            if (first && blocked_by_.empty()) all_blocked = false;
            break;
          }
          if (first) all_blocked = false;
          first = false;
          moved = true;
          accept(std::move(next));
        }
      }
      if (!moved) {
        if (all_blocked && !blocked_by_.empty()) {
          termination_ = Termination::SingularBlocked;
          return;
        }
        h /= 2;
        if (h < cfg_.min_step) {
          termination_ = Termination::GradTol;
          return;
        }
      }
    }
    termination_ = Termination::MaxIter;
  }

  // Armijo backtracking along -grad (or the Newton direction) projected into the box.
  void line_search_descent(bool newton) {
    double t_scale = 1.0;
    while (budget_left()) {
      std::vector<double> pg = projected();
      double gn = norm(pg);
      if (gn <= cfg_.grad_tol) {
        termination_ = Termination::GradTol;
        return;
      }
      Eigen::VectorXd dir = -as_vector(pg);
      double length = cfg_.step;
      if (newton) {
        Eigen::VectorXd nd = newton_direction(pg);
        if (nd.size() > 0 && nd.dot(as_vector(pg)) < 0) {
          dir = nd;
          length = std::min(nd.norm(), 20 * cfg_.step);
        }
      }
      dir /= dir.norm();
      double t = newton ? length : length * t_scale;
      bool accepted = false;
      while (t >= cfg_.min_step) {
        std::vector<double> target(d_);
        for (std::size_t i = 0; i < d_; ++i) target[i] = clip(i, state_.point[i] + t * dir(static_cast<Eigen::Index>(i)));
        double decrease = 0;
        for (std::size_t i = 0; i < d_; ++i) decrease += grad_[i] * (target[i] - state_.point[i]);
        if (decrease < 0) {
          double bound = value_ + cfg_.armijo * decrease;
          StateVector next;
          bool ok = try_move(target, next, &bound);
          if (ok || (cfg_.line_search == LineSearch::fixed && blocked_by_.empty() && std::isfinite(next.values[0]))) {
            accept(std::move(next));
            accepted = true;
            break;
          }
        }
        if (cfg_.line_search == LineSearch::fixed) break;
        t *= cfg_.beta;
      }
      if (!accepted) {
        if (!blocked_by_.empty()) {
          termination_ = Termination::SingularBlocked;
          return;
        }
        if (iterations_ == 0) throw NonDescent();
        // No decrease left at the smallest admissible step: stationary up to
        // the transport error.
        termination_ = Termination::GradTol;
        return;
      }
      if (!newton) t_scale = std::min(2 * t / length, 1e6);
    }
    termination_ = Termination::MaxIter;
  }

  Eigen::VectorXd newton_direction(const std::vector<double>& pg) {
    auto H = hessian_at(P_, state_, cfg_.transport.guard);
    std::vector<std::size_t> free;
    for (std::size_t i = 0; i < d_; ++i) {
      if (!cfg_.domain[i].frozen() && (pg[i] != 0 || grad_[i] == 0)) free.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd Hf(m, m);
    Eigen::VectorXd gf(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      gf(a) = pg[free[a]];
      for (Eigen::Index b = 0; b < m; ++b) Hf(a, b) = H[free[a]][free[b]];
    }
    Eigen::LLT<Eigen::MatrixXd> llt(Hf);
    if (llt.info() != Eigen::Success) return {};
    Eigen::VectorXd step = llt.solve(-gf);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d_));
    for (Eigen::Index a = 0; a < m; ++a) out(static_cast<Eigen::Index>(free[a])) = step(a);
    return out;
  }

  FitResult finish() {
    FitResult r;
    r.argmin = state_.point;
    r.value = value_;
    r.state = state_;
    r.iterations = iterations_;
    r.trajectory = std::move(trajectory_);
    r.blocked_by = blocked_by_;
    r.grad_norm = norm(projected());
    r.boundary_flags.assign(d_, false);
    bool any = false;
    for (std::size_t i = 0; i < d_; ++i) {
      const Interval& iv = cfg_.domain[i];
      if (iv.frozen()) continue;
      double x = state_.point[i];
      r.boundary_flags[i] = x - iv.lo <= cfg_.border_tol || iv.hi - x <= cfg_.border_tol;
      any = any || r.boundary_flags[i];
    }
    r.termination = termination_;
    if (termination_ == Termination::GradTol && any) r.termination = Termination::Boundary;
    if (termination_ != Termination::SingularBlocked) r.blocked_by.clear();
    return r;
  }

  const PfaffianSystem& P_;
  const DescentConfig& cfg_;
  std::size_t d_;
  StateVector state_;
  double value_ = 0;
  std::vector<double> grad_;
  std::size_t iterations_ = 0;
  std::size_t since_restart_ = 0;
  Termination termination_ = Termination::MaxIter;
  std::vector<TrajectoryPoint> trajectory_;
  std::string blocked_by_;
};

}  // namespace

std::vector<double> gradient_at(const PfaffianSystem& P, const StateVector& s, double guard) {
  Eigen::VectorXd g = P.eval_grad(s.point, guard) * as_vector(s.values);
  return {g.data(), g.data() + g.size()};
}

std::vector<std::vector<double>> hessian_at(const PfaffianSystem& P, const StateVector& s, double guard,
                                            bool symmetrize) {
  const std::size_t d = P.dim();
  Eigen::MatrixXd A = P.eval_grad(s.point, guard);
  auto dA = P.eval_grad_derivatives(s.point, guard);
  Eigen::MatrixXd dG = state_derivatives(P, s, guard);
  Eigen::VectorXd G = as_vector(s.values);
  Eigen::MatrixXd H(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    H.col(static_cast<Eigen::Index>(j)) = dA[j] * G + A * dG.col(static_cast<Eigen::Index>(j));
  }
  if (symmetrize) H = ((H + H.transpose()) / 2).eval();
  std::vector<std::vector<double>> out(d, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i][j] = H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return out;
}

std::vector<double> projected_gradient(std::span<const double> grad, std::span<const double> point,
                                       const std::vector<Interval>& domain, double tol) {
  std::vector<double> out(grad.begin(), grad.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Interval& iv = domain.at(i);
    if (iv.frozen() || (point[i] - iv.lo <= tol && out[i] > 0) || (iv.hi - point[i] <= tol && out[i] < 0)) {
      out[i] = 0;
    }
  }
  return out;
}

FitResult minimize(const PfaffianSystem& P, const StateVector& start, const DescentConfig& cfg) {
  return Driver(P, start, cfg).run();
}

void write_trajectory_csv(const FitResult& r, const VarTable& vars, std::ostream& out) {
  out << "iter";
  for (const auto& name : vars.names()) out << ',' << name;
  out << ",value,grad_norm\n";
  out.precision(17);
  for (std::size_t k = 0; k < r.trajectory.size(); ++k) {
    const auto& t = r.trajectory[k];
    out << k;
    for (double v : t.point) out << ',' << v;
    out << ',' << t.value << ',' << t.grad_norm << '\n';
  }
}

}  // namespace hgd
