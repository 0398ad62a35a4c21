#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "hgd/fisher_bingham.hpp"

namespace hgd {

namespace {

struct Rule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

// Gauss–Legendre nodes by Newton iteration on P_n.
const Rule& gauss_legendre(unsigned order) {
  static std::mutex mu;
  static std::map<unsigned, Rule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  Rule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (unsigned k = 0; k < order; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (order + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = x;
      for (unsigned j = 2; j <= order; ++j) {
        double p2 = ((2.0 * j - 1) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1;
      dp = order * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[k] = x;
    rule.weights[k] = 2 / ((1 - x * x) * dp * dp);
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

// Nodes and weights of the composite rule on [a, b].
void composite(double a, double b, unsigned panels, const Rule& rule, std::vector<double>& x,
               std::vector<double>& w) {
  x.clear();
  w.clear();
  const double width = (b - a) / panels;
  for (unsigned p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      x.push_back(mid + 0.5 * width * rule.nodes[k]);
      w.push_back(0.5 * width * rule.weights[k]);
    }
  }
}

class Integrand {
 public:
  Integrand(const FBParams& params, const std::vector<TMonomial>& monomials)
      : m_(params.n + 1), A_(params.matrix()), y_(params.y), monomials_(monomials) {
    for (const auto& a : monomials) {
      if (a.size() != m_) throw DimensionMismatch("t-monomial has the wrong length");
      for (unsigned e : a) max_exp_ = std::max(max_exp_, e);
    }
  }

  // Adds weight * t^alpha exp(t'At + y t) for each monomial.
  void accumulate(const double* t, double weight, std::vector<double>& acc) {
    double q = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      q += y_[i] * t[i];
      for (std::size_t j = 0; j < m_; ++j) q += A_[i][j] * t[i] * t[j];
    }
    const double e = weight * std::exp(q);
    pow_.assign(m_ * (max_exp_ + 1), 1.0);
    for (std::size_t i = 0; i < m_; ++i) {
      for (unsigned k = 1; k <= max_exp_; ++k) pow_[i * (max_exp_ + 1) + k] = pow_[i * (max_exp_ + 1) + k - 1] * t[i];
    }
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
      double v = e;
      for (std::size_t i = 0; i < m_; ++i) {
        if (monomials_[k][i]) v *= pow_[i * (max_exp_ + 1) + monomials_[k][i]];
      }
      acc[k] += v;
    }
  }

 private:
  std::size_t m_;
  std::vector<std::vector<double>> A_;
  std::vector<double> y_;
  const std::vector<TMonomial>& monomials_;
  unsigned max_exp_ = 0;
  std::vector<double> pow_;
};

std::vector<double> integrate(const FBParams& params, const std::vector<TMonomial>& monomials, unsigned panels,
                              const QuadratureOptions& opts) {
  const Rule& rule = gauss_legendre(opts.order);
  Integrand f(params, monomials);
  std::vector<double> acc(monomials.size(), 0.0);
  const double r = params.r;
  const double two_pi = 2 * std::numbers::pi;
  std::vector<double> th, wth, ph, wph;
  if (params.n == 1) {
    composite(0, two_pi, 2 * panels, rule, th, wth);
    for (std::size_t a = 0; a < th.size(); ++a) {
      double t[2] = {r * std::cos(th[a]), r * std::sin(th[a])};
      f.accumulate(t, r * wth[a], acc);
    }
  } else {
    composite(0, std::numbers::pi, panels, rule, th, wth);
    composite(0, two_pi, 2 * panels, rule, ph, wph);
    std::vector<double> cph(ph.size()), sph(ph.size());
    for (std::size_t b = 0; b < ph.size(); ++b) {
      cph[b] = std::cos(ph[b]);
      sph[b] = std::sin(ph[b]);
    }
    for (std::size_t a = 0; a < th.size(); ++a) {
      const double s = std::sin(th[a]), c = std::cos(th[a]);
      for (std::size_t b = 0; b < ph.size(); ++b) {
        double t[3] = {r * s * cph[b], r * s * sph[b], r * c};
        f.accumulate(t, r * r * s * wth[a] * wph[b], acc);
      }
    }
  }
  return acc;
}

void check_params(const FBParams& p) {
  if (p.n < 1) throw DimensionMismatch("sphere dimension must be at least 1");
  if (p.n > 2) throw Unsupported("quadrature is implemented for n = 1 and n = 2 only");
  const std::size_t m = p.n + 1;
  if (p.x.size() != m * (m + 1) / 2 || p.y.size() != m) throw DimensionMismatch("FB parameters have the wrong size");
  if (!(p.r > 0)) throw DimensionMismatch("radius must be positive");
}

}  // namespace

FBParams FBParams::zero(unsigned n) {
  FBParams p;
  p.n = n;
  p.x.assign((n + 1) * (n + 2) / 2, 0.0);
  p.y.assign(n + 1, 0.0);
  return p;
}

FBParams FBParams::from_point(unsigned n, std::span<const double> point) {
  FBParams p = zero(n);
  if (point.size() != fb_vars(n)->size()) throw DimensionMismatch("point does not match fb_vars");
  std::copy_n(point.begin(), p.x.size(), p.x.begin());
  std::copy_n(point.begin() + static_cast<std::ptrdiff_t>(p.x.size()), n + 1, p.y.begin());
  p.r = point.back();
  return p;
}

std::vector<double> FBParams::point() const {
  std::vector<double> out = x;
  out.insert(out.end(), y.begin(), y.end());
  out.push_back(r);
  return out;
}

std::vector<std::vector<double>> FBParams::matrix() const {
  const std::size_t m = n + 1;
  std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      double v = x.at(fb_x_index(n, i, j));
      if (i == j) {
        a[i][i] = v;
      } else {
        a[i][j] = a[j][i] = v / 2;
      }
    }
  }
  return a;
}

std::vector<double> fb_quadrature(const FBParams& params, const std::vector<TMonomial>& monomials,
                                  const QuadratureOptions& opts) {
  check_params(params);
  if (!(opts.tol > 0) || opts.order < 1) throw DimensionMismatch("quadrature tolerance and order must be positive");
  unsigned panels = std::max(1u, opts.min_panels);
  std::vector<double> prev = integrate(params, monomials, panels, opts);
  while (true) {
    if (panels * 2 > opts.max_panels) {
      throw ToleranceNotReached("quadrature did not reach relative tolerance " + std::to_string(opts.tol) + " with " +
                                std::to_string(opts.max_panels) + " panels");
    }
    panels *= 2;
    std::vector<double> next = integrate(params, monomials, panels, opts);
    double scale = 0, diff = 0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      scale = std::max(scale, std::abs(next[k]));
      diff = std::max(diff, std::abs(next[k] - prev[k]));
    }
    if (diff <= opts.tol * scale || scale == 0) return next;
    prev = std::move(next);
  }
}

std::vector<double> fb_derivatives(const FBParams& params, const std::vector<Monomial>& derivations,
                                   const QuadratureOptions& opts) {
  check_params(params);
  const unsigned n = params.n;
  const std::size_t m = n + 1;
  const std::size_t ridx = fb_r_index(n);
  // d^gamma with gamma free of d_r is the moment of the product of the
  // t-factors; one d_r is removed with the scaling operator
  //   r d_r d^gamma F = (2 sum x_ij d_ij + sum y_i d_yi + n + 2|gamma_x| + |gamma_y|) d^gamma F.
  std::vector<TMonomial> moments;
  std::map<TMonomial, std::size_t> index;
  auto moment = [&](const TMonomial& a) {
    auto [it, inserted] = index.try_emplace(a, moments.size());
    if (inserted) moments.push_back(a);
    return it->second;
  };
  auto base_moment = [&](const Monomial& beta) {
    TMonomial a(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        unsigned e = beta[fb_x_index(n, i, j)];
        a[i] += e;
        a[j] += e;
      }
      a[i] += beta[fb_y_index(n, i)];
    }
    return a;
  };
  struct Plan {
    std::size_t self;
    bool has_r;
    double constant;
    std::vector<std::pair<double, std::size_t>> terms;
  };
  std::vector<Plan> plans;
  for (const auto& beta : derivations) {
    if (beta[ridx] > 1) throw Unsupported("derivations with more than one d_r are not supported");
    TMonomial a = base_moment(beta);
    Plan plan{moment(a), beta[ridx] == 1, 0.0, {}};
    if (plan.has_r) {
      unsigned gx = 0, gy = 0;
      for (std::size_t v = 0; v < fb_num_x(n); ++v) gx += beta[v];
      for (std::size_t i = 0; i < m; ++i) gy += beta[fb_y_index(n, i)];
      plan.constant = n + 2.0 * gx + gy;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
          double xv = params.x[fb_x_index(n, i, j)];
          if (xv == 0) continue;
          TMonomial b = a;
          ++b[i];
          ++b[j];
          plan.terms.push_back({2 * xv, moment(b)});
        }
        if (params.y[i] == 0) continue;
        TMonomial b = a;
        ++b[i];
        plan.terms.push_back({params.y[i], moment(b)});
      }
    }
    plans.push_back(std::move(plan));
  }
  std::vector<double> vals = fb_quadrature(params, moments, opts);
  std::vector<double> out;
  out.reserve(plans.size());
  for (const auto& plan : plans) {
    if (!plan.has_r) {
      out.push_back(vals[plan.self]);
      continue;
    }
    double v = plan.constant * vals[plan.self];
    for (const auto& [c, k] : plan.terms) v += c * vals[k];
    out.push_back(v / params.r);
  }
  return out;
}

}  // namespace hgd
