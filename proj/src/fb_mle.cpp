#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "hgd/fisher_bingham.hpp"

namespace hgd {

namespace {

using nlohmann::json;

void check_mle_dim(unsigned n) {
  if (n < 1) throw DimensionMismatch("sphere dimension must be at least 1");
  if (n > 2) throw Unsupported("MLE is implemented for n = 1 and n = 2 only");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Monomial basis_monomial(const DiffOperator& op) {
  if (op.size() != 1 || !op.leading_coeff().is_one()) {
    throw Unsupported("initial values need a basis of plain derivation monomials");
  }
  return op.leading_monomial();
}

}  // namespace

SufficientStats suff_stats(const std::vector<std::vector<double>>& points) {
  if (points.empty()) throw EmptySample();
  const std::size_t m = points[0].size();
  if (m < 2) throw DimensionMismatch("sample points need at least two coordinates");
  SufficientStats s;
  s.n = static_cast<unsigned>(m - 1);
  s.s_x.assign(m * (m + 1) / 2, 0.0);
  s.s_y.assign(m, 0.0);
  s.N = points.size();
  std::vector<double> t(m);
  for (std::size_t row = 0; row < points.size(); ++row) {
    if (points[row].size() != m) throw DimensionMismatch("sample row " + std::to_string(row + 1) + " has the wrong length");
    double nrm = 0;
    for (double v : points[row]) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (!(std::abs(nrm - 1) <= 1e-6)) throw NonUnitPoint(row + 1, nrm);
    for (std::size_t i = 0; i < m; ++i) t[i] = points[row][i] / nrm;
    for (std::size_t i = 0; i < m; ++i) {
      s.s_y[i] += t[i];
      for (std::size_t j = i; j < m; ++j) s.s_x[fb_x_index(s.n, i, j)] += t[i] * t[j];
    }
  }
  const double N = static_cast<double>(s.N);
  for (double& v : s.s_x) v /= N;
  for (double& v : s.s_y) v /= N;
  return s;
}

// {"n": 2, "S_ij": {"11": .., "12": .., ...}, "S_i": [..], "N": 188};
// S_ij may also be an array in upper-triangle order.
SufficientStats parse_stats_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0, e.byte);
  }
  try {
    SufficientStats s;
    s.n = j.at("n").get<unsigned>();
    check_mle_dim(s.n);
    const std::size_t m = s.n + 1;
    s.s_x.assign(m * (m + 1) / 2, 0.0);
    const json& sx = j.at("S_ij");
    if (sx.is_array()) {
      if (sx.size() != s.s_x.size()) throw DimensionMismatch("S_ij has the wrong length");
      for (std::size_t k = 0; k < sx.size(); ++k) s.s_x[k] = sx[k].get<double>();
    } else {
      if (sx.size() != s.s_x.size()) throw DimensionMismatch("S_ij has the wrong number of entries");
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = i; k < m; ++k) {
          s.s_x[fb_x_index(s.n, i, k)] = sx.at(std::to_string(i + 1) + std::to_string(k + 1)).get<double>();
        }
      }
    }
    s.s_y = j.at("S_i").get<std::vector<double>>();
    if (s.s_y.size() != m) throw DimensionMismatch("S_i has the wrong length");
    s.N = j.value("N", std::size_t{0});
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("stats: ") + e.what(), 0, 0);
  }
}

SufficientStats read_stats_json(const std::string& path) { return parse_stats_json(read_file(path)); }

std::vector<std::vector<double>> read_sample_csv(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw ParseError("non-numeric sample row", lineno, 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

MLEObjective::MLEObjective(unsigned n, SufficientStats stats, QuadratureOptions quad)
    : n_(n), stats_(std::move(stats)), quad_(quad) {
  check_mle_dim(n);
  if (stats_.n != n) throw DimensionMismatch("statistics are for a different sphere dimension");
  const PfaffianSystem& base = fb_pfaffian(n);
  linear_.assign(base.dim(), 0.0);
  for (std::size_t k = 0; k < stats_.s_x.size(); ++k) linear_[k] = -stats_.s_x[k];
  for (std::size_t i = 0; i <= n; ++i) linear_[fb_y_index(n, i)] = -stats_.s_y[i];
  tilted_ = gauge_tilt(base, linear_);
}

StateVector MLEObjective::initial_state(std::span<const double> point) const {
  FBParams p = FBParams::from_point(n_, point);
  if (p.r != 1) throw DimensionMismatch("the MLE objective is evaluated at r = 1");
  std::vector<Monomial> derivs;
  for (const auto& op : tilted_.basis) derivs.push_back(basis_monomial(op));
  std::vector<double> vals = fb_derivatives(p, derivs, quad_);
  double L = 0;
  for (std::size_t k = 0; k < point.size(); ++k) L += linear_[k] * point[k];
  const double e = std::exp(L);
  for (double& v : vals) v *= e;
  return {std::vector<double>(point.begin(), point.end()), vals};
}

double MLEObjective::value(std::span<const double> point) const {
  FBParams p = FBParams::from_point(n_, point);
  double F = fb_quadrature(p, {TMonomial(n_ + 1, 0)}, quad_)[0];
  double L = 0;
  for (std::size_t k = 0; k < point.size(); ++k) L += linear_[k] * point[k];
  return F * std::exp(L);
}

std::vector<Interval> MLEObjective::domain(const std::vector<Interval>& x_box, const std::vector<Interval>& y_box) const {
  if (x_box.size() != fb_num_x(n_) || y_box.size() != n_ + 1) throw DimensionMismatch("search box has the wrong size");
  std::vector<Interval> out = x_box;
  out.insert(out.end(), y_box.begin(), y_box.end());
  out.push_back({1.0, 1.0});
  return out;
}

std::array<double, 3> uniform_moments(unsigned n) {
  const double m = n + 1;
  return {1 / m, 3 / (m * (m + 2)), 1 / (m * (m + 2))};
}

std::vector<double> start_point(unsigned n, const SufficientStats& stats, const std::vector<Interval>* box) {
  check_mle_dim(n);
  const std::size_t m = n + 1;
  const auto [a, b, c] = uniform_moments(n);
  static std::once_flag checked;
  std::call_once(checked, [] {
    for (unsigned k = 1; k <= 2; ++k) {
      auto mom = uniform_moments(k);
      std::vector<TMonomial> ms = {TMonomial(k + 1, 0), TMonomial(k + 1, 0), TMonomial(k + 1, 0), TMonomial(k + 1, 0)};
      ms[1][0] = 2;
      ms[2][0] = 4;
      ms[3][0] = 2;
      ms[3][1] = 2;
      auto v = fb_quadrature(FBParams::zero(k), ms);
      for (int i = 0; i < 3; ++i) {
        if (std::abs(v[i + 1] / v[0] - mom[i]) > 1e-8) throw Error("uniform sphere moments disagree with quadrature");
      }
    }
  });
  // Log-objective at 0: log F(0) + (E[T] - S).theta + theta' Cov(T) theta / 2,
  // T = (t_i t_j for i <= j, t_i); the minimizer uses the pseudo-inverse
  // because sum t_i^2 = 1 makes Cov(T) singular along the trace.
  const std::size_t nx = fb_num_x(n);
  const std::size_t dim = nx + m;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) pairs.emplace_back(i, j);
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd rhs(dim);
  for (std::size_t p = 0; p < nx; ++p) {
    auto [i, j] = pairs[p];
    std::size_t k = fb_x_index(n, i, j);
    rhs(k) = stats.s_x.at(k) - (i == j ? a : 0.0);
    for (std::size_t q = 0; q < nx; ++q) {
      auto [u, v] = pairs[q];
      std::size_t l = fb_x_index(n, u, v);
      double val = 0;
      if (i == j && u == v) {
        val = (i == u ? b : c) - a * a;
      } else if (i != j && u != v && i == u && j == v) {
        val = c;
      }
      cov(k, l) = val;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    rhs(nx + i) = stats.s_y.at(i);
    cov(nx + i, nx + i) = a;
  }
  Eigen::VectorXd theta = cov.completeOrthogonalDecomposition().solve(rhs);
  std::vector<double> out(theta.data(), theta.data() + theta.size());
  out.push_back(1.0);
  if (box) {
    if (box->size() != out.size()) throw DimensionMismatch("search box has the wrong size");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::clamp(out[k], (*box)[k].lo, (*box)[k].hi);
  }
  return out;
}

SpectralReport spectral_report(const FBParams& params) {
  const auto A = params.matrix();
  const auto m = static_cast<Eigen::Index>(A.size());
  Eigen::MatrixXd M(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) M(i, j) = A[i][j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  SpectralReport r;
  for (Eigen::Index k = m - 1; k >= 0; --k) {
    r.lambda.push_back(es.eigenvalues()(k));
    Eigen::VectorXd v = es.eigenvectors().col(k);
    r.axes.emplace_back(v.data(), v.data() + v.size());
  }
  double s = 0;
  for (double v : params.y) s += v * v;
  r.y_norm = std::sqrt(s);
  return r;
}

FBParams trace_free(const FBParams& params) {
  FBParams out = params;
  const std::size_t m = params.n + 1;
  double tr = 0;
  for (std::size_t i = 0; i < m; ++i) tr += params.x[fb_x_index(params.n, i, i)];
  for (std::size_t i = 0; i < m; ++i) out.x[fb_x_index(params.n, i, i)] -= tr / m;
  return out;
}

DomainPreset domain_preset(const std::string& name) {
  const unsigned n = 2;
  DomainPreset p{n, std::vector<Interval>(fb_num_x(n)), std::vector<Interval>(n + 1), {}};
  if (name == "astro") {
    std::fill(p.x.begin(), p.x.end(), Interval{-30, 10});
    p.x[fb_x_index(n, 1, 2)] = {-30, 20};
    p.x[fb_x_index(n, 2, 2)] = {-30, -0.01};
    p.y = {{-30, -0.01}, {-30, -0.001}, {-30, 10}};
  } else if (name == "magnetism") {
    std::fill(p.x.begin(), p.x.end(), Interval{-30, 30});
    p.x[fb_x_index(n, 2, 2)] = {-30, -0.01};
    p.y = {{-30, 30}, {-32, -0.001}, {-30, 32}};
    // Reference starting point for these data.
    p.start = {5.985, 8.478, 2.902, 6.869, 16.732, -12.853, 9.762, -28.770, 24.142, 1.0};
  } else {
    throw ParseError("unknown domain preset '" + name + "'", 0, 0);
  }
  return p;
}

}  // namespace hgd
