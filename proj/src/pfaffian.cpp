#include "hgd/pfaffian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include <json.hpp>

#include "hgd/parse.hpp"

namespace hgd {

namespace {

constexpr std::size_t kNoDen = std::numeric_limits<std::size_t>::max();

RatMatrix zero_matrix(const VarTablePtr& vars, std::size_t rows, std::size_t cols) {
  return RatMatrix(rows, std::vector<RationalFunction>(cols, RationalFunction(vars)));
}

RationalFunction one(const VarTablePtr& vars) { return RationalFunction::constant(vars, 1); }

// Row vector times matrix.
std::vector<RationalFunction> row_times(const std::vector<RationalFunction>& u, const RatMatrix& m) {
  std::vector<RationalFunction> out(m.empty() ? 0 : m[0].size(), RationalFunction(u.front().vars()));
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k].is_zero()) continue;
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (!m[k][j].is_zero()) out[j] += u[k] * m[k][j];
    }
  }
  return out;
}

std::optional<RatMatrix> invert(const RatMatrix& m, const VarTablePtr& vars) {
  const std::size_t n = m.size();
  RatMatrix inv = zero_matrix(vars, n, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<RationalFunction> rhs(n, RationalFunction(vars));
    rhs[c] = one(vars);
    auto col = solve_linear(m, rhs);
    if (!col) return std::nullopt;
    for (std::size_t r = 0; r < n; ++r) inv[r][c] = (*col)[r];
  }
  return inv;
}

bool is_identity(const RatMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (i == j ? !m[i][j].is_one() : !m[i][j].is_zero()) return false;
    }
  }
  return true;
}

}  // namespace

// ------------------------------------------------------------ construction

PfaffianSystem build_pfaffian(const GroebnerBasis& B) {
  std::vector<DiffOperator> basis;
  for (const auto& m : standard_monomials(B)) basis.push_back(DiffOperator::monomial(B.vars, m, one(B.vars)));
  return build_pfaffian(B, basis);
}

PfaffianSystem build_pfaffian(const GroebnerBasis& B, const std::vector<DiffOperator>& basis) {
  const auto& smons = standard_monomials(B);
  const VarTablePtr& vars = B.vars;
  const std::size_t p = smons.size();
  if (basis.size() != p) {
    throw DimensionMismatch("basis has " + std::to_string(basis.size()) + " elements but the holonomic rank is " +
                            std::to_string(p));
  }
  Reducer red(B.generators);
  auto nf_coords = [&](const DiffOperator& op) { return coordinates(red.normal_form(op).remainder, smons); };

  // Row k of T: the basis element in standard-monomial coordinates.
  RatMatrix T;
  for (const auto& s : basis) {
    require_same(s.vars(), vars);
    T.push_back(nf_coords(s));
  }
  RatMatrix Tinv;
  if (is_identity(T)) {
    Tinv = T;
  } else {
    auto inv = invert(T, vars);
    if (!inv) {
      throw DimensionMismatch("basis elements are linearly dependent modulo the ideal; they do not span the " +
                              std::to_string(p) + "-dimensional quotient");
    }
    Tinv = std::move(*inv);
  }

  PfaffianSystem P;
  P.vars = vars;
  P.basis = basis;
  const std::size_t d = vars->size();
  P.shift.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    DiffOperator di = DiffOperator::partial(vars, i);
    RatMatrix Pi;
    for (const auto& s : basis) Pi.push_back(row_times(nf_coords(di * s), Tinv));
    P.matrices.push_back(std::move(Pi));
    P.grad_matrix.push_back(row_times(nf_coords(di), Tinv));
  }
  std::vector<RationalFunction> e1(p, RationalFunction(vars));
  auto it = std::find(smons.begin(), smons.end(), Monomial{});
  e1[static_cast<std::size_t>(it - smons.begin())] = one(vars);
  P.unit = row_times(e1, Tinv);
  P.compile();
  return P;
}

RatMatrix gradient_coeffs(const GroebnerBasis& B) {
  const auto& smons = standard_monomials(B);
  Reducer red(B.generators);
  RatMatrix out;
  for (std::size_t i = 0; i < B.vars->size(); ++i) {
    out.push_back(coordinates(red.normal_form(DiffOperator::partial(B.vars, i)).remainder, smons));
  }
  return out;
}

PfaffianSystem local_pfaffian_system(std::shared_ptr<const LocalPfaffian> local, std::vector<DiffOperator> basis) {
  PfaffianSystem P;
  P.vars = local->spec().vars;
  P.basis = std::move(basis);
  P.shift.assign(P.dim(), 0.0);
  P.local = std::move(local);
  P.compile();
  return P;
}

// ---------------------------------------------------------------- compile

void PfaffianSystem::compile() {
  local_cache_.reset();
  grad_derivs_.reset();
  grad_deriv_dens_.reset();
  matrix_derivs_.reset();
  matrix_deriv_dens_.reset();
  if (shift.size() != dim()) shift.resize(dim(), 0.0);
  if (local) {
    compiled_.reset();
    return;
  }
  auto c = std::make_shared<Compiled>();
  std::map<std::string, std::size_t> den_index;
  denominators.clear();
  c->max_degree.assign(dim(), 0);
  auto track = [&](const Polynomial& p) {
    for (const auto& t : p.terms()) {
      for (std::size_t v = 0; v < dim(); ++v) c->max_degree[v] = std::max<unsigned>(c->max_degree[v], t.mono.e[v]);
    }
  };
  auto entry = [&](std::size_t row, std::size_t col, const RationalFunction& f) {
    Entry e{row, col, CompiledPolynomial(f.num()), kNoDen};
    track(f.num());
    if (!f.den().is_one()) {
      std::string key = f.den().to_string();
      auto [it, inserted] = den_index.try_emplace(key, denominators.size());
      if (inserted) {
        denominators.push_back(f.den());
        c->dens.emplace_back(f.den());
        track(f.den());
      }
      e.den = it->second;
    }
    return e;
  };
  for (const auto& m : matrices) {
    std::vector<Entry> entries;
    for (std::size_t r = 0; r < m.size(); ++r) {
      for (std::size_t k = 0; k < m[r].size(); ++k) {
        if (!m[r][k].is_zero()) entries.push_back(entry(r, k, m[r][k]));
      }
    }
    c->matrices.push_back(std::move(entries));
  }
  for (std::size_t r = 0; r < grad_matrix.size(); ++r) {
    for (std::size_t k = 0; k < grad_matrix[r].size(); ++k) {
      if (!grad_matrix[r][k].is_zero()) c->grad.push_back(entry(r, k, grad_matrix[r][k]));
    }
  }
  for (std::size_t k = 0; k < unit.size(); ++k) {
    if (!unit[k].is_zero()) c->unit.push_back(entry(0, k, unit[k]));
  }
  compiled_ = std::move(c);
}

void PfaffianSystem::prepare(std::span<const double> point, Workspace& ws) const {
  if (point.size() != dim()) throw DimensionMismatch("point has the wrong number of coordinates");
  fill_powers(point, compiled_->max_degree, ws.powers);
  ws.den_values.assign(compiled_->dens.size(), 0.0);
  ws.den_done.assign(compiled_->dens.size(), 0);
}

double PfaffianSystem::den_value(std::size_t k, std::span<const double> point, double guard, Workspace& ws) const {
  if (!ws.den_done[k]) {
    double v = compiled_->dens[k].evaluate(ws.powers);
    if (std::abs(v) < guard) {
      throw DenominatorNearZero(denominators[k].to_string(), std::vector<double>(point.begin(), point.end()), v);
    }
    ws.den_values[k] = v;
    ws.den_done[k] = 1;
  }
  return ws.den_values[k];
}

double PfaffianSystem::entry_value(const Entry& e, std::span<const double> point, double guard, Workspace& ws) const {
  double v = e.num.evaluate(ws.powers);
  if (e.den != kNoDen) v /= den_value(e.den, point, guard, ws);
  return v;
}

const LocalPfaffian::Values& PfaffianSystem::local_values(std::span<const double> point, double guard,
                                                         bool derivatives) const {
  auto cache = local_cache_;
  if (cache && cache->guard == guard && (cache->derivatives || !derivatives) &&
      std::equal(point.begin(), point.end(), cache->point.begin(), cache->point.end())) {
    return cache->values;
  }
  auto fresh = std::make_shared<LocalCache>();
  fresh->point.assign(point.begin(), point.end());
  fresh->guard = guard;
  fresh->derivatives = derivatives;
  fresh->values = local->evaluate(point, guard, derivatives);
  local_cache_ = fresh;
  return fresh->values;
}

// ------------------------------------------------------- numeric evaluation

Eigen::MatrixXd PfaffianSystem::eval_matrix(std::size_t var, std::span<const double> point, double guard) const {
  if (var >= dim()) throw UnknownVariable("#" + std::to_string(var));
  const std::size_t p = rank();
  Eigen::MatrixXd m;
  if (local) {
    m = local_values(point, guard).matrices[var];
  } else {
    m = Eigen::MatrixXd::Zero(p, p);
    Workspace ws;
    prepare(point, ws);
    for (const auto& e : compiled_->matrices[var]) m(e.row, e.col) = entry_value(e, point, guard, ws);
  }
  if (shift[var] != 0) m.diagonal().array() += shift[var];
  return m;
}

Eigen::MatrixXd PfaffianSystem::eval_combination(std::span<const double> weights, std::span<const double> point,
                                                 double guard) const {
  if (weights.size() != dim()) throw DimensionMismatch("weights have the wrong number of coordinates");
  const std::size_t p = rank();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  double diag = 0;
  if (local) {
    const auto& vals = local_values(point, guard);
    for (std::size_t i = 0; i < dim(); ++i) {
      if (weights[i] == 0) continue;
      m += weights[i] * vals.matrices[i];
      diag += weights[i] * shift[i];
    }
  } else {
    Workspace ws;
    prepare(point, ws);
    for (std::size_t i = 0; i < dim(); ++i) {
      if (weights[i] == 0) continue;
      for (const auto& e : compiled_->matrices[i]) m(e.row, e.col) += weights[i] * entry_value(e, point, guard, ws);
      diag += weights[i] * shift[i];
    }
  }
  if (diag != 0) m.diagonal().array() += diag;
  return m;
}

Eigen::MatrixXd PfaffianSystem::eval_grad(std::span<const double> point, double guard) const {
  const std::size_t p = rank();
  Eigen::MatrixXd a;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
  if (local) {
    a = local_values(point, guard).grad;
    u(0) = 1;
  } else {
    a = Eigen::MatrixXd::Zero(dim(), p);
    Workspace ws;
    prepare(point, ws);
    for (const auto& e : compiled_->grad) a(e.row, e.col) = entry_value(e, point, guard, ws);
    for (const auto& e : compiled_->unit) u(e.col) = entry_value(e, point, guard, ws);
  }
  for (std::size_t i = 0; i < dim(); ++i) {
    if (shift[i] != 0) a.row(i) += shift[i] * u.transpose();
  }
  return a;
}

Eigen::VectorXd PfaffianSystem::eval_unit(std::span<const double> point, double guard) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(rank());
  if (local) {
    u(0) = 1;
    return u;
  }
  Workspace ws;
  prepare(point, ws);
  for (const auto& e : compiled_->unit) u(e.col) = entry_value(e, point, guard, ws);
  return u;
}

std::vector<Eigen::MatrixXd> PfaffianSystem::eval_grad_derivatives(std::span<const double> point,
                                                                   double guard) const {
  const std::size_t d = dim();
  const std::size_t p = rank();
  std::vector<Eigen::MatrixXd> out(d, Eigen::MatrixXd::Zero(d, p));
  if (local) {
    const auto& vals = local_values(point, guard, true);
    for (std::size_t j = 0; j < d; ++j) out[j] = vals.dgrad[j];  // unit is constant
    return out;
  }
  if (!grad_derivs_) {
    auto derivs = std::make_shared<std::vector<std::vector<Entry>>>(d);
    auto dens = std::make_shared<std::vector<CompiledPolynomial>>();
    std::map<std::string, std::size_t> den_index;
    auto add = [&](std::vector<Entry>& list, std::size_t row, std::size_t col, const RationalFunction& f) {
      if (f.is_zero()) return;
      Entry e{row, col, CompiledPolynomial(f.num()), kNoDen};
      if (!f.den().is_one()) {
        auto [it, inserted] = den_index.try_emplace(f.den().to_string(), dens->size());
        if (inserted) dens->emplace_back(f.den());
        e.den = it->second;
      }
      list.push_back(std::move(e));
    };
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < p; ++k) add((*derivs)[j], i, k, grad_matrix[i][k].derivative(j));
      }
      for (std::size_t k = 0; k < p; ++k) add((*derivs)[j], d, k, unit[k].derivative(j));  // row d: unit
    }
    grad_derivs_ = derivs;
    grad_deriv_dens_ = dens;
  }
  std::vector<unsigned> maxdeg(d, 0);
  for (const auto& list : *grad_derivs_) {
    for (const auto& e : list) {
      for (std::size_t v = 0; v < d; ++v) maxdeg[v] = std::max(maxdeg[v], e.num.max_degree(v));
    }
  }
  for (const auto& c : *grad_deriv_dens_) {
    for (std::size_t v = 0; v < d; ++v) maxdeg[v] = std::max(maxdeg[v], c.max_degree(v));
  }
  std::vector<std::vector<double>> powers;
  fill_powers(point, maxdeg, powers);
  std::vector<double> den_vals(grad_deriv_dens_->size());
  for (std::size_t k = 0; k < den_vals.size(); ++k) {
    den_vals[k] = (*grad_deriv_dens_)[k].evaluate(powers);
    if (std::abs(den_vals[k]) < guard) {
      throw DenominatorNearZero("derivative of the gradient coefficients",
                                std::vector<double>(point.begin(), point.end()), den_vals[k]);
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    Eigen::VectorXd du = Eigen::VectorXd::Zero(p);
    for (const auto& e : (*grad_derivs_)[j]) {
      double v = e.num.evaluate(powers);
      if (e.den != kNoDen) v /= den_vals[e.den];
      if (e.row == d) {
        du(e.col) = v;
      } else {
        out[j](e.row, e.col) = v;
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (shift[i] != 0) out[j].row(i) += shift[i] * du.transpose();
    }
  }
  return out;
}

std::vector<std::vector<Eigen::MatrixXd>> PfaffianSystem::eval_matrix_derivatives(std::span<const double> point,
                                                                                  double guard) const {
  const std::size_t d = dim();
  const std::size_t p = rank();
  if (local) return local_values(point, guard, true).dmatrices;
  if (!matrix_derivs_) {
    auto derivs = std::make_shared<std::vector<std::vector<Entry>>>(d * d);
    auto dens = std::make_shared<std::vector<CompiledPolynomial>>();
    std::map<std::string, std::size_t> den_index;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t r = 0; r < p; ++r) {
          for (std::size_t k = 0; k < p; ++k) {
            if (matrices[i][r][k].is_zero()) continue;
            RationalFunction f = matrices[i][r][k].derivative(j);
            if (f.is_zero()) continue;
            Entry e{r, k, CompiledPolynomial(f.num()), kNoDen};
            if (!f.den().is_one()) {
              auto [it, inserted] = den_index.try_emplace(f.den().to_string(), dens->size());
              if (inserted) dens->emplace_back(f.den());
              e.den = it->second;
            }
            (*derivs)[j * d + i].push_back(std::move(e));
          }
        }
      }
    }
    matrix_derivs_ = derivs;
    matrix_deriv_dens_ = dens;
  }
  std::vector<unsigned> maxdeg(d, 0);
  for (const auto& list : *matrix_derivs_) {
    for (const auto& e : list) {
      for (std::size_t v = 0; v < d; ++v) maxdeg[v] = std::max(maxdeg[v], e.num.max_degree(v));
    }
  }
  for (const auto& c : *matrix_deriv_dens_) {
    for (std::size_t v = 0; v < d; ++v) maxdeg[v] = std::max(maxdeg[v], c.max_degree(v));
  }
  std::vector<std::vector<double>> powers;
  fill_powers(point, maxdeg, powers);
  std::vector<double> den_vals(matrix_deriv_dens_->size());
  for (std::size_t k = 0; k < den_vals.size(); ++k) {
    den_vals[k] = (*matrix_deriv_dens_)[k].evaluate(powers);
    if (std::abs(den_vals[k]) < guard) {
      throw DenominatorNearZero("derivative of the Pfaffian matrices", std::vector<double>(point.begin(), point.end()),
                                den_vals[k]);
    }
  }
  std::vector<std::vector<Eigen::MatrixXd>> out(d, std::vector<Eigen::MatrixXd>(d, Eigen::MatrixXd::Zero(p, p)));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < d; ++i) {
      for (const auto& e : (*matrix_derivs_)[j * d + i]) {
        double v = e.num.evaluate(powers);
        if (e.den != kNoDen) v /= den_vals[e.den];
        out[j][i](e.row, e.col) = v;
      }
    }
  }
  return out;
}

Eigen::VectorXd PfaffianSystem::eval_inhomo(std::span<const double> weights, std::span<const double> point) const {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(rank());
  if (!inhomo) return q;
  for (std::size_t i = 0; i < dim(); ++i) {
    if (weights[i] != 0) q += weights[i] * inhomo(i, point);
  }
  return q;
}

Eigen::MatrixXd eval_matrix(const PfaffianSystem& P, std::size_t var, std::span<const double> point, double guard) {
  return P.eval_matrix(var, point, guard);
}

// ------------------------------------------------------- symbolic helpers

RatMatrix mat_mul(const RatMatrix& a, const RatMatrix& b) {
  if (a.empty()) return {};
  if (a[0].size() != b.size()) throw DimensionMismatch("matrix product shapes do not match");
  const VarTablePtr& vars = a[0][0].vars();
  RatMatrix out = zero_matrix(vars, a.size(), b.empty() ? 0 : b[0].size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < out[i].size(); ++j) {
        if (!b[k][j].is_zero()) out[i][j] += a[i][k] * b[k][j];
      }
    }
  }
  return out;
}

RatMatrix mat_diff(const RatMatrix& a, std::size_t var) {
  RatMatrix out = a;
  for (auto& row : out) {
    for (auto& e : row) e = e.derivative(var);
  }
  return out;
}

namespace {

RatMatrix mat_add(RatMatrix a, const RatMatrix& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] += b[i][j];
  }
  return a;
}

void require_symbolic(const PfaffianSystem& P, const char* what) {
  if (!P.symbolic()) throw Unsupported(std::string(what) + " needs a symbolic Pfaffian system");
}

}  // namespace

std::vector<RatMatrix> hessian_matrices(const PfaffianSystem& P) {
  require_symbolic(P, "hessian_matrices");
  const std::size_t d = P.dim();
  std::vector<RatMatrix> out;
  out.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out.push_back(mat_add(mat_diff(P.matrices[i], j), mat_mul(P.matrices[i], P.matrices[j])));
  }
  return out;
}

PfaffianSystem gauge_tilt(const PfaffianSystem& P, std::span<const double> linear_coeffs) {
  if (linear_coeffs.size() != P.dim()) throw DimensionMismatch("one tilt coefficient per variable expected");
  PfaffianSystem out = P;
  for (std::size_t i = 0; i < P.dim(); ++i) out.shift[i] += linear_coeffs[i];
  return out;
}

bool is_integrable(const PfaffianSystem& P) {
  require_symbolic(P, "is_integrable");
  const std::size_t d = P.dim();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      RatMatrix lhs = mat_add(mat_diff(P.matrices[i], j), mat_mul(P.matrices[i], P.matrices[j]));
      RatMatrix rhs = mat_add(mat_diff(P.matrices[j], i), mat_mul(P.matrices[j], P.matrices[i]));
      if (lhs != rhs) return false;
    }
  }
  return true;
}

double integrability_defect(const PfaffianSystem& P, std::span<const double> point) {
  const std::size_t d = P.dim();
  std::vector<Eigen::MatrixXd> M(d);
  for (std::size_t i = 0; i < d; ++i) M[i] = P.eval_matrix(i, point);
  auto dM = P.eval_matrix_derivatives(point);
  double worst = 0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      Eigen::MatrixXd a = M[i] * M[j];
      Eigen::MatrixXd b = M[j] * M[i];
      double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), dM[j][i].cwiseAbs().maxCoeff(),
                               dM[i][j].cwiseAbs().maxCoeff()});
      double defect = (dM[j][i] + a - dM[i][j] - b).cwiseAbs().maxCoeff();
      worst = std::max(worst, defect / scale);
    }
  }
  return worst;
}

// ------------------------------------------------------------------- JSON

std::string to_json(const PfaffianSystem& P) {
  require_symbolic(P, "to_json");
  using nlohmann::json;
  json j;
  j["vars"] = P.vars->names();
  json basis = json::array();
  for (const auto& s : P.basis) basis.push_back(s.to_string());
  j["basis"] = basis;
  auto mat = [](const RatMatrix& m) {
    json rows = json::array();
    for (const auto& row : m) {
      json r = json::array();
      for (const auto& e : row) r.push_back(e.to_string());
      rows.push_back(r);
    }
    return rows;
  };
  json ms = json::array();
  for (const auto& m : P.matrices) ms.push_back(mat(m));
  j["matrices"] = ms;
  j["grad"] = mat(P.grad_matrix);
  json unit = json::array();
  for (const auto& e : P.unit) unit.push_back(e.to_string());
  j["unit"] = unit;
  j["shift"] = P.shift;
  json dens = json::array();
  for (const auto& d : P.denominators) dens.push_back(d.to_string());
  j["denominators"] = dens;
  return j.dump(2);
}

PfaffianSystem pfaffian_from_json(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid Pfaffian JSON: ") + e.what(), 1, 1);
  }
  try {
    PfaffianSystem P;
    P.vars = make_vars(j.at("vars").get<std::vector<std::string>>());
    for (const auto& s : j.at("basis")) P.basis.push_back(parse_operator(s.get<std::string>(), P.vars));
    const std::size_t p = P.basis.size();
    auto mat = [&](const json& m, std::size_t rows) {
      if (m.size() != rows) throw DimensionMismatch("matrix has the wrong number of rows");
      RatMatrix out;
      for (const auto& row : m) {
        if (row.size() != p) throw DimensionMismatch("matrix row has the wrong length");
        std::vector<RationalFunction> r;
        for (const auto& e : row) r.push_back(parse_rational(e.get<std::string>(), P.vars));
        out.push_back(std::move(r));
      }
      return out;
    };
    if (j.at("matrices").size() != P.vars->size()) throw DimensionMismatch("one matrix per variable expected");
    for (const auto& m : j.at("matrices")) P.matrices.push_back(mat(m, p));
    P.grad_matrix = mat(j.at("grad"), P.vars->size());
    if (j.contains("unit")) {
      for (const auto& e : j.at("unit")) P.unit.push_back(parse_rational(e.get<std::string>(), P.vars));
    } else {
      P.unit.assign(p, RationalFunction(P.vars));
      if (p) P.unit[0] = one(P.vars);
    }
    if (P.unit.size() != p) throw DimensionMismatch("unit vector has the wrong length");
    P.shift = j.value("shift", std::vector<double>(P.vars->size(), 0.0));
    if (P.shift.size() != P.vars->size()) throw DimensionMismatch("shift has the wrong length");
    P.compile();
    return P;
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid Pfaffian JSON: ") + e.what(), 1, 1);
  }
}

// ------------------------------------------------------- local evaluation

namespace {

void monomials_up_to(const std::vector<std::size_t>& active, unsigned degree, std::vector<Monomial>& out) {
  std::vector<Monomial> layer{Monomial{}};
  out.push_back(Monomial{});
  for (unsigned k = 1; k <= degree; ++k) {
    std::vector<Monomial> next;
    for (const auto& m : layer) {
      // Nondecreasing variable positions avoid duplicates.
      std::size_t last = 0;
      for (std::size_t a = 0; a < active.size(); ++a) {
        if (m.e[active[a]]) last = a;
      }
      for (std::size_t a = last; a < active.size(); ++a) {
        Monomial n = m;
        n.set(active[a], m.e[active[a]] + 1u);
        next.push_back(n);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
}

}  // namespace

LocalPfaffian::LocalPfaffian(Spec spec) : spec_(std::move(spec)) {
  const VarTablePtr& vars = spec_.vars;
  const std::size_t d = vars->size();
  if (spec_.substitution.size() != d) throw DimensionMismatch("one substitution per variable expected");
  std::vector<char> is_active(d, 0);
  for (const auto& m : spec_.substitution) {
    for (std::size_t v = 0; v < d; ++v) {
      if (m.e[v]) is_active[v] = 1;
    }
  }
  std::vector<std::size_t> active;
  for (std::size_t v = 0; v < d; ++v) {
    if (is_active[v]) active.push_back(v);
  }

  std::map<Monomial, std::size_t, bool (*)(const Monomial&, const Monomial&)> index(
      [](const Monomial& a, const Monomial& b) { return grevlex_greater(a, b); });
  auto column = [&](const Monomial& m) {
    for (std::size_t v = 0; v < d; ++v) {
      if (m.e[v] && !is_active[v]) throw Error("local relation uses an inactive derivation");
    }
    return index.try_emplace(m, 0).first;
  };

  std::vector<Monomial> prolong;
  monomials_up_to(active, spec_.prolongation, prolong);
  std::vector<std::vector<std::pair<Monomial, Polynomial>>> raw;
  for (const auto& g : spec_.relations) {
    require_same(g.vars(), vars);
    for (const auto& beta : prolong) {
      DiffOperator row = g.left_shifted(beta);
      std::vector<std::pair<Monomial, Polynomial>> entries;
      for (const auto& t : row.terms()) {
        if (!t.coeff.is_polynomial()) throw Error("local relations need polynomial coefficients");
        column(t.d);
        entries.emplace_back(t.d, t.coeff.num());
      }
      raw.push_back(std::move(entries));
    }
  }
  for (const auto& b : spec_.basis) column(b);
  for (std::size_t v = 0; v < d; ++v) {
    column(spec_.substitution[v]);
    for (const auto& b : spec_.basis) column(spec_.substitution[v] + b);
  }
  for (auto& [m, idx] : index) {
    idx = columns_.size();
    columns_.push_back(m);
  }

  max_degree_.assign(d, 0);
  for (auto& entries : raw) {
    std::vector<Entry> row;
    for (auto& [m, c] : entries) {
      for (const auto& t : c.terms()) {
        for (std::size_t v = 0; v < d; ++v) max_degree_[v] = std::max<unsigned>(max_degree_[v], t.mono.e[v]);
      }
      Entry e{index.at(m), CompiledPolynomial(c), {}};
      for (std::size_t v = 0; v < d; ++v) {
        Polynomial dc = c.derivative(v);
        if (!dc.is_zero()) e.dcoeff.emplace_back(v, CompiledPolynomial(dc));
      }
      row.push_back(std::move(e));
    }
    rows_.push_back(std::move(row));
  }

  if (spec_.basis.empty() || spec_.basis.front() != Monomial{}) {
    throw DimensionMismatch("the first basis monomial must be 1");
  }
  std::vector<char> in_basis(columns_.size(), 0);
  for (const auto& b : spec_.basis) {
    basis_cols_.push_back(index.at(b));
    if (in_basis[basis_cols_.back()]) throw DimensionMismatch("repeated basis monomial");
    in_basis[basis_cols_.back()] = 1;
  }
  target_of_.assign(columns_.size(), kNoDen);
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (!in_basis[c]) {
      target_of_[c] = free_cols_.size();
      free_cols_.push_back(c);
    }
  }
  targets_.assign(d, {});
  for (std::size_t v = 0; v < d; ++v) {
    grad_targets_.push_back(index.at(spec_.substitution[v]));
    for (const auto& b : spec_.basis) targets_[v].push_back(index.at(spec_.substitution[v] + b));
  }

  // Every target must be determined by the relations at a generic point.
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unif(-1.3, 1.7);
  std::vector<double> z(d);
  for (auto& v : z) v = unif(rng);
  Eigen::MatrixXd MN = Eigen::MatrixXd::Zero(rows_.size(), free_cols_.size());
  std::vector<std::vector<double>> powers;
  fill_powers(z, max_degree_, powers);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (const auto& e : rows_[r]) {
      if (target_of_[e.col] != kNoDen) MN(r, target_of_[e.col]) = e.coeff.evaluate(powers);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(MN);
  Eigen::MatrixXd kernel = lu.kernel();
  auto determined = [&](std::size_t col) {
    if (target_of_[col] == kNoDen) return true;
    if (lu.rank() == static_cast<Eigen::Index>(free_cols_.size())) return true;
    return kernel.row(target_of_[col]).cwiseAbs().maxCoeff() < 1e-8;
  };
  for (std::size_t v = 0; v < d; ++v) {
    bool ok = determined(grad_targets_[v]);
    for (auto c : targets_[v]) ok = ok && determined(c);
    if (!ok) {
      throw DimensionMismatch("the relations prolonged to order " + std::to_string(spec_.prolongation) +
                              " do not determine the derivatives along " + vars->name(v) +
                              " (basis not spanning, or prolongation too small)");
    }
  }
  generic_rank_ = static_cast<std::size_t>(lu.rank());
}

LocalPfaffian::Values LocalPfaffian::evaluate(std::span<const double> point, double guard, bool derivatives) const {
  const std::size_t d = spec_.vars->size();
  if (point.size() != d) throw DimensionMismatch("point has the wrong number of coordinates");
  const std::size_t nb = basis_cols_.size();
  const std::size_t nr = rows_.size();
  std::vector<std::vector<double>> powers;
  fill_powers(point, max_degree_, powers);
  std::vector<std::size_t> basis_pos(columns_.size(), kNoDen);
  for (std::size_t k = 0; k < nb; ++k) basis_pos[basis_cols_[k]] = k;

  // Rows are scaled to unit maximum; the scale is frozen for derivatives.
  Eigen::MatrixXd MN = Eigen::MatrixXd::Zero(nr, free_cols_.size());
  Eigen::MatrixXd MB = Eigen::MatrixXd::Zero(nr, nb);
  std::vector<double> scale(nr, 1.0);
  auto put = [&](Eigen::MatrixXd& N, Eigen::MatrixXd& B, std::size_t r, std::size_t col, double v) {
    if (target_of_[col] != kNoDen) {
      N(r, target_of_[col]) += v;
    } else {
      B(r, basis_pos[col]) += v;
    }
  };
  for (std::size_t r = 0; r < nr; ++r) {
    double mx = 0;
    for (const auto& e : rows_[r]) {
      double v = e.coeff.evaluate(powers);
      mx = std::max(mx, std::abs(v));
      put(MN, MB, r, e.col, v);
    }
    if (mx > 0) {
      scale[r] = 1 / mx;
      MN.row(r) *= scale[r];
      MB.row(r) *= scale[r];
    }
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(MN.rows(), MN.cols());
  cod.setThreshold(std::max(guard, 1e-13));
  cod.compute(MN);
  if (static_cast<std::size_t>(cod.rank()) < generic_rank_) {
    throw DenominatorNearZero("local relation matrix (rank " + std::to_string(cod.rank()) + " < " +
                                  std::to_string(generic_rank_) + ")",
                              std::vector<double>(point.begin(), point.end()), cod.maxPivot());
  }
  // Jets outside the basis as linear combinations of the basis jets.
  Eigen::MatrixXd U = cod.solve(-MB);

  auto assemble = [&](const Eigen::MatrixXd& W, bool unit_rows, Values& out, Eigen::MatrixXd& grad,
                      std::vector<Eigen::MatrixXd>& mats) {
    (void)out;
    auto coords = [&](std::size_t col) -> Eigen::RowVectorXd {
      if (basis_pos[col] != kNoDen) {
        Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(nb);
        if (unit_rows) e(basis_pos[col]) = 1;
        return e;
      }
      return W.row(target_of_[col]);
    };
    grad.resize(d, nb);
    mats.clear();
    for (std::size_t v = 0; v < d; ++v) {
      grad.row(v) = coords(grad_targets_[v]);
      Eigen::MatrixXd P(nb, nb);
      for (std::size_t k = 0; k < nb; ++k) P.row(k) = coords(targets_[v][k]);
      mats.push_back(std::move(P));
    }
  };
  Values out;
  assemble(U, true, out, out.grad, out.matrices);
  if (!derivatives) return out;

  out.dmatrices.resize(d);
  out.dgrad.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    Eigen::MatrixXd dN = Eigen::MatrixXd::Zero(nr, free_cols_.size());
    Eigen::MatrixXd dB = Eigen::MatrixXd::Zero(nr, nb);
    for (std::size_t r = 0; r < nr; ++r) {
      for (const auto& e : rows_[r]) {
        for (const auto& [v, dc] : e.dcoeff) {
          if (v == j) put(dN, dB, r, e.col, scale[r] * dc.evaluate(powers));
        }
      }
    }
    Eigen::MatrixXd dU = cod.solve(-(dB + dN * U));
    assemble(dU, false, out, out.dgrad[j], out.dmatrices[j]);
  }
  return out;
}

}  // namespace hgd
