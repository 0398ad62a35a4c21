// hgd: command-line front end for the holonomic gradient method.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hgd/fisher_bingham.hpp"
#include "hgd/parse.hpp"

namespace {

using namespace hgd;
using nlohmann::json;

enum Exit { kOk = 0, kInput = 2, kAlgebra = 3, kNumeric = 4 };

enum class Level { error, warn, info, debug };
Level g_level = Level::warn;

void note(Level lvl, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (lvl <= g_level) std::cerr << "[" << names[static_cast<int>(lvl)] << "] " << msg << "\n";
}

double guard_from_env() {
  const char* env = std::getenv("HGD_GUARD");
  if (!env) return RationalFunction::kDefaultGuard;
  char* end = nullptr;
  double g = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(g > 0)) throw ParseError(std::string("HGD_GUARD is not a positive number: ") + env, 0, 0);
  note(Level::info, "singular guard " + std::to_string(g) + " from HGD_GUARD");
  return g;
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw ParseError(what + ": '" + cell + "' is not a number", 1, 1);
    }
  }
  return out;
}

// "lo:hi,lo:hi,..." (a single value v means v:v).
std::vector<Interval> parse_intervals(const std::string& text) {
  std::vector<Interval> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    auto colon = cell.find(':');
    auto lo = parse_numbers(cell.substr(0, colon), "domain");
    auto hi = colon == std::string::npos ? lo : parse_numbers(cell.substr(colon + 1), "domain");
    if (lo.size() != 1 || hi.size() != 1 || !(lo[0] <= hi[0])) throw ParseError("bad interval '" + cell + "'", 1, 1);
    out.push_back({lo[0], hi[0]});
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0, 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path, 0, 0);
  out << text;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

void print_matrix(std::ostream& os, const RatMatrix& m) {
  for (const auto& row : m) {
    os << "  [";
    for (std::size_t k = 0; k < row.size(); ++k) os << (k ? ", " : "") << row[k].to_string();
    os << "]\n";
  }
}

// ------------------------------------------------------------- commands

int cmd_groebner(const std::string& file, const std::string& json_out) {
  Ideal ideal = read_ideal_file(file);
  GroebnerBasis gb = buchberger(ideal.generators);
  std::cout << "groebner basis (" << gb.generators.size() << " elements):\n";
  for (const auto& g : gb.generators) std::cout << "  " << g.to_string() << "\n";
  const auto& std_monos = standard_monomials(gb);
  std::cout << "standard monomials:";
  for (const auto& m : std_monos) std::cout << " " << derivation_string(*gb.vars, m);
  std::cout << "\nholonomic rank: " << gb.rank() << "\n";
  if (!json_out.empty()) {
    json j;
    j["vars"] = gb.vars->names();
    for (const auto& g : gb.generators) j["generators"].push_back(g.to_string());
    for (const auto& m : std_monos) j["standard_monomials"].push_back(derivation_string(*gb.vars, m));
    j["rank"] = gb.rank();
    write_text(json_out, j.dump(2) + "\n");
  }
  return kOk;
}

int cmd_pfaffian(const std::string& file, const std::string& basis_text, const std::string& json_out) {
  Ideal ideal = read_ideal_file(file);
  GroebnerBasis gb = buchberger(ideal.generators);
  standard_monomials(gb);
  PfaffianSystem P = basis_text.empty() ? build_pfaffian(gb) : build_pfaffian(gb, parse_operator_list(basis_text, gb.vars));
  std::cout << "basis:";
  for (const auto& b : P.basis) std::cout << " " << b.to_string();
  std::cout << "\n";
  for (std::size_t i = 0; i < P.dim(); ++i) {
    std::cout << "P_" << P.vars->name(i) << " =\n";
    print_matrix(std::cout, P.matrices[i]);
  }
  std::cout << "integrable: " << (is_integrable(P) ? "yes" : "NO") << "\n";
  if (!json_out.empty()) write_text(json_out, to_json(P));
  return kOk;
}

int cmd_fb_system(unsigned n, bool reduced, const std::string& out) {
  Ideal ideal{fb_vars(n), reduced ? fb_reduced_generators(n) : fb_generators(n)};
  std::string text = format_ideal(ideal);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return kOk;
}

struct FitOptions {
  std::string data, stats, domain, start, trajectory, mode = "coordinate";
  unsigned n = 0;
  double grid = 0.05;
  double step = 0;
  double grad_tol = 1e-6;
  std::size_t max_iter = 200000;
  std::size_t restart_every = 0;
  bool report = false;
};

int cmd_fit(const FitOptions& o, double guard) {
  if (o.data.empty() == o.stats.empty()) throw ParseError("exactly one of --data and --stats is required", 0, 0);
  SufficientStats stats = o.stats.empty() ? suff_stats(read_sample_csv(o.data)) : read_stats_json(o.stats);
  const unsigned n = o.n ? o.n : stats.n;
  if (stats.n != n) throw DimensionMismatch("--sphere-dim does not match the data");
  auto mode = parse_mode(o.mode);
  if (!mode) throw ParseError("unknown mode '" + o.mode + "'", 0, 0);

  note(Level::info, "building the Pfaffian system for n = " + std::to_string(n));
  MLEObjective obj(n, stats);
  std::vector<Interval> xbox(fb_num_x(n), Interval{-30, 30}), ybox(n + 1, Interval{-30, 30});
  std::vector<double> preset_start;
  if (!o.domain.empty()) {
    if (o.domain == "astro" || o.domain == "magnetism") {
      DomainPreset p = domain_preset(o.domain);
      if (p.n != n) throw DimensionMismatch("domain preset is for n = " + std::to_string(p.n));
      xbox = p.x;
      ybox = p.y;
      preset_start = p.start;
    } else {
      json j = json::parse(read_text(o.domain), nullptr, false);
      if (j.is_discarded() || !j.contains("x") || !j.contains("y")) throw ParseError("domain file needs \"x\" and \"y\"", 0, 0);
      auto box = [](const json& a) {
        std::vector<Interval> out;
        for (const auto& e : a) out.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        return out;
      };
      xbox = box(j["x"]);
      ybox = box(j["y"]);
    }
  }
  auto domain = obj.domain(xbox, ybox);
  std::vector<double> start;
  if (!o.start.empty()) {
    start = parse_numbers(o.start, "--start");
    if (start.size() + 1 == domain.size()) start.push_back(1.0);
  } else if (!preset_start.empty()) {
    start = preset_start;
  } else {
    start = start_point(n, stats, &domain);
  }
  if (start.size() != domain.size()) throw DimensionMismatch("--start needs " + std::to_string(domain.size() - 1) + " values");

  DescentConfig cfg;
  cfg.mode = *mode;
  cfg.domain = domain;
  cfg.step = o.step > 0 ? o.step : o.grid;
  cfg.transport.grid = o.grid;
  cfg.transport.guard = guard;
  cfg.grad_tol = o.grad_tol;
  cfg.max_iter = o.max_iter;
  cfg.record_trajectory = !o.trajectory.empty();
  if (o.restart_every) {
    cfg.restart_every = o.restart_every;
    cfg.restart = [&obj](std::span<const double> z) { return obj.initial_state(z); };
  }
  note(Level::info, "initial values by quadrature");
  StateVector s = obj.initial_state(start);
  FitResult r = minimize(obj.system(), s, cfg);

  FBParams fit = FBParams::from_point(n, r.argmin);
  const auto A = fit.matrix();
  const auto vars = fb_vars(n);
  std::cout << "termination: " << to_string(r.termination) << " after " << r.iterations << " moves\n";
  std::cout << "objective: " << std::setprecision(12) << r.value << "\n";
  std::cout << "parameters (* = at the border of the search box):\n";
  for (std::size_t k = 0; k + 1 < r.argmin.size(); ++k) {
    std::cout << "  " << vars->name(k) << " = " << fmt(r.argmin[k]) << (r.boundary_flags[k] ? " *" : "") << "\n";
  }
  std::cout << "x matrix (x_ij/2 off the diagonal):\n";
  for (const auto& row : A) {
    std::cout << " ";
    for (double v : row) std::cout << " " << std::setw(12) << fmt(v);
    std::cout << "\n";
  }
  if (o.report) {
    SpectralReport rep = spectral_report(trace_free(fit));
    std::cout << "spectral decomposition of the trace-free x:\n";
    for (std::size_t k = 0; k < rep.lambda.size(); ++k) {
      std::cout << "  lambda" << k + 1 << " = " << fmt(rep.lambda[k]) << "  axis (";
      for (std::size_t i = 0; i < rep.axes[k].size(); ++i) std::cout << (i ? ", " : "") << fmt(rep.axes[k][i]);
      std::cout << ")\n";
    }
    std::cout << "  |y| = " << fmt(rep.y_norm) << "\n";
  }
  if (!o.trajectory.empty()) {
    std::ofstream out(o.trajectory);
    if (!out) throw ParseError("cannot write " + o.trajectory, 0, 0);
    write_trajectory_csv(r, *vars, out);
  }
  if (r.termination == Termination::SingularBlocked) {
    std::cerr << "blocked by the singular locus of " << r.blocked_by << "\n";
    return kNumeric;
  }
  return kOk;
}

// Component of an inhomogeneous term: rational(z) * exp(poly(z)).
struct InhomoExpr {
  RationalFunction factor;
  std::optional<RationalFunction> exponent;
  double eval(std::span<const double> z, double guard) const {
    double v = factor.evaluate(z, guard);
    return exponent ? v * std::exp(exponent->evaluate(z, guard)) : v;
  }
};

InhomoExpr parse_inhomo(const std::string& text, const VarTablePtr& vars) {
  InhomoExpr e;
  std::string rest = text;
  auto pos = rest.find("exp(");
  if (pos != std::string::npos) {
    std::size_t depth = 0, k = pos + 3;
    for (; k < rest.size(); ++k) {
      if (rest[k] == '(') ++depth;
      if (rest[k] == ')' && --depth == 0) break;
    }
    if (k == rest.size()) throw ParseError("unbalanced exp(", 1, pos + 1);
    RationalFunction ex = parse_rational(rest.substr(pos + 4, k - pos - 4), vars);
    if (!ex.is_polynomial()) throw ParseError("exp() takes a polynomial", 1, pos + 1);
    e.exponent = ex;
    rest = rest.substr(0, pos) + "1" + rest.substr(k + 1);
    if (rest.find("exp(") != std::string::npos) throw ParseError("at most one exp() per component", 1, 1);
  }
  e.factor = parse_rational(rest, vars);
  return e;
}

struct MinimizeOptions {
  std::string pfaffian, start, g0, domain, mode = "coordinate", trajectory;
  std::vector<std::string> inhomo;
  double step = 0.05, grid = 0.05, grad_tol = 1e-6;
  std::size_t max_iter = 100000;
};

int cmd_minimize(const MinimizeOptions& o, double guard) {
  PfaffianSystem P = pfaffian_from_json(read_text(o.pfaffian));
  const std::size_t d = P.dim(), p = P.rank();
  StateVector s{parse_numbers(o.start, "--start"), parse_numbers(o.g0, "--g0")};
  if (s.point.size() != d) throw DimensionMismatch("--start needs " + std::to_string(d) + " values");
  if (s.values.size() != p) throw DimensionMismatch("--g0 needs " + std::to_string(p) + " values");
  auto mode = parse_mode(o.mode);
  if (!mode) throw ParseError("unknown mode '" + o.mode + "'", 0, 0);
  if (!o.inhomo.empty()) {
    if (o.inhomo.size() != d) throw DimensionMismatch("--inhomo must be given once per variable");
    std::vector<std::vector<InhomoExpr>> q(d);
    for (std::size_t i = 0; i < d; ++i) {
      std::stringstream ss(o.inhomo[i]);
      std::string comp;
      while (std::getline(ss, comp, ';')) q[i].push_back(parse_inhomo(comp, P.vars));
      if (q[i].size() != p) throw DimensionMismatch("--inhomo needs " + std::to_string(p) + " ';'-separated components");
    }
    P.inhomo = [q, guard](std::size_t var, std::span<const double> z) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(q[var].size()));
      for (std::size_t k = 0; k < q[var].size(); ++k) v(static_cast<Eigen::Index>(k)) = q[var][k].eval(z, guard);
      return v;
    };
  }
  DescentConfig cfg;
  cfg.mode = *mode;
  cfg.domain = o.domain.empty() ? std::vector<Interval>(d, Interval{-1e300, 1e300}) : parse_intervals(o.domain);
  cfg.step = o.step;
  cfg.transport.grid = o.grid;
  cfg.transport.guard = guard;
  cfg.grad_tol = o.grad_tol;
  cfg.max_iter = o.max_iter;
  cfg.record_trajectory = !o.trajectory.empty();
  FitResult r = minimize(P, s, cfg);
  std::cout << "termination: " << to_string(r.termination) << " after " << r.iterations << " moves\n";
  std::cout << "value: " << std::setprecision(12) << r.value << "\n";
  for (std::size_t k = 0; k < d; ++k) {
    std::cout << "  " << P.vars->name(k) << " = " << fmt(r.argmin[k]) << (r.boundary_flags[k] ? " *" : "") << "\n";
  }
  std::cout << "state:";
  for (double v : r.state.values) std::cout << " " << fmt(v);
  std::cout << "\n";
  if (!o.trajectory.empty()) {
    std::ofstream out(o.trajectory);
    if (!out) throw ParseError("cannot write " + o.trajectory, 0, 0);
    write_trajectory_csv(r, *P.vars, out);
  }
  if (r.termination == Termination::SingularBlocked) {
    std::cerr << "blocked by the singular locus of " << r.blocked_by << "\n";
    return kNumeric;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holonomic gradient descent"};
  app.require_subcommand(1);
  std::string level = "warn";
  app.add_option("--log-level", level, "error, warn, info or debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

  std::string file, json_out, basis;
  auto* gb = app.add_subcommand("groebner", "Groebner basis, standard monomials and holonomic rank");
  gb->add_option("ideal", file, "ideal file")->required();
  gb->add_option("--json", json_out, "write the basis as JSON");

  auto* pf = app.add_subcommand("pfaffian", "Pfaffian system of an ideal");
  pf->add_option("ideal", file, "ideal file")->required();
  pf->add_option("--basis", basis, "comma-separated basis, e.g. \"1,x*dx,y*dy\"");
  pf->add_option("--json", json_out, "write the system as JSON");

  unsigned fb_n = 1;
  bool reduced = false;
  std::string fb_out;
  auto* fbs = app.add_subcommand("fb-system", "Emit the Fisher-Bingham ideal");
  fbs->add_option("-n,--sphere-dim", fb_n, "sphere dimension")->check(CLI::Range(1u, 3u));
  fbs->add_flag("--reduced", reduced, "use the y-derivative form");
  fbs->add_option("-o,--output", fb_out, "output file (default stdout)");

  FitOptions fo;
  auto* fit = app.add_subcommand("fit", "Fisher-Bingham maximum likelihood fit");
  fit->add_option("--data", fo.data, "sample CSV, one unit vector per row");
  fit->add_option("--stats", fo.stats, "sufficient statistics JSON");
  fit->add_option("-n,--sphere-dim", fo.n, "sphere dimension (default: from the data)")->check(CLI::Range(1u, 2u));
  fit->add_option("--grid", fo.grid, "Runge-Kutta grid and default step")->check(CLI::PositiveNumber);
  fit->add_option("--step", fo.step, "initial descent step (default: grid)")->check(CLI::PositiveNumber);
  fit->add_option("--mode", fo.mode, "coordinate, gradient or newton");
  fit->add_option("--domain", fo.domain, "preset (astro, magnetism) or JSON file {\"x\":[[lo,hi],..],\"y\":[..]}");
  fit->add_option("--start", fo.start, "comma-separated start point (x then y)");
  fit->add_option("--grad-tol", fo.grad_tol, "gradient tolerance")->check(CLI::PositiveNumber);
  fit->add_option("--max-iter", fo.max_iter, "maximum number of moves");
  fit->add_option("--restart-every", fo.restart_every, "recompute G by quadrature every k moves");
  fit->add_option("--trajectory", fo.trajectory, "write the iteration log as CSV");
  fit->add_flag("--report", fo.report, "print the spectral decomposition");

  MinimizeOptions mo;
  auto* mn = app.add_subcommand("minimize", "Holonomic gradient descent on a Pfaffian system");
  mn->add_option("--pfaffian", mo.pfaffian, "Pfaffian system JSON")->required();
  mn->add_option("--start", mo.start, "comma-separated start point")->required();
  mn->add_option("--g0", mo.g0, "comma-separated G at the start point")->required();
  mn->add_option("--domain", mo.domain, "lo:hi per variable, comma-separated");
  mn->add_option("--inhomo", mo.inhomo, "per variable: ';'-separated components rational*exp(polynomial)");
  mn->add_option("--step", mo.step, "initial step")->check(CLI::PositiveNumber);
  mn->add_option("--grid", mo.grid, "Runge-Kutta grid")->check(CLI::PositiveNumber);
  mn->add_option("--mode", mo.mode, "coordinate, gradient or newton");
  mn->add_option("--grad-tol", mo.grad_tol, "gradient tolerance")->check(CLI::PositiveNumber);
  mn->add_option("--max-iter", mo.max_iter, "maximum number of moves");
  mn->add_option("--trajectory", mo.trajectory, "write the iteration log as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }
  g_level = level == "error" ? Level::error : level == "warn" ? Level::warn : level == "info" ? Level::info : Level::debug;

  try {
    double guard = guard_from_env();
    if (*gb) return cmd_groebner(file, json_out);
    if (*pf) return cmd_pfaffian(file, basis, json_out);
    if (*fbs) return cmd_fb_system(fb_n, reduced, fb_out);
    if (*fit) return cmd_fit(fo, guard);
    if (*mn) return cmd_minimize(mo, guard);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const DimensionMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const NonUnitPoint& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const EmptySample& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const UnknownVariable& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const InfiniteRank& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAlgebra;
  } catch (const ZeroOperator& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAlgebra;
  } catch (const Unsupported& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kAlgebra;
  } catch (const SingularCrossing& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const DenominatorNearZero& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  } catch (const hgd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
  return kInput;
}
