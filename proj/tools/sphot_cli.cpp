// Batch verification harness: runs one suite per invocation and writes a
// JSON report (or a CSV projection of it).

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphot/entropy/formula.hpp"
#include "sphot/fields/io.hpp"
#include "sphot/fields/random.hpp"
#include "sphot/jacobi/lichnerowicz.hpp"
#include "sphot/jacobi/solver.hpp"
#include "sphot/transport/green_bound.hpp"
#include "sphot/transport/io.hpp"

namespace {

using nlohmann::json;
using namespace sphot;

constexpr double kPi = std::numbers::pi;

const std::vector<std::string> kCommands{"geometry-check", "entropy-verify", "talagrand",
                                         "lichnerowicz",   "w1-green",       "jacobi-check"};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string command;
  std::optional<int> grid_colat, grid_lon;
  int dim = 2;
  std::uint64_t seed = 1;
  int degree = 4;
  double u_amplitude = 0.0;
  int samples = 1000;
  std::vector<double> epsilons, taus;
  std::map<std::string, double> tolerances;
  std::string psi, U, mu, nu;
  std::string output;
  std::string format = "json";

  double tol(const std::string& key) const { return tolerances.at(key); }

  GridSpec grid(int colat2, int colat3) const {
    GridSpec g;
    g.dim = dim;
    g.n_colat = grid_colat.value_or(dim == 2 ? colat2 : colat3);
    g.n_lon = grid_lon.value_or(2 * g.n_colat);
    return g;
  }

  json to_json() const {
    json j{{"command", command}, {"dim", dim},         {"seed", seed},          {"degree", degree},
           {"u_amplitude", u_amplitude}, {"samples", samples}, {"tolerances", tolerances},
           {"epsilon_list", epsilons}, {"tau_list", taus}, {"format", format}};
    if (grid_colat) j["grid"]["n_colat"] = *grid_colat;
    if (grid_lon) j["grid"]["n_lon"] = *grid_lon;
    json inputs = json::object();
    for (const auto& [k, v] : {std::pair{"psi", psi}, {"U", U}, {"mu", mu}, {"nu", nu}}) {
      if (!v.empty()) inputs[k] = v;
    }
    j["inputs"] = inputs;
    return j;
  }
};

const std::map<std::string, double> kDefaultTolerances{
    {"roundtrip", 1e-10}, {"cosine", 1e-10},    {"hessian", 1e-10}, {"entropy", 1e-3},
    {"bookkeeping", 1e-12}, {"mass", 1e-6},     {"talagrand", 1e-6}, {"slope", 0.05},
    {"sum_rule", 0.01},   {"lichnerowicz", 0.05}, {"duality", 1e-3}, {"jacobi", 1e-8}};

void apply_config_file(Config& c, const std::string& path) {
  json j;
  try {
    j = read_json_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "grid") {
        for (const auto& [gk, gv] : v.items()) {
          if (gk == "n_colat") c.grid_colat = gv.get<int>();
          else if (gk == "n_lon") c.grid_lon = gv.get<int>();
          else if (gk == "kind") {
            if (gv.get<std::string>() != "gauss_legendre_colatitude") throw ConfigError("only Gauss-Legendre grids");
          } else throw ConfigError("unknown grid key '" + gk + "'");
        }
      } else if (key == "dim") c.dim = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "degree") c.degree = v.get<int>();
      else if (key == "u_amplitude") c.u_amplitude = v.get<double>();
      else if (key == "samples") c.samples = v.get<int>();
      else if (key == "epsilon_list") c.epsilons = v.get<std::vector<double>>();
      else if (key == "tau_list") c.taus = v.get<std::vector<double>>();
      else if (key == "tolerances") {
        for (const auto& [tk, tv] : v.items()) c.tolerances[tk] = tv.get<double>();
      } else if (key == "inputs") {
        for (const auto& [ik, iv] : v.items()) {
          if (ik == "psi") c.psi = iv.get<std::string>();
          else if (ik == "U") c.U = iv.get<std::string>();
          else if (ik == "mu") c.mu = iv.get<std::string>();
          else if (ik == "nu") c.nu = iv.get<std::string>();
          else throw ConfigError("unknown input '" + ik + "'");
        }
      } else if (key == "output") c.output = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void validate(Config& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    throw ConfigError(c.command.empty() ? "no command given" : "unknown command '" + c.command + "'");
  }
  if (c.dim < 2 || c.dim > 5) throw ConfigError("dim must be between 2 and 5");
  if (c.dim > 3 && c.command != "geometry-check" && c.command != "jacobi-check") {
    throw ConfigError("grids exist for S^2 and S^3 only");
  }
  if (c.command == "w1-green" && c.dim != 2) throw ConfigError("w1-green runs on S^2 only");
  if ((c.grid_colat && *c.grid_colat < 2) || (c.grid_lon && *c.grid_lon < 2)) throw ConfigError("grid too small");
  if (c.degree < 1) throw ConfigError("degree must be positive");
  if (c.samples < 1) throw ConfigError("samples must be positive");
  if (!(c.u_amplitude >= 0.0)) throw ConfigError("u_amplitude must be nonnegative");
  if (c.format != "json" && c.format != "csv") throw ConfigError("format must be json or csv");
  for (const auto& [k, v] : c.tolerances) {
    if (!kDefaultTolerances.contains(k)) throw ConfigError("unknown tolerance '" + k + "'");
    if (!(v > 0.0)) throw ConfigError("tolerance '" + k + "' must be positive");
  }
  for (const auto& [k, v] : kDefaultTolerances) c.tolerances.try_emplace(k, v);
  for (double e : c.epsilons)
    if (!(e > 0.0)) throw ConfigError("epsilon values must be positive");
  for (double t : c.taus)
    if (!(t > 0.0)) throw ConfigError("tau values must be positive");
  for (const auto* path : {&c.psi, &c.U, &c.mu, &c.nu}) {
    if (!path->empty() && !std::ifstream(*path)) throw ConfigError("cannot open '" + *path + "'");
  }
}

// Every entry records its value, the tolerance, the relation it checks and the outcome.
class Report {
 public:
  void at_most(const std::string& name, double value, double tol, const std::string& tag) {
    add(name, value, tol, tag, "value <= tolerance", value <= tol);
  }
  void at_least(const std::string& name, double value, double tol, const std::string& tag) {
    add(name, value, tol, tag, "value >= -tolerance", value >= -tol);
  }
  void near(const std::string& name, double value, double target, double tol, const std::string& tag) {
    std::ostringstream c;
    c.precision(17);
    c << "|value - " << target << "| <= tolerance";
    add(name, value, tol, tag, c.str(), std::abs(value - target) <= tol);
  }
  void holds(const std::string& name, double value, bool ok, const std::string& tag, const std::string& criterion) {
    add(name, value, 0.0, tag, criterion, ok);
  }
  void record(const std::string& name, double value, const std::string& tag) {
    add(name, value, 0.0, tag, "recorded", true);
  }

  bool pass() const {
    for (const auto& e : entries_)
      if (!e.at("pass").get<bool>()) return false;
    return true;
  }
  const json& entries() const { return entries_; }

  std::vector<std::string> csv_header;
  std::vector<std::vector<json>> csv_rows;

 private:
  void add(const std::string& name, double value, double tol, const std::string& tag, const std::string& criterion,
           bool ok) {
    if (!std::isfinite(value)) ok = false;
    entries_.push_back({{"name", name},
                        {"value", std::isfinite(value) ? json(value) : json(nullptr)},
                        {"tolerance", tol},
                        {"equation_tag", tag},
                        {"criterion", criterion},
                        {"pass", ok}});
  }
  json entries_ = json::array();
};

template <class F>
auto load_input(F load, const std::string& path) {
  try {
    return load(path);
  } catch (const Error& e) {
    throw ConfigError("'" + path + "': " + e.what());
  }
}

ScalarField psi_base(const Config& c) {
  if (!c.psi.empty()) {
    ScalarField f = load_input(load_field, c.psi);
    if (f.dim() != c.dim) throw ConfigError("psi dimension does not match --dim");
    return f;
  }
  return random_bandlimited(c.dim, {c.degree, c.seed, 1.0});
}

ScalarField potential_U(const Config& c) {
  if (!c.U.empty()) {
    ScalarField f = load_input(load_field, c.U);
    if (f.dim() != c.dim) throw ConfigError("U dimension does not match --dim");
    return f;
  }
  if (c.u_amplitude == 0.0) return ScalarField::zero(c.dim);
  return random_bandlimited(c.dim, {2, c.seed + 1, c.u_amplitude});
}

// A supplied psi is used as is unless epsilons are given; the generated one is scaled.
std::vector<double> epsilon_list(const Config& c, std::vector<double> fallback) {
  if (!c.epsilons.empty()) return c.epsilons;
  if (!c.psi.empty()) return {1.0};
  return fallback;
}

SphereGrid certification_grid(int dim) {
  return dim == 2 ? SphereGrid({GridKind::gauss_legendre_colatitude, 24, 48, 2})
                  : SphereGrid({GridKind::gauss_legendre_colatitude, 6, 12, 3});
}

std::string eps_name(const std::string& base, double v) {
  std::ostringstream s;
  s << base << "[" << v << "]";
  return s.str();
}

void geometry_check(const Config& c, Report& r) {
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto random_point = [&] {
    Vector v(c.dim + 1);
    for (auto& a : v) a = normal(rng);
    return SpherePoint::normalized(v);
  };
  auto random_tangent = [&](const SpherePoint& x, double len) {
    Vector v(c.dim + 1);
    for (auto& a : v) a = normal(rng);
    v -= v.dot(x.coords()) * x.coords();
    return TangentVector(x, len * v.normalized());
  };
  double roundtrip = 0.0, cosine = 0.0, hess = 0.0, jac_lo = 1.0, jac_hi = 0.0;
  const auto spec = CurvatureSpec::constant_sphere(c.dim);
  for (int k = 0; k < c.samples; ++k) {
    const SpherePoint x = random_point();
    const TangentVector tau = random_tangent(x, (kPi - 0.1) * unif(rng));
    const SpherePoint y = exp_map(x, tau);
    roundtrip = std::max(roundtrip, (log_map(x, y).vec() - tau.vec()).norm());
    const double j = jacobian_exp(x, tau);
    jac_lo = std::min(jac_lo, j);
    jac_hi = std::max(jac_hi, j);

    // Cosine rule in the triangle (x, y, z) with the angle at x.
    const TangentVector sigma = random_tangent(x, (kPi - 0.1) * unif(rng));
    const SpherePoint z = exp_map(x, sigma);
    const double a = tau.norm(), b = sigma.norm();
    const double cos_gamma = tau.vec().dot(sigma.vec()) / (a * b);
    const double lhs = std::cos(geodesic_distance(y, z));
    cosine = std::max(cosine, std::abs(lhs - (std::cos(a) * std::cos(b) + std::sin(a) * std::sin(b) * cos_gamma)));

    const double d = 0.1 + (kPi - 0.2) * unif(rng);
    const SpherePoint w = exp_map(x, random_tangent(x, d));
    const TangentFrame frame = TangentFrame::adapted(x, log_map(x, w).vec());
    const Matrix closed = hessian_half_dist_sq(x, w, frame).matrix();
    hess = std::max(hess, (closed - hessian_from_jacobi(spec, d)).cwiseAbs().maxCoeff());
  }
  r.at_most("exp_log_roundtrip_max_error", roundtrip, c.tol("roundtrip"), "exp_log_inverse");
  r.at_most("cosine_rule_max_residual", cosine, c.tol("cosine"), "spherical_cosine_rule");
  r.at_most("hessian_closed_form_vs_jacobi", hess, c.tol("hessian"), "hessian_half_distance_squared");
  r.holds("jacobian_exp_min", jac_lo, jac_lo > 0.0, "exp_jacobian", "0 < value <= 1");
  r.holds("jacobian_exp_max", jac_hi, jac_hi <= 1.0, "exp_jacobian", "0 < value <= 1");
}

void entropy_verify(const Config& c, Report& r) {
  const ScalarField base = psi_base(c);
  const ScalarField U = potential_U(c);
  const GridMeasure mu(SphereGrid(c.grid(128, 24)), U);
  const SphereGrid cert = certification_grid(c.dim);
  for (double eps : epsilon_list(c, {0.05})) {
    const ScalarField psi = base.scaled(eps);
    const auto cc = check_c_concavity(psi, cert);
    r.holds(eps_name("c_concavity_margin", eps), cc.margin, cc.certified, "c_concavity", "certified");
    if (!cc.certified) continue;
    const auto e = entropy_formula_rhs(psi, U, mu);
    r.record(eps_name("direct_entropy", eps), e.direct_entropy, "relative_entropy");
    r.record(eps_name("rhs_total", eps), e.rhs_total, "entropy_formula");
    r.at_most(eps_name("relative_gap", eps), e.relative_gap(), c.tol("entropy"), "entropy_formula");
    r.at_most(eps_name("bookkeeping_residual", eps),
              std::abs(e.rhs_total - (e.trace_term + e.jacobian_term + e.u_line_term)), c.tol("bookkeeping"),
              "entropy_formula");
    r.at_most(eps_name("regrouping_residual", eps), std::abs(e.split_total - e.rhs_total), c.tol("bookkeeping"),
              "carleman_regrouping");
    r.at_most(eps_name("density_mass_deviation", eps), std::abs(e.density_mass - 1.0), c.tol("mass"),
              "pushforward_density");
    r.holds(eps_name("k_term_minus_half_w2", eps), e.k_term - 0.5 * e.w2_squared,
            e.k_term >= 0.5 * e.w2_squared, "k_function_bound", "value >= 0");
  }
}

void talagrand(const Config& c, Report& r) {
  const ScalarField base = psi_base(c);
  const ScalarField U = potential_U(c);
  const GridMeasure mu(SphereGrid(c.grid(32, 8)), U);
  const SphereGrid cert = certification_grid(c.dim);
  r.csv_header = {"epsilon", "kappa", "entropy", "rhs_total", "w2sq", "slack"};
  EntropyOptions opt;
  opt.compute_direct = false;
  for (double eps : epsilon_list(c, {0.1, 0.05, 0.025})) {
    const ScalarField psi = base.scaled(eps);
    const auto t = talagrand_check(psi, U, mu, cert, c.tol("talagrand"), opt);
    const auto e = entropy_formula_rhs(psi, U, mu, opt);
    r.record(eps_name("kappa", eps), t.kappa, "curvature_bound");
    r.record(eps_name("entropy", eps), t.entropy, "relative_entropy");
    r.record(eps_name("w2_squared", eps), t.w2_squared, "transport_cost");
    r.at_least(eps_name("slack", eps), t.slack, c.tol("talagrand"), "talagrand_t2");
    r.csv_rows.push_back({eps, t.kappa, t.entropy, e.rhs_total, t.w2_squared, t.slack});
  }
}

void lichnerowicz(const Config& c, Report& r) {
  const ScalarField psi = psi_base(c);
  const ScalarField U = potential_U(c);
  const GridMeasure mu(SphereGrid(c.grid(48, 8)), U);
  const std::vector<double> taus = c.taus.empty() ? std::vector<double>{0.1, 0.05, 0.025} : c.taus;
  if (taus.size() < 2) throw ConfigError("lichnerowicz needs at least two tau values");
  const auto rows = expansion_sweep(psi, mu, taus);
  r.csv_header = {"tau", "term", "integrated_value", "tau_sq_ratio"};
  for (const auto& row : rows) r.csv_rows.push_back({row.tau, row.term, row.integrated_value, row.tau_sq_ratio});

  for (const std::string term : {"traceIA", "logJexp", "det2"}) {
    std::vector<double> v;
    for (const auto& row : rows)
      if (row.term == term) v.push_back(std::abs(row.integrated_value));
    r.near("slope_" + term, loglog_slope(taus, v), 2.0, c.tol("slope"), "small_tau_expansion");
  }

  const double limit = lichnerowicz_integral(psi, U, mu);
  r.record("lichnerowicz_integral", limit, "lichnerowicz_integral");
  double grad_sq = 0.0;
  for (int i = 0; i < mu.size(); ++i) grad_sq += mu.weight(i) * psi.gradient(mu.grid().point(i)).vec().squaredNorm();

  EntropyOptions opt;
  opt.compute_direct = false;
  std::vector<double> gaps;
  std::size_t smallest = 0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    const double tau = taus[k];
    const auto e = entropy_formula_rhs(psi.scaled(tau), U, mu, opt);
    const double ratio = e.rhs_total / (tau * tau);
    r.record(eps_name("entropy_over_tau_sq", tau), ratio, "lichnerowicz_expansion");
    gaps.push_back(std::abs(ratio - limit) / std::abs(limit));
    if (tau < taus[smallest]) smallest = k;
  }
  r.at_most("relative_gap_smallest_tau", gaps[smallest], c.tol("lichnerowicz"), "lichnerowicz_expansion");
  const double order = loglog_slope(taus, gaps);
  r.holds("gap_convergence_order", order, order >= 1.0, "lichnerowicz_expansion", "value >= 1");

  const double tau = taus[smallest];
  const auto t = small_tau_expansion_terms(psi, tau, mu);
  const double sum_rule = (t.trace_i_minus_a + t.log_j_exp) / (tau * tau * grad_sq * (c.dim - 1));
  r.near("sum_rule", sum_rule, k_leading_coefficient(), c.tol("sum_rule") * k_leading_coefficient(), "k_series");
}

DiscreteMeasure grid_nodes(int n_colat, bool upper_only) {
  const SphereGrid g({GridKind::gauss_legendre_colatitude, n_colat, 2 * n_colat, 2});
  std::vector<double> w(g.size());
  for (int i = 0; i < g.size(); ++i) w[i] = (!upper_only || g.coords(i)(2) > 0.0) ? g.weight(i) : 0.0;
  return DiscreteMeasure::normalized(g.points(), w).support();
}

void w1_green(const Config& c, Report& r) {
  // Default pair: uniform against the uniform measure on the upper hemisphere.
  const DiscreteMeasure mu = c.mu.empty() ? grid_nodes(8, false) : load_input(load_measure, c.mu);
  const DiscreteMeasure nu = c.nu.empty() ? grid_nodes(8, true) : load_input(load_measure, c.nu);
  if (mu.dim() != 2 || nu.dim() != 2) throw ConfigError("w1-green measures must live on S^2");
  const GridSpec spec = c.grid(24, 24);
  const auto b = green_w1_bound(mu, nu, spec);
  r.record("w1_lhs", b.lhs, "green_w1_bound");
  r.record("w1_rhs", b.rhs, "green_w1_bound");
  r.record("mollification_radius", b.mollification_radius, "green_w1_bound");
  r.holds("rhs_minus_lhs", b.rhs - b.lhs, b.lhs <= b.rhs, "green_w1_bound", "value >= 0");
  const ScalarField phi = ScalarField::from_function(2, [](const auto* X) { return X[2]; });
  const auto d = green_duality_residual(phi, mu, nu, spec);
  r.at_most("duality_residual", d.residual, c.tol("duality"), "green_duality");
}

void jacobi_check(const Config& c, Report& r) {
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  const std::vector<int> dims = c.dim == 2 ? std::vector<int>{2, 3, 5} : std::vector<int>{c.dim};
  double err = 0.0, hess = 0.0;
  const int cases = std::max(1, c.samples / 50);
  for (int n : dims) {
    const auto spec = CurvatureSpec::constant_sphere(n);
    for (int k = 0; k < cases; ++k) {
      const double speed = unif(rng);
      Vector w(n);
      for (auto& a : w) a = normal(rng);
      const BlockState a = jacobi_solve(spec, w, speed);
      const BlockState b = jacobi_rk4(spec, Vector::Zero(n), w, speed);
      err = std::max({err, (a.Y - b.Y).cwiseAbs().maxCoeff(), (a.V - b.V).cwiseAbs().maxCoeff()});
      Matrix expected = Matrix::Identity(n, n) * numeric::t_over_tan(speed);
      expected(0, 0) = 1.0;
      hess = std::max(hess, (hessian_from_jacobi(spec, speed) - expected).cwiseAbs().maxCoeff());
    }
  }
  r.at_most("closed_form_vs_rk4", err, c.tol("jacobi"), "jacobi_equation");
  r.at_most("hessian_from_jacobi_vs_closed_form", hess, c.tol("hessian"), "first_variation");
}

std::string csv_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_null()) return "nan";
  return v.dump();
}

std::string render(const Config& c, const json& report, const Report& r) {
  if (c.format == "json") return report.dump(2) + "\n";
  std::ostringstream out;
  if (!r.csv_header.empty()) {
    for (std::size_t i = 0; i < r.csv_header.size(); ++i) out << (i ? "," : "") << r.csv_header[i];
    out << '\n';
    for (const auto& row : r.csv_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
      out << '\n';
    }
    return out.str();
  }
  out << "name,value,tolerance,equation_tag,pass\n";
  for (const auto& e : report["entries"]) {
    out << csv_cell(e["name"]) << ',' << csv_cell(e["value"]) << ',' << csv_cell(e["tolerance"]) << ','
        << csv_cell(e["equation_tag"]) << ',' << csv_cell(e["pass"]) << '\n';
  }
  return out.str();
}

void emit(const Config& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.output, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + c.output + "'");
  f << text;
}

const char* kFooter = R"(Commands:
  geometry-check  exp/log roundtrip, cosine rule, closed-form vs Jacobi Hessian
  entropy-verify  direct entropy of the pushforward vs the assembled formula
  talagrand       Ent - (kappa/2) W2^2 >= 0 for each epsilon
  lichnerowicz    small-tau expansion terms, slopes, sum rule, limit of Ent/tau^2
  w1-green        W1 <= int |grad G(mu - nu)| and the Green duality residual
  jacobi-check    closed-form Jacobi fields vs RK4, Hessian from first variation

Config file (JSON; command-line flags override it):
  {"command": ..., "grid": {"n_colat": N, "n_lon": M}, "dim": n, "seed": s,
   "degree": L, "u_amplitude": a, "samples": k, "epsilon_list": [...],
   "tau_list": [...], "tolerances": {"entropy": 1e-3, ...},
   "inputs": {"psi": path, "U": path, "mu": path, "nu": path},
   "output": path, "format": "json"|"csv"}
  Tolerance keys: roundtrip cosine hessian entropy bookkeeping mass talagrand
  slope sum_rule lichnerowicz duality jacobi.

Report (JSON): {"command", "config", "entries": [{"name", "value",
  "tolerance", "equation_tag", "criterion", "pass"}], "pass", "error"?}

CSV projections:
  talagrand     epsilon,kappa,entropy,rhs_total,w2sq,slack
  lichnerowicz  tau,term,integrated_value,tau_sq_ratio
  other         name,value,tolerance,equation_tag,pass

Exit codes: 0 all checks pass, 1 a check failed or a computation raised an
error (the report is still written), 2 invalid configuration.)";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal transport and entropy verification on spheres", "sphot"};
  app.footer(kFooter);
  Config cli;
  std::string config_path;
  std::string command;
  std::optional<int> colat, lon, dim, degree, samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_entropy, u_amp;
  std::optional<std::string> output, format;
  app.add_option("command", command, "Suite to run")->check(CLI::IsMember(kCommands));
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--grid-colat", colat, "Colatitude nodes of the quadrature grid");
  app.add_option("--grid-lon", lon, "Longitude nodes (default: twice the colatitude nodes)");
  app.add_option("--dim", dim, "Sphere dimension n of S^n");
  app.add_option("--seed", seed, "Seed of the generated test fields");
  app.add_option("--degree", degree, "Degree of the generated potential psi");
  app.add_option("--u-amplitude", u_amp, "Largest gradient of the generated U (0: uniform measure)");
  app.add_option("--samples", samples, "Random cases for geometry-check and jacobi-check");
  app.add_option("--eps", cli.epsilons, "Scales applied to psi");
  app.add_option("--tau", cli.taus, "tau values for the lichnerowicz sweep");
  app.add_option("--tol-entropy", tol_entropy, "Relative tolerance of the entropy formula check");
  app.add_option("--psi", cli.psi, "Field JSON for psi");
  app.add_option("--U", cli.U, "Field JSON for U");
  app.add_option("--mu", cli.mu, "Measure JSON for mu");
  app.add_option("--nu", cli.nu, "Measure JSON for nu");
  app.add_option("--output", output, "Report path (default: stdout)");
  app.add_option("--format", format, "json or csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Config c;
  json report{{"command", nullptr}};
  Report r;
  try {
    if (!config_path.empty()) apply_config_file(c, config_path);
    if (!command.empty()) c.command = command;
    if (colat) c.grid_colat = colat;
    if (lon) c.grid_lon = lon;
    if (dim) c.dim = *dim;
    if (seed) c.seed = *seed;
    if (degree) c.degree = *degree;
    if (u_amp) c.u_amplitude = *u_amp;
    if (samples) c.samples = *samples;
    if (!cli.epsilons.empty()) c.epsilons = cli.epsilons;
    if (!cli.taus.empty()) c.taus = cli.taus;
    if (tol_entropy) c.tolerances["entropy"] = *tol_entropy;
    for (auto [dst, src] : {std::pair{&c.psi, &cli.psi}, {&c.U, &cli.U}, {&c.mu, &cli.mu}, {&c.nu, &cli.nu}}) {
      if (!src->empty()) *dst = *src;
    }
    if (output) c.output = *output;
    if (format) c.format = *format;
    validate(c);
  } catch (const std::exception& e) {
    std::cerr << "sphot: configuration error: " << e.what() << '\n';
    return 2;
  }

  report["command"] = c.command;
  report["config"] = c.to_json();
  int code = 0;
  try {
    if (c.command == "geometry-check") geometry_check(c, r);
    else if (c.command == "entropy-verify") entropy_verify(c, r);
    else if (c.command == "talagrand") talagrand(c, r);
    else if (c.command == "lichnerowicz") lichnerowicz(c, r);
    else if (c.command == "w1-green") w1_green(c, r);
    else jacobi_check(c, r);
    code = r.pass() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "sphot: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    report["error"] = e.what();
    std::cerr << "sphot: " << e.what() << '\n';
    code = 1;
  }
  report["entries"] = r.entries();
  report["pass"] = code == 0;
  try {
    emit(c, render(c, report, r));
  } catch (const std::exception& e) {
    std::cerr << "sphot: " << e.what() << '\n';
    return 2;
  }
  return code;
}
