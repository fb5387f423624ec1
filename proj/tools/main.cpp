#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "ricyl/deformation_solver.hpp"
#include "ricyl/divergence_solver.hpp"
#include "ricyl/green_kernel.hpp"
#include "ricyl/json_io.hpp"
#include "ricyl/mode_ode.hpp"
#include "ricyl/three_circles.hpp"
#include "ricyl/validation.hpp"

#ifndef RICYL_VERSION
#define RICYL_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace ricyl;
using namespace ricyl::io;

namespace {

enum Exit { kOk = 0, kInternal = 1, kInvalidInput = 2, kCertificate = 3 };

int g_log_level = 2;  // 0 error, 1 warn, 2 info, 3 debug

void log(int level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= g_log_level) std::cerr << "[ricyl " << names[level] << "] " << msg << "\n";
}

// JSON numbers cannot hold inf/nan
json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

struct Run {
  std::string task;
  json config;  // resolved, echoed in the manifest
  std::uint64_t seed = 0;
  int threads = 1;
  std::string extra_inputs;  // contents of referenced files, part of the digest
  json outputs = json::object();
  json series = json::object();
  json certificates = json::array();

  void certify(const std::string& name, double value, double threshold, bool pass) {
    certificates.push_back({{"name", name}, {"value", num(value)}, {"threshold", num(threshold)}, {"pass", pass}});
  }
  bool certified() const {
    for (const auto& c : certificates)
      if (!c["pass"].get<bool>()) return false;
    return true;
  }
};

std::string default_out_dir() {
  const char* env = std::getenv("RICYL_OUT_DIR");
  return env && *env ? env : ".";
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << text;
}

// Fills missing keys of `section` from defaults; every default ends up in the echoed config.
void fill(json& cfg, const std::string& section, const json& defaults) {
  json& s = cfg[section];
  if (s.is_null()) s = json::object();
  if (!s.is_object()) throw ConfigError(section + ": expected a section");
  for (auto it = defaults.begin(); it != defaults.end(); ++it)
    if (!s.contains(it.key())) s[it.key()] = it.value();
}

void fill_cross_section(json& cfg) {
  fill(cfg, "cross_section", {{"dim", 2}, {"lengths", {2 * M_PI, 2 * M_PI}}, {"cutoff", 1}});
}

FitWindow window_from(const json& s, const std::string& sec) {
  FitWindow w;
  w.a = get_double(s, "window_a");
  w.b = get_double(s, "window_b");
  w.points = get_int(s, "window_points");
  if (!(w.b > w.a) || w.points < 4) throw ConfigError(sec + ": invalid fit window");
  return w;
}

ModeExpansion field_from(Run& run, const TorusCrossSection& cs, const std::string& key, int rank) {
  if (!run.config.contains(key)) throw ConfigError("missing section '" + key + "'");
  auto f = expansion_from_json(run.config[key], cs.lengths, key);
  if (f.rank() != rank) throw ConfigError(key + ".rank: expected " + std::to_string(rank));
  return f;
}

// ---- tasks ----

void task_spectrum(Run& run) {
  fill_cross_section(run.config);
  fill(run.config, "spectrum", {{"rank", "all"}, {"quadrature_points", 16}});
  auto cs = cross_section_from_json(run.config);
  std::string rank = get_string(run.config, "spectrum.rank");
  int nq = get_int(run.config, "spectrum.quadrature_points");
  std::vector<ModeKind> kinds;
  if (rank == "all" || rank == "scalar" || rank == "0") kinds.push_back(ModeKind::Scalar);
  if (rank == "all" || rank == "oneform" || rank == "1") {
    kinds.push_back(ModeKind::HarmonicOneForm);
    kinds.push_back(ModeKind::CoclosedOneForm);
  }
  if (rank == "all" || rank == "tt" || rank == "2") kinds.push_back(ModeKind::TTTensor);
  if (kinds.empty()) throw ConfigError("spectrum.rank: expected scalar|oneform|tt|all");

  json modes = json::array();
  double ortho = 0.0;
  for (ModeKind k : kinds) {
    auto sp = build_spectrum(cs, k);
    for (const auto& m : sp.modes) modes.push_back(mode_to_json(m));
    // orthonormality of the first few modes of each kind against quadrature
    int lim = std::min<int>(6, sp.modes.size());
    for (int i = 0; i < lim; ++i)
      for (int j = 0; j < lim; ++j) {
        double ip = l2_inner_product_quadrature(cs, sp.modes[i], sp.modes[j], nq);
        ortho = std::max(ortho, std::abs(ip - (i == j ? 1.0 : 0.0)));
      }
  }
  run.outputs["mu1"] = spectral_gap(cs);
  run.outputs["count"] = modes.size();
  run.outputs["modes"] = modes;
  run.certify("orthonormality", ortho, 1e-10, ortho <= 1e-10);
}

void task_solve_div(Run& run) {
  fill_cross_section(run.config);
  fill(run.config, "solve_div",
       {{"tau", 0.01}, {"rho", 0.0}, {"route", "kernel"}, {"window_a", 0.0}, {"window_b", 10.0},
        {"tolerance", 1e-8}});
  auto cs = cross_section_from_json(run.config);
  const json& s = run.config["solve_div"];
  DivergenceConfig dc;
  dc.tau = get_double(s, "tau");
  dc.rho = get_double(s, "rho");
  std::string route = get_string(s, "route");
  if (route == "kernel") dc.route = InfiniteRoute::Kernel;
  else if (route == "vop") dc.route = InfiniteRoute::VariationOfParameters;
  else throw ConfigError("solve_div.route: expected kernel|vop");
  for (const auto& m : build_spectrum(cs, ModeKind::Scalar).modes) dc.spectrum.push_back(m.mu);
  auto src = field_from(run, cs, "source", 2);
  double a = get_double(s, "window_a"), b = get_double(s, "window_b"), tol = get_double(s, "tolerance");

  GaugeField X = solve_gauge(src, dc);
  json sectors = json::array();
  for (const auto& [key, sec] : X.sector) {
    json e = {{"k", key.k}, {"phase", to_string(key.phase)}, {"sector", to_string(sec)}};
    auto g = X.growth.find(key);
    if (g != X.growth.end()) e["growth"] = to_string(g->second);
    sectors.push_back(e);
  }
  run.outputs["gauge_field"] = expansion_to_json(X.one_form);
  run.outputs["sectors"] = sectors;
  double res = gauge_residual(X, src, dc.tau, a, b);
  double scale = std::max(1.0, ops::modified_divergence(src, dc.tau).coefficient_sup(a, b));
  run.outputs["residual"] = res;
  run.certify("gauge_residual", res / scale, tol, res / scale <= tol);
}

void task_solve_deform(Run& run) {
  fill_cross_section(run.config);
  fill(run.config, "solve_deform", {{"tau", 0.01}, {"parallel_only", false}, {"tolerance", 1e-10}});
  auto cs = cross_section_from_json(run.config);
  const json& s = run.config["solve_deform"];
  double tau = get_double(s, "tau"), tol = get_double(s, "tolerance");
  if (!s["parallel_only"].is_boolean()) throw ConfigError("solve_deform.parallel_only: expected a boolean");
  bool par_only = s["parallel_only"].get<bool>();

  auto sys = solve_reduced_system(cs, tau, par_only);
  run.outputs["tau"] = tau;
  run.outputs["parallel_dimension"] = sys.parallel_dimension;
  run.outputs["parallel_expected"] = sys.parallel_expected;
  run.certify("parallel_dimension", sys.parallel_dimension, sys.parallel_expected,
              sys.parallel_dimension == sys.parallel_expected);
  json sectors = json::array();
  double worst = 0.0;
  for (const auto& sec : sys.sectors) {
    sectors.push_back({{"k", sec.k}, {"mu", sec.mu}, {"ansatz", sec.ansatz}, {"dimension", sec.dimension},
                       {"expected", sec.expected}});
    for (const auto& h : sec.basis) {
      double sc = std::max(1e-300, h.coefficient_sup(0, 2));
      worst = std::max(worst, linearized_ricci(h).coefficient_sup(0, 2) / sc);
      worst = std::max(worst, ops::modified_divergence(h, tau).coefficient_sup(0, 2) / sc);
    }
    run.certify("sector_dimension_" + json(sec.k).dump(), sec.dimension, sec.expected,
                sec.dimension == sec.expected);
  }
  run.outputs["sectors"] = sectors;
  run.certify("basis_residual", worst, tol, worst <= tol);

  // optional trace absorption
  if (run.config.contains("trace")) {
    const json& tr = run.config["trace"];
    if (!tr.is_array()) throw ConfigError("trace: expected an array of {k, phase, plus, minus}");
    std::map<FourierKey, ExpCoeffs> coeffs;
    for (std::size_t i = 0; i < tr.size(); ++i) {
      std::string w = "trace[" + std::to_string(i) + "]";
      std::vector<int> k = tr[i].at("k").get<std::vector<int>>();
      if ((int)k.size() != cs.dim) throw ConfigError(w + ".k: wrong length");
      Phase ph = phase_from_string(tr[i].value("phase", "cos"));
      int sg = 1;
      k = canonicalize(k, &sg);
      double f = ph == Phase::Sin ? sg : 1.0;
      coeffs[{k, ph}] = {f * tr[i].value("plus", 0.0), f * tr[i].value("minus", 0.0)};
    }
    auto ta = trace_absorption_field(cs.lengths, coeffs);
    ModeExpansion target(cs.lengths, 0);
    for (const auto& [key, c] : coeffs) {
      double q = std::sqrt(cs.eigenvalue(key.k));
      target.add(key, 0, RadialProfile::exponential(c.plus, q) + RadialProfile::exponential(c.minus, -q));
    }
    double scale = std::max(1e-300, target.coefficient_sup(0, 2));
    double err = (ops::trace(ta.lie) - target).coefficient_sup(0, 2) / scale;
    double div = ops::divergence(ta.lie).coefficient_sup(0, 2) / scale;
    run.outputs["trace_absorption"] = {{"X", expansion_to_json(ta.X.one_form)}, {"trace_error", err},
                                       {"divergence", div}};
    run.certify("trace_reproduction", err, 1e-10, err <= 1e-10);
    run.certify("trace_divergence_free", div, 1e-10, div <= 1e-10);
  }
}

json coeffs_json(const std::map<ModeLabel, ExpCoeffs>& m) {
  json out = json::array();
  for (const auto& [label, c] : m)
    out.push_back({{"mode", to_string(label)},
                   {"kind", to_string(label.kind)},
                   {"k", label.key.k},
                   {"phase", to_string(label.key.phase)},
                   {"pol_index", label.pol_index},
                   {"plus", c.plus},
                   {"minus", c.minus}});
  return out;
}

void task_kernel_classify(Run& run) {
  fill_cross_section(run.config);
  fill(run.config, "kernel_classify",
       {{"tau", 0.0}, {"window_a", 0.0}, {"window_b", 2.0}, {"window_points", 24}, {"tolerance", 1e-8}});
  auto cs = cross_section_from_json(run.config);
  const json& s = run.config["kernel_classify"];
  double tau = get_double(s, "tau"), tol = get_double(s, "tolerance");
  auto w = window_from(s, "kernel_classify");
  auto h = field_from(run, cs, "field", 2);
  auto kd = classify_kernel(h, tau, w, tol);
  json trace_x = json::array();
  for (const auto& [key, c] : kd.gauge_X.coeffs)
    trace_x.push_back({{"k", key.k}, {"phase", to_string(key.phase)}, {"plus", c.plus}, {"minus", c.minus}});
  run.outputs["decomposition"] = {
      {"tau", tau},
      {"gauge_X", {{"trace_coefficients", trace_x}, {"field", expansion_to_json(kd.gauge_X.X.one_form)}}},
      {"gauge_Y",
       {{"c", kd.gauge_Y.c}, {"c_prime", kd.gauge_Y.c_prime}, {"eta", kd.gauge_Y.eta}, {"eta_tau", kd.gauge_Y.eta_tau}}},
      {"a", kd.a},
      {"a_tilde", kd.a_tilde},
      {"parallel_TT", kd.parallel_TT},
      {"linear_TT", kd.linear_TT},
      {"exp_modes", coeffs_json(kd.exp_modes)},
      {"exp_gauge", coeffs_json(kd.exp_gauge)},
      {"osc_modes", coeffs_json(kd.osc_modes)},
  };
  run.outputs["condition"] = kd.condition;
  run.certify("ricci_residual", kd.ricci_residual, tol, kd.ricci_residual <= tol);
  run.certify("divergence_residual", kd.divergence_residual, tol, kd.divergence_residual <= tol);
  run.certify("fit_residual", kd.fit_residual, tol, kd.fit_residual <= tol);
  run.certify("reconstruction_error", kd.reconstruction_error, 1e-10, kd.reconstruction_error <= 1e-10);
}

void task_three_circles(Run& run, std::mt19937_64& rng) {
  fill_cross_section(run.config);
  auto cs = cross_section_from_json(run.config);
  double mu1 = spectral_gap(cs);
  fill(run.config, "three_circles",
       {{"L", 1.0},
        {"beta", 0.5 * std::sqrt(mu1)},
        {"beta_prime", 0.01},
        {"triples", json::array({json::array({0, 1, 2})})},
        {"tau", 0.0},
        {"mode_file", ""},
        {"random_modes", 5}});
  json& s = run.config["three_circles"];
  s["mu1"] = mu1;
  ThreeCirclesParams base;
  base.mu1 = mu1;
  base.L = get_double(s, "L");
  base.beta = get_double(s, "beta");
  base.beta_prime = get_double(s, "beta_prime");
  double tau = get_double(s, "tau");
  std::vector<std::vector<int>> triples;
  if (s["triples"].is_string()) {
    triples = parse_int_rows(s["triples"].get<std::string>());
    s["triples"] = triples;
  } else {
    triples = s["triples"].get<std::vector<std::vector<int>>>();
  }
  if (triples.empty()) throw ConfigError("three_circles.triples: empty");

  ModeExpansion h;
  std::string mode_file = get_string(s, "mode_file");
  if (!mode_file.empty()) {
    std::string text = read_file(mode_file);
    run.extra_inputs += text;
    json mj;
    try {
      mj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(mode_file + ": " + e.what());
    }
    h = expansion_from_json(mj.contains("field") ? mj["field"] : mj, cs.lengths, mode_file);
  } else if (run.config.contains("field")) {
    h = expansion_from_json(run.config["field"], cs.lengths, "field");
  } else {
    h = random_kernel_form(cs, rng, get_int(s, "random_modes"), true);
    run.outputs["generated_field"] = expansion_to_json(h);
  }
  if (h.rank() != 2) throw RankMismatch("three-circles needs a 2-tensor field");
  h = project_out_parallel(h, tau);

  json results = json::array();
  int tmax = 0;
  bool all = true;
  for (const auto& t : triples) {
    if (t.size() != 3) throw ConfigError("three_circles.triples: each triple needs three offsets");
    ThreeCirclesParams p = base;
    p.t1 = t[0];
    p.t2 = t[1];
    p.t3 = t[2];
    validate(p);
    auto r = three_circles_check(h, p);
    all = all && r.holds;
    tmax = std::max(tmax, t[2]);
    results.push_back({{"triple", t},
                       {"holds", r.holds},
                       {"slack", num(r.slack)},
                       {"n1", r.n1},
                       {"n2", r.n2},
                       {"n3", r.n3},
                       {"beta_prime_bound", beta_prime_bound(p.beta, p.L, p.t2, p.t3)}});
  }
  run.outputs["results"] = results;
  std::vector<int> offs;
  for (int j = 0; j <= tmax + 1; ++j) offs.push_back(j);
  auto ser = tube_norm_series(h, base.L, offs);
  run.series["tube-norm-series"] = {{"columns", {"t_j", "norm_sq"}}, {"t_j", ser.offsets}, {"norm_sq", ser.values}};
  run.certify("three_circles_all_triples", (double)results.size(), (double)results.size(), all);
}

void task_validate(Run& run) {
  fill_cross_section(run.config);
  OracleSuiteConfig def;
  fill(run.config, "validate",
       {{"grid", {def.nr, def.nx}},
        {"order", def.order},
        {"a", def.a},
        {"b", def.b},
        {"epsilon", def.epsilon},
        {"remainder_grid", {def.remainder_nr, def.remainder_nx}},
        {"remainder_order", def.remainder_order},
        {"report", ""}});
  auto cs = cross_section_from_json(run.config);
  json& s = run.config["validate"];
  if (s["grid"].is_string()) {
    auto g = parse_int_rows(s["grid"].get<std::string>());
    if (g.size() != 1 || g[0].size() != 2) throw ConfigError("validate.grid: expected 'nr,nx'");
    s["grid"] = g[0];
  }
  OracleSuiteConfig oc;
  oc.lengths = cs.lengths;
  auto grid = s["grid"].get<std::vector<int>>();
  auto rgrid = s["remainder_grid"].get<std::vector<int>>();
  if (grid.size() != 2 || rgrid.size() != 2) throw ConfigError("validate.grid: expected [nr, nx]");
  oc.nr = grid[0];
  oc.nx = grid[1];
  oc.remainder_nr = rgrid[0];
  oc.remainder_nx = rgrid[1];
  oc.order = get_int(s, "order");
  oc.remainder_order = get_int(s, "remainder_order");
  oc.a = get_double(s, "a");
  oc.b = get_double(s, "b");
  oc.epsilon = get_doubles(s, "epsilon");
  if (oc.order != 2 && oc.order != 4) throw ConfigError("validate.order: expected 2 or 4");

  auto rep = run_oracle_suite(oc);
  json checks = json::array();
  for (const auto& c : rep.checks) {
    json e = {{"name", c.name}, {"value", num(c.value)}, {"threshold", num(c.threshold)}, {"pass", c.pass}};
    if (c.coarse != 0.0 || c.fine != 0.0) {
      e["coarse_error"] = c.coarse;
      e["fine_error"] = c.fine;
    }
    checks.push_back(e);
    run.certify(c.name, c.value, c.threshold, c.pass);
  }
  run.outputs["checks"] = checks;
  run.outputs["remainder_slope"] = rep.remainder.slope;
  run.series["remainder-scan"] = {{"columns", {"epsilon", "remainder_norm"}},
                                  {"epsilon", rep.remainder.epsilon},
                                  {"remainder_norm", rep.remainder.remainder}};
  std::string report = get_string(s, "report");
  if (!report.empty()) write_file(report, json({{"checks", checks}, {"all_pass", rep.all_pass()}}).dump(2) + "\n");
}

void task_bound_fit(Run& run) {
  fill_cross_section(run.config);
  fill(run.config, "bound_fit",
       {{"rho_fraction", {0.5, 0.8, 0.9, 0.95, 0.99}}, {"type", "one-form"}, {"k", 0}, {"mu1", 0.0}});
  auto cs = cross_section_from_json(run.config);
  json& s = run.config["bound_fit"];
  double mu1 = get_double(s, "mu1");
  if (mu1 <= 0.0) {
    mu1 = spectral_gap(cs);
    s["mu1"] = mu1;
  }
  std::string type = get_string(s, "type");
  SourceType st;
  if (type == "one-form") st = SourceType::OneForm;
  else if (type == "function") st = SourceType::Function;
  else throw ConfigError("bound_fit.type: expected one-form|function");
  std::vector<double> rho;
  for (double f : get_doubles(s, "rho_fraction")) {
    if (!(f > 0.0 && f < 1.0)) throw ConfigError("bound_fit.rho_fraction: entries must lie in (0,1)");
    rho.push_back(f * std::sqrt(mu1));
  }
  auto fit = estimate_weighted_bound(mu1, rho, st, get_int(s, "k"));
  double limit = st == SourceType::OneForm ? 1.15 : 2.15;
  run.outputs["exponent"] = fit.p;
  run.outputs["intercept"] = fit.intercept;
  run.outputs["mu1"] = mu1;
  run.series["bound-fit"] = {
      {"columns", {"rho", "ratio", "log_gap"}}, {"rho", fit.rho}, {"ratio", fit.ratio}, {"log_gap", fit.log_gap}};
  run.certify("exponent", fit.p, limit, fit.p <= limit);
}

void task_ode_check(Run& run) {
  fill(run.config, "ode_check", {{"mu", 1.0}, {"system", "4x4"}, {"r_min", -10.0}, {"r_max", 10.0}, {"samples", 50}});
  const json& s = run.config["ode_check"];
  double mu = get_double(s, "mu");
  std::string sys_name = get_string(s, "system");
  OdeSystem sys;
  if (sys_name == "2x2") sys = OdeSystem::Scalar2x2;
  else if (sys_name == "4x4") sys = OdeSystem::Mixed4x4;
  else throw ConfigError("ode_check.system: expected 2x2|4x4");
  if (mu < 0.0) throw InvalidArgument("ode_check.mu: must be >= 0");
  double r0 = get_double(s, "r_min"), r1 = get_double(s, "r_max");
  int ns = get_int(s, "samples");
  if (ns < 2 || !(r1 > r0)) throw ConfigError("ode_check: invalid sample range");
  Eigen::MatrixXd A = system_matrix(sys, mu);
  double dres = 0.0, ires = 0.0;
  for (int i = 0; i < ns; ++i) {
    double r = r0 + (r1 - r0) * i / (ns - 1);
    Eigen::MatrixXd P = fundamental_matrix(sys, mu, r), Pi = fundamental_matrix_inverse(sys, mu, r);
    Eigen::MatrixXd D = fundamental_matrix_derivative_fd(sys, mu, r);
    dres = std::max(dres, (D - A * P).norm() / std::max(1.0, P.norm()));
    int n = P.rows();
    ires = std::max(ires, (P * Pi - Eigen::MatrixXd::Identity(n, n)).norm() / std::max(1.0, P.norm() * Pi.norm()));
  }
  json roots = json::array();
  for (const auto& c : check_characteristic(mu, sys))
    roots.push_back({{"root", c.root}, {"algebraic", c.algebraic}, {"geometric", c.geometric}});
  run.outputs["derivative_residual"] = dres;
  run.outputs["inverse_residual"] = ires;
  run.outputs["characteristic_roots"] = roots;
  run.certify("derivative_residual", dres, 1e-8, dres <= 1e-8);
  run.certify("inverse_residual", ires, 1e-12, ires <= 1e-12);
}

// ---- export ----

void export_csv(const std::string& envelope_path, const std::string& kind, const std::string& out) {
  json env;
  try {
    env = json::parse(read_file(envelope_path));
  } catch (const json::parse_error& e) {
    throw ConfigError(envelope_path + ": " + e.what());
  }
  if (!env.contains("series") || !env["series"].contains(kind))
    throw MissingSeries("envelope '" + envelope_path + "' has no '" + kind + "' series");
  const json& s = env["series"][kind];
  auto cols = s.at("columns").get<std::vector<std::string>>();
  std::size_t rows = s.at(cols[0]).size();
  std::ostringstream csv;
  csv.precision(17);
  for (std::size_t c = 0; c < cols.size(); ++c) csv << (c ? "," : "") << cols[c];
  csv << "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const json& v = s[cols[c]].at(i);
      csv << (c ? "," : "");
      if (v.is_number_integer()) csv << v.get<long long>();
      else if (v.is_number()) csv << v.get<double>();
      else csv << v.get<std::string>();
    }
    csv << "\n";
  }
  write_file(out, csv.str());
}

void write_series_csv(const json& series, const std::string& kind, const std::string& envelope_path) {
  if (!series.contains(kind)) return;
  // the envelope is already on disk; reuse the export path
  fs::path p(envelope_path);
  std::string csv = (p.parent_path() / (p.stem().string() + "." + kind + ".csv")).string();
  export_csv(envelope_path, kind, csv);
  log(2, "wrote " + csv);
}

int exit_code_for(const Error& e) {
  std::string n = e.name();
  if (n == "NotInKernel" || n == "NonHarmonicTrace" || n == "NotPositiveDefinite") return kCertificate;
  return kInvalidInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear analysis toolkit for Ricci-flat metrics on flat cylinders R x T^d"};
  app.set_version_flag("--version", RICYL_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, log_level = "info";
  std::uint64_t seed = 0;
  int threads = 1;
  app.add_option("--config", config_path, "Config file (JSON or sectioned text)");
  app.add_option("--out", out_path, "Output path (default: $RICYL_OUT_DIR/<task>.json)");
  app.add_option("--seed", seed, "Seed of the single random generator");
  app.add_option("--threads", threads, "Worker threads (the build is serial; recorded only)")->check(CLI::PositiveNumber);
  app.add_option("--log-level", log_level, "error|warn|info|debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

  json overrides = json::object();
  auto opt = [&](CLI::App* sc, const std::string& flag, const std::string& section, const std::string& key,
                 const std::string& help, auto conv) {
    sc->add_option_function<std::string>(
        flag, [&overrides, section, key, conv](const std::string& v) { overrides[section][key] = conv(v); }, help);
  };
  auto as_num = [](const std::string& v) {
    auto d = parse_doubles(v);
    if (d.size() != 1) throw ConfigError("expected a single number, got '" + v + "'");
    return json(d[0]);
  };
  auto as_int = [](const std::string& v) {
    auto r = parse_int_rows(v);
    if (r.size() != 1 || r[0].size() != 1) throw ConfigError("expected an integer, got '" + v + "'");
    return json(r[0][0]);
  };
  auto as_str = [](const std::string& v) { return json(v); };
  auto as_list = [](const std::string& v) { return json(parse_doubles(v)); };

  auto* spectrum = app.add_subcommand("spectrum", "List eigenmodes of the flat torus cross-section");
  opt(spectrum, "--dim", "cross_section", "dim", "Torus dimension", as_int);
  opt(spectrum, "--lengths", "cross_section", "lengths", "Comma-separated side lengths", as_list);
  opt(spectrum, "--cutoff", "cross_section", "cutoff", "Frequency cutoff", as_int);
  opt(spectrum, "--rank", "spectrum", "rank", "scalar|oneform|tt|all", as_str);

  auto* solve_div = app.add_subcommand("solve-div", "Solve the divergence gauge equation");
  opt(solve_div, "--tau", "solve_div", "tau", "Gauge parameter", as_num);
  opt(solve_div, "--rho", "solve_div", "rho", "Weight exponent", as_num);
  solve_div->add_flag_function("--green", [&](int64_t) { overrides["solve_div"]["route"] = "kernel"; },
                               "Use Green kernel convolution on the mu > 0 sectors");
  opt(solve_div, "--route", "solve_div", "route", "kernel|vop", as_str);

  auto* solve_deform = app.add_subcommand("solve-deform", "Solve the reduced Einstein system per frequency");
  opt(solve_deform, "--tau", "solve_deform", "tau", "Gauge parameter", as_num);

  auto* classify = app.add_subcommand("kernel-classify", "Decompose a kernel element");
  opt(classify, "--tau", "kernel_classify", "tau", "Gauge parameter", as_num);

  auto* tc = app.add_subcommand("three-circles", "Check the three-circles inequality on tube norms");
  opt(tc, "--mode-file", "three_circles", "mode_file", "Field as a JSON mode/profile list", as_str);
  opt(tc, "--L", "three_circles", "L", "Tube length", as_num);
  opt(tc, "--beta", "three_circles", "beta", "beta in (0, sqrt(mu1))", as_num);
  opt(tc, "--beta-prime", "three_circles", "beta_prime", "beta'", as_num);
  opt(tc, "--triples", "three_circles", "triples", "t1,t2,t3[;...]", as_str);

  auto* val = app.add_subcommand("validate", "Run the finite-difference oracle suite");
  opt(val, "--grid", "validate", "grid", "nr,nx", as_str);
  opt(val, "--order", "validate", "order", "Stencil order (2 or 4)", as_int);
  opt(val, "--report", "validate", "report", "Path of the JSON residual report", as_str);

  auto* bf = app.add_subcommand("bound-fit", "Fit the weighted-bound blow-up exponent");
  opt(bf, "--type", "bound_fit", "type", "one-form|function", as_str);
  opt(bf, "--mu1", "bound_fit", "mu1", "Spectral gap (default: from cross-section)", as_num);
  opt(bf, "--rho-fraction", "bound_fit", "rho_fraction", "Comma-separated rho/sqrt(mu1)", as_list);

  auto* ode = app.add_subcommand("ode-check", "Residual diagnostics of the mode ODE systems");
  opt(ode, "--mu", "ode_check", "mu", "Eigenvalue", as_num);
  opt(ode, "--system", "ode_check", "system", "2x2|4x4", as_str);

  std::string env_path, kind;
  auto* exp = app.add_subcommand("export", "Export a series of an envelope as CSV");
  exp->add_option("--envelope", env_path, "Envelope JSON")->required();
  exp->add_option("--kind", kind, "tube-norm-series|bound-fit|remainder-scan")
      ->required()
      ->check(CLI::IsMember({"tube-norm-series", "bound-fit", "remainder-scan"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalidInput;
  } catch (const Error& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return kInvalidInput;
  }
  g_log_level = log_level == "error" ? 0 : log_level == "warn" ? 1 : log_level == "info" ? 2 : 3;
  if (threads > 1) log(1, "threads > 1 requested; this build runs serially");

  CLI::App* sub = app.get_subcommands().front();
  std::string task = sub->get_name();

  if (task == "export") {
    try {
      std::string out = out_path.empty() ? (fs::path(default_out_dir()) / (kind + ".csv")).string() : out_path;
      export_csv(env_path, kind, out);
      log(2, "wrote " + out);
      return kOk;
    } catch (const Error& e) {
      std::cerr << e.name() << ": " << e.what() << "\n";
      return kInvalidInput;
    } catch (const std::exception& e) {
      std::cerr << "internal error: " << e.what() << "\n";
      return kInternal;
    }
  }

  Run run;
  run.task = task;
  run.seed = seed;
  run.threads = threads;
  std::string out = out_path.empty() ? (fs::path(default_out_dir()) / (task + ".json")).string() : out_path;

  auto t0 = std::chrono::steady_clock::now();
  int rc = kOk;
  json error;
  try {
    run.config = config_path.empty() ? json::object() : load_config(config_path);
    if (!run.config.is_object()) throw ConfigError("config must be an object of named sections");
    run.config.merge_patch(overrides);
    if (run.config.contains("seed")) {
      if (!run.config["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
      if (!app.get_option("--seed")->count()) run.seed = run.config["seed"].get<std::uint64_t>();
    }
    run.config["seed"] = run.seed;
    std::mt19937_64 rng(run.seed);

    if (task == "spectrum") task_spectrum(run);
    else if (task == "solve-div") task_solve_div(run);
    else if (task == "solve-deform") task_solve_deform(run);
    else if (task == "kernel-classify") task_kernel_classify(run);
    else if (task == "three-circles") task_three_circles(run, rng);
    else if (task == "validate") task_validate(run);
    else if (task == "bound-fit") task_bound_fit(run);
    else if (task == "ode-check") task_ode_check(run);
    if (!run.certified()) rc = kCertificate;
  } catch (const Error& e) {
    rc = exit_code_for(e);
    error = {{"name", e.name()}, {"message", e.what()}};
  } catch (const json::exception& e) {
    rc = kInvalidInput;
    error = {{"name", "ConfigError"}, {"message", e.what()}};
  } catch (const std::exception& e) {
    rc = kInternal;
    error = {{"name", "InternalError"}, {"message", e.what()}};
  }
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json env;
  env["task"] = task;
  env["tool"] = {{"name", "ricyl"}, {"version", RICYL_VERSION}};
  env["manifest"] = {{"config", run.config},
                     {"seed", run.seed},
                     {"threads", run.threads},
                     {"inputs_digest", hex64(fnv1a(run.config.dump() + run.extra_inputs))}};
  env["outputs"] = run.outputs;
  env["series"] = run.series;
  env["certificates"] = run.certificates;
  env["status"] = rc == kOk ? "ok" : rc == kCertificate && error.is_null() ? "certificate_failure" : "error";
  if (!error.is_null()) env["error"] = error;
  env["timing"] = {{"wall_seconds", wall}};

  try {
    write_file(out, env.dump(2) + "\n");
    log(2, "wrote " + out);
    for (const char* k : {"tube-norm-series", "bound-fit"}) write_series_csv(run.series, k, out);
  } catch (const std::exception& e) {
    std::cerr << "cannot write output: " << e.what() << "\n";
    return kInternal;
  }
  if (!error.is_null()) std::cerr << error["name"].get<std::string>() << ": " << error["message"].get<std::string>() << "\n";
  for (const auto& c : run.certificates)
    if (!c["pass"].get<bool>()) log(0, "certificate failed: " + c["name"].get<std::string>());
  return rc;
}
