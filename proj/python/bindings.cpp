#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ricyl/deformation_solver.hpp"
#include "ricyl/divergence_solver.hpp"
#include "ricyl/errors.hpp"
#include "ricyl/green_kernel.hpp"
#include "ricyl/json_io.hpp"
#include "ricyl/mode_ode.hpp"
#include "ricyl/three_circles.hpp"
#include "ricyl/validation.hpp"

namespace py = pybind11;
using namespace ricyl;
using io::json;

namespace {

OdeSystem system_from(const std::string& s) {
  if (s == "2x2") return OdeSystem::Scalar2x2;
  if (s == "4x4") return OdeSystem::Mixed4x4;
  throw InvalidArgument("system must be '2x2' or '4x4'");
}

ModeExpansion field(const std::string& text, const std::vector<double>& lengths) {
  return io::expansion_from_json(json::parse(text), lengths, "field");
}

json coeffs(const std::map<ModeLabel, ExpCoeffs>& m) {
  json out = json::array();
  for (const auto& [label, c] : m)
    out.push_back({{"mode", to_string(label)}, {"plus", c.plus}, {"minus", c.minus}});
  return out;
}

std::string spectrum(int dim, const std::vector<double>& lengths, int cutoff, const std::string& kind) {
  TorusCrossSection cs(dim, lengths, cutoff);
  json out = json::array();
  for (const auto& m : build_spectrum(cs, kind_from_string(kind)).modes) out.push_back(io::mode_to_json(m));
  return out.dump();
}

std::string solve_gauge_json(const std::string& source, const std::vector<double>& lengths, double tau,
                             const std::string& route) {
  DivergenceConfig cfg;
  cfg.tau = tau;
  if (route == "kernel") cfg.route = InfiniteRoute::Kernel;
  else if (route == "vop") cfg.route = InfiniteRoute::VariationOfParameters;
  else throw InvalidArgument("route must be 'kernel' or 'vop'");
  auto h = field(source, lengths);
  auto X = solve_gauge(h, cfg);
  return json({{"one_form", io::expansion_to_json(X.one_form)}, {"residual", gauge_residual(X, h, tau, 0.0, 10.0)}})
      .dump();
}

std::string classify_json(const std::string& text, const std::vector<double>& lengths, double tau) {
  auto D = classify_kernel(field(text, lengths), tau);
  return json({{"a", D.a},
               {"a_tilde", D.a_tilde},
               {"parallel_TT", D.parallel_TT},
               {"linear_TT", D.linear_TT},
               {"gauge_Y", {{"c", D.gauge_Y.c}, {"eta", D.gauge_Y.eta}, {"eta_tau", D.gauge_Y.eta_tau}}},
               {"exp_modes", coeffs(D.exp_modes)},
               {"exp_gauge", coeffs(D.exp_gauge)},
               {"ricci_residual", D.ricci_residual},
               {"divergence_residual", D.divergence_residual},
               {"reconstruction_error", D.reconstruction_error}})
      .dump();
}

std::string three_circles_json(const std::string& text, const std::vector<double>& lengths, double mu1, double beta,
                               double beta_prime, double L, int t1, int t2, int t3) {
  ThreeCirclesParams p{mu1, beta, beta_prime, L, t1, t2, t3};
  validate(p);
  auto r = three_circles_check(project_out_parallel(field(text, lengths)), p);
  return json({{"holds", r.holds}, {"slack", std::isinf(r.slack) ? json("inf") : json(r.slack)},
               {"n1", r.n1}, {"n2", r.n2}, {"n3", r.n3}})
      .dump();
}

std::string oracle_suite(const std::vector<double>& lengths, int nr, int nx, int order) {
  OracleSuiteConfig cfg;
  cfg.lengths = lengths;
  cfg.nr = nr;
  cfg.nx = nx;
  cfg.order = order;
  auto rep = run_oracle_suite(cfg);
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  return json({{"checks", checks}, {"all_pass", rep.all_pass()}, {"remainder_slope", rep.remainder.slope}}).dump();
}

py::dict reduced_dimensions(int dim, const std::vector<double>& lengths, double tau, bool parallel_only) {
  auto sys = solve_reduced_system(TorusCrossSection(dim, lengths, 1), tau, parallel_only);
  py::dict d;
  d["parallel_dimension"] = sys.parallel_dimension;
  d["parallel_expected"] = sys.parallel_expected;
  py::list sectors;
  for (const auto& s : sys.sectors) {
    py::dict e;
    e["k"] = s.k;
    e["mu"] = s.mu;
    e["dimension"] = s.dimension;
    e["expected"] = s.expected;
    sectors.append(e);
  }
  d["sectors"] = sectors;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ricyl, m) {
  m.doc() = "Linear analysis on flat cylinders R x T^d";

  auto base = py::register_exception<Error>(m, "RicylError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base);
  py::register_exception<InvalidParams>(m, "InvalidParams", base);
  py::register_exception<NotInKernel>(m, "NotInKernel", base);
  py::register_exception<DivergentConvolution>(m, "DivergentConvolution", base);
  py::register_exception<ResonantTau>(m, "ResonantTau", base);
  py::register_exception<NonInvertibleSector>(m, "NonInvertibleSector", base);
  py::register_exception<io::ConfigError>(m, "ConfigError", base);

  m.def("spectrum_json", &spectrum, py::arg("dim"), py::arg("lengths"), py::arg("cutoff"), py::arg("kind"));
  m.def(
      "spectral_gap",
      [](int dim, const std::vector<double>& lengths) { return spectral_gap(TorusCrossSection(dim, lengths, 1)); },
      py::arg("dim"), py::arg("lengths"));

  m.def(
      "system_matrix", [](const std::string& s, double mu) { return system_matrix(system_from(s), mu); },
      py::arg("system"), py::arg("mu"));
  m.def(
      "fundamental_matrix",
      [](const std::string& s, double mu, double r) { return fundamental_matrix(system_from(s), mu, r); },
      py::arg("system"), py::arg("mu"), py::arg("r"));
  m.def(
      "fundamental_matrix_inverse",
      [](const std::string& s, double mu, double r) { return fundamental_matrix_inverse(system_from(s), mu, r); },
      py::arg("system"), py::arg("mu"), py::arg("r"));

  m.def("eval_type1", &eval_type1, py::arg("mu"), py::arg("t"), py::arg("s"));
  m.def(
      "eval_type2",
      [](double mu, double t, double s, bool printed) {
        auto v = printed ? eval_type2_printed(mu, t, s) : eval_type2(mu, t, s);
        return std::map<std::string, double>{{"dd", v.dd}, {"lb", v.lb}, {"kc", v.kc}, {"lc", v.lc}};
      },
      py::arg("mu"), py::arg("t"), py::arg("s"), py::arg("printed") = false);
  m.def(
      "estimate_weighted_bound",
      [](double mu1, const std::vector<double>& rho, const std::string& type) {
        if (type != "one-form" && type != "function") throw InvalidArgument("type must be 'one-form' or 'function'");
        auto f = estimate_weighted_bound(mu1, rho, type == "one-form" ? SourceType::OneForm : SourceType::Function);
        py::dict d;
        d["p"] = f.p;
        d["intercept"] = f.intercept;
        d["rho"] = f.rho;
        d["ratio"] = f.ratio;
        d["log_gap"] = f.log_gap;
        return d;
      },
      py::arg("mu1"), py::arg("rho"), py::arg("type"));

  m.def("solve_gauge_json", &solve_gauge_json, py::arg("source"), py::arg("lengths"), py::arg("tau"),
        py::arg("route") = "kernel");
  m.def("classify_kernel_json", &classify_json, py::arg("field"), py::arg("lengths"), py::arg("tau"));
  m.def("reduced_dimensions", &reduced_dimensions, py::arg("dim"), py::arg("lengths"), py::arg("tau"),
        py::arg("parallel_only") = true);

  m.def("linear_profile_norm", &linear_profile_norm, py::arg("t"));
  m.def("beta_prime_bound", &beta_prime_bound, py::arg("beta"), py::arg("L"), py::arg("t2"), py::arg("t3"));
  m.def("three_circles_json", &three_circles_json, py::arg("field"), py::arg("lengths"), py::arg("mu1"),
        py::arg("beta"), py::arg("beta_prime"), py::arg("L"), py::arg("t1"), py::arg("t2"), py::arg("t3"));
  m.def("oracle_suite_json", &oracle_suite, py::arg("lengths"), py::arg("nr") = 32, py::arg("nx") = 8,
        py::arg("order") = 2);
}
