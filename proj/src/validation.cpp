#include "ricyl/validation.hpp"

#include <cmath>

#include "ricyl/deformation_solver.hpp"
#include "ricyl/errors.hpp"

namespace ricyl {

namespace {

FourierKey key(std::vector<int> k, Phase p = Phase::Cos) { return {std::move(k), p}; }

std::vector<int> unit(int d, int i) {
  std::vector<int> k(d, 0);
  k[i] = 1;
  return k;
}

ModeExpansion test_tensor(const std::vector<double>& L) {
  int d = (int)L.size();
  ModeExpansion h(L, 2);
  std::vector<int> ones(d, 1);
  h.add(key(unit(d, 0)), h.comp(0, 1), RadialProfile::exponential(0.7, -0.5));
  h.add(key(unit(d, d - 1), Phase::Sin), h.comp(1, d), RadialProfile::monomial(0.4, 1, -0.3));
  h.add(key(ones), h.comp(d, d), RadialProfile::exponential(-0.2, 0.2));
  h.add(key(std::vector<int>(d, 0)), h.comp(0, 0), RadialProfile::monomial(0.1, 2, 0.0));
  return h;
}

ModeExpansion test_one_form(const std::vector<double>& L) {
  int d = (int)L.size();
  ModeExpansion X(L, 1);
  X.add(key(std::vector<int>(d, 1)), 0, RadialProfile::exponential(1.0, -0.4));
  X.add(key(unit(d, 0), Phase::Sin), d, RadialProfile::monomial(0.5, 1, 0.0));
  return X;
}

double fd_error(FdOp op, const ModeExpansion& f, const ModeExpansion& exact, const GridSpec& g,
                const StencilConfig& sc) {
  int band = std::max(5, 5 * (g.nr / 32));
  return interior_sup(fd_operator(op, sample(f, g), sc) - sample(exact, g), band);
}

}  // namespace

bool OracleReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

OracleReport run_oracle_suite(const OracleSuiteConfig& cfg) {
  if (cfg.order != 2 && cfg.order != 4) throw InvalidArgument("stencil order must be 2 or 4");
  if (cfg.lengths.empty()) throw InvalidArgument("empty cross-section");
  OracleReport rep;
  StencilConfig sc;
  sc.order = cfg.order;
  GridSpec g1 = make_grid(cfg.lengths, cfg.a, cfg.b, cfg.nr, cfg.nx);
  GridSpec g2 = make_grid(cfg.lengths, cfg.a, cfg.b, 2 * cfg.nr, 2 * cfg.nx);
  g1.validate();
  g2.validate();

  auto h = test_tensor(cfg.lengths);
  auto X = test_one_form(cfg.lengths);
  struct Case {
    const char* name;
    FdOp op;
    ModeExpansion f, exact;
  } cases[] = {
      {"divergence", FdOp::Divergence, h, ops::divergence(h)},
      {"sym_grad", FdOp::SymGrad, X, ops::sym_grad(X)},
      {"rough_laplacian", FdOp::RoughLaplacian, h, ops::rough_laplacian(h)},
      {"trace_hessian", FdOp::TraceHessian, h, ops::hessian(ops::trace(h))},
      {"linearized_ricci", FdOp::LinearizedRicci, h, ops::linearized_ricci(h)},
      {"gauge_operator", FdOp::GaugeOperator, X, ops::gauge_operator(X)},
  };
  double target = std::pow(2.0, cfg.order);
  for (auto& c : cases) {
    OracleCheck chk;
    chk.name = std::string("convergence_") + c.name;
    chk.coarse = fd_error(c.op, c.f, c.exact, g1, sc);
    chk.fine = fd_error(c.op, c.f, c.exact, g2, sc);
    chk.value = chk.coarse / chk.fine;
    chk.threshold = target;
    chk.pass = chk.value > 0.85 * target && chk.value < 1.15 * target;
    rep.checks.push_back(chk);
  }

  // flat background: curvature terms vanish, so Lichnerowicz = rough Laplacian
  GridField g0 = flat_metric(g1);
  GridField hs = sample(h, g1);
  {
    OracleCheck chk{"lichnerowicz_minus_rough", 0.0, 1e-10};
    chk.value = interior_sup(fd_operator(FdOp::Lichnerowicz, hs, sc) - fd_operator(FdOp::RoughLaplacian, hs, sc), 0);
    chk.pass = chk.value <= chk.threshold;
    rep.checks.push_back(chk);
  }
  {
    OracleCheck chk{"flat_ricci", 0.0, 1e-11};
    chk.value = interior_sup(nonlinear_ricci(g0, sc));
    chk.pass = chk.value <= chk.threshold;
    rep.checks.push_back(chk);
  }

  // quadratic remainder on r B0 + a decaying pure-gauge mode
  int d = (int)cfg.lengths.size();
  ModeExpansion hr(cfg.lengths, 2);
  if (d >= 2) {
    Mode B;
    B.kind = ModeKind::TTTensor;
    B.k.assign(d, 0);
    B.polarization = parallel_tt_basis(d)[0];
    hr.add_mode(B, RadialProfile::monomial(1.0, 1, 0.0));
  }
  ModeKind gk = d >= 2 ? ModeKind::CoclosedOneForm : ModeKind::Scalar;
  hr += 0.3 * exp_gauge_tensor(cfg.lengths, {gk, key(unit(d, 0)), 0}, -1);
  StencilConfig rc;
  rc.order = cfg.remainder_order;
  GridSpec gr = make_grid(cfg.lengths, cfg.a, cfg.b, cfg.remainder_nr, cfg.remainder_nx);
  rep.remainder = quadratic_remainder_scan(hr, cfg.epsilon, gr, rc);
  {
    OracleCheck chk{"remainder_slope", rep.remainder.slope, 2.0};
    chk.pass = rep.remainder.slope >= 1.9 && rep.remainder.slope <= 2.1;
    rep.checks.push_back(chk);
  }
  return rep;
}

}  // namespace ricyl
