#include <cmath>

#include "doctest.h"
#include "ricyl/deformation_solver.hpp"
#include "ricyl/errors.hpp"
#include "ricyl/fd_oracle.hpp"

using namespace ricyl;

namespace {

FourierKey key(std::vector<int> k, Phase p = Phase::Cos) { return {k, p}; }

ModeExpansion smooth_tensor(const std::vector<double>& L) {
  ModeExpansion h(L, 2);
  h.add(key({1, 0}), h.comp(0, 1), RadialProfile::exponential(0.7, -0.5));
  h.add(key({0, 1}, Phase::Sin), h.comp(1, 2), RadialProfile::monomial(0.4, 1, -0.3));
  h.add(key({1, 1}), h.comp(2, 2), RadialProfile::exponential(-0.2, 0.2));
  h.add(key({0, 0}), h.comp(0, 0), RadialProfile::monomial(0.1, 2, 0.0));
  return h;
}

double fd_error(FdOp op, const ModeExpansion& f, const ModeExpansion& exact, int nr, int nx, int order) {
  std::vector<double> L = f.lengths();
  GridSpec g = make_grid(L, 0.0, 2.0, nr, nx);
  StencilConfig cfg;
  cfg.order = order;
  return interior_sup(fd_operator(op, sample(f, g), cfg) - sample(exact, g), 5 * (nr / 32));
}

}  // namespace

TEST_CASE("fornberg weights") {
  auto w = fornberg_weights(0.0, {-1, 0, 1}, 2);
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(-2.0));
  auto w4 = fornberg_weights(0.0, {-2, -1, 0, 1, 2}, 1);
  CHECK(w4[0] == doctest::Approx(1.0 / 12));
  CHECK(w4[1] == doctest::Approx(-8.0 / 12));
}

TEST_CASE("sampling is exact") {
  std::vector<double> L{2 * M_PI, 2 * M_PI};
  auto h = smooth_tensor(L);
  GridSpec g = make_grid(L, 0, 2, 16, 8);
  auto s = sample(h, g);
  double m = 0;
  long Nx = g.tangential_points();
  for (int ir = 0; ir < g.nr; ir += 5)
    for (long t = 0; t < Nx; t += 7) {
      std::vector<double> x{L[0] * (t / 8) / 8, L[1] * (t % 8) / 8};
      auto v = h.eval(g.r(ir), x);
      for (int c = 0; c < 6; ++c) m = std::max(m, std::abs(v[c] - s.at(ir * Nx + t, c)));
    }
  CHECK(m < 1e-14);
  CHECK(interior_sup(sample(ModeExpansion(L, 2), g)) == 0.0);
}

TEST_CASE("operators converge at stencil order") {
  std::vector<double> L{2 * M_PI, 2 * M_PI};
  auto h = smooth_tensor(L);
  ModeExpansion X(L, 1);
  X.add(key({1, 1}), 0, RadialProfile::exponential(1.0, -0.4));
  X.add(key({1, 0}, Phase::Sin), 2, RadialProfile::monomial(0.5, 1, 0.0));
  struct Case {
    FdOp op;
    ModeExpansion f, exact;
  } cases[] = {
      {FdOp::Divergence, h, ops::divergence(h)},
      {FdOp::SymGrad, X, ops::sym_grad(X)},
      {FdOp::RoughLaplacian, h, ops::rough_laplacian(h)},
      {FdOp::TraceHessian, h, ops::hessian(ops::trace(h))},
      {FdOp::LinearizedRicci, h, ops::linearized_ricci(h)},
      {FdOp::GaugeOperator, X, ops::gauge_operator(X)},
  };
  for (auto& c : cases)
    for (int order : {2, 4}) {
      double e1 = fd_error(c.op, c.f, c.exact, 64, 16, order);
      double e2 = fd_error(c.op, c.f, c.exact, 128, 32, order);
      double ratio = e1 / e2, target = std::pow(2.0, order);
      CHECK(ratio > 0.85 * target);
      CHECK(ratio < 1.15 * target);
    }
}

TEST_CASE("flat background identities") {
  std::vector<double> L{2 * M_PI, 2 * M_PI};
  GridSpec g = make_grid(L, 0, 2, 32, 12);
  auto g0 = flat_metric(g);
  CHECK(interior_sup(nonlinear_ricci(g0)) < 1e-11);
  auto hs = sample(smooth_tensor(L), g);
  auto diff = fd_operator(FdOp::Lichnerowicz, hs) - fd_operator(FdOp::RoughLaplacian, hs);
  CHECK(interior_sup(diff, 0) == 0.0);
  // dr^2 + (1 + eps) g_N is flat
  GridField m = g0;
  for (long p = 0; p < g.points(); ++p)
    for (int a = 1; a <= 2; ++a) m.at(p, sym_index(a, a, 3)) = 1.001;
  CHECK(interior_sup(nonlinear_ricci(m)) < 1e-11);
  ModeExpansion drdr(L, 2);
  drdr.add(key({0, 0}), 0, RadialProfile::constant(1.0));
  CHECK(interior_sup(fd_operator(FdOp::Divergence, sample(drdr, g))) == 0.0);
  GridField bad = g0;
  bad *= -1.0;
  CHECK_THROWS_AS(nonlinear_ricci(bad), NotPositiveDefinite);
}

TEST_CASE("adjointness on r-periodic fields") {
  GridSpec g = make_grid({1.0, 1.0}, 0, 1, 48, 24);
  g.periodic_r = true;
  auto h = sample_function(g, 2, [](double r, const std::vector<double>& x) {
    double s = std::sin(2 * M_PI * r), c = std::cos(2 * M_PI * (x[0] + r));
    return std::vector<double>{s * c, c, 0.3 * s, std::cos(2 * M_PI * x[1]), s, c * s};
  });
  auto w = sample_function(g, 1, [](double r, const std::vector<double>& x) {
    return std::vector<double>{std::cos(2 * M_PI * r), std::sin(2 * M_PI * (x[1] - r)), std::sin(2 * M_PI * x[0])};
  });
  double lhs = l2_inner(fd_operator(FdOp::Divergence, h), w);
  double rhs = l2_inner(h, fd_operator(FdOp::SymGrad, w));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("quadratic remainder") {
  std::vector<double> L{2 * M_PI, 2 * M_PI};
  TorusCrossSection cs(2, L, 1);
  ModeExpansion h(L, 2);
  Mode B;
  B.kind = ModeKind::TTTensor;
  B.k = {0, 0};
  B.polarization = parallel_tt_basis(2)[0];
  h.add_mode(B, RadialProfile::monomial(1.0, 1, 0.0));
  h += 0.3 * exp_gauge_tensor(L, {ModeKind::CoclosedOneForm, key({1, 0}), 0}, -1);
  GridSpec g = make_grid(L, 0, 2, 48, 24);
  StencilConfig cfg;
  cfg.order = 4;
  auto scan = quadratic_remainder_scan(h, {1e-1, 3e-2, 1e-2}, g, cfg);
  CHECK(scan.slope > 1.9);
  CHECK(scan.slope < 2.1);
  auto zero = quadratic_remainder_scan(ModeExpansion(L, 2), {1e-1, 1e-2}, g, cfg);
  CHECK(zero.identically_zero);
}

TEST_CASE("memory guard") {
  GridSpec g = make_grid({1, 1, 1}, 0, 1, 4096, 64);
  CHECK_THROWS_AS(GridField(g, 2), GridTooLarge);
}
