#include <cmath>
#include <random>

#include "doctest.h"
#include "ricyl/deformation_solver.hpp"
#include "ricyl/errors.hpp"
#include "ricyl/three_circles.hpp"

using namespace ricyl;

namespace {

TorusCrossSection unit_gap_torus() { return {3, {2 * M_PI, 2 * M_PI, 2 * M_PI}, 1}; }

// r times a unit parallel TT tensor
ModeExpansion linear_b0(const TorusCrossSection& cs) {
  ModeExpansion h(cs.lengths, 2);
  Mode m;
  m.kind = ModeKind::TTTensor;
  m.k = std::vector<int>(cs.dim, 0);
  m.polarization = parallel_tt_basis(cs.dim)[0];
  h.add_mode(m, RadialProfile::monomial(1.0, 1, 0.0));
  return h;
}

}  // namespace

TEST_CASE("tube norms") {
  auto cs = unit_gap_torus();
  auto h = linear_b0(cs);
  CHECK(tube_norm(h, 0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  for (int t : {0, 1, 4}) {
    double L = 10, t0 = t * L;
    CHECK(tube_norm(h, t0, t0 + L) == doctest::Approx(L * t0 * t0 + L * L * t0 + L * L * L / 3).epsilon(1e-13));
  }
  std::mt19937_64 rng(2);
  auto g = random_kernel_form(cs, rng, 3);
  CHECK(tube_norm_quadrature(g, 0.5, 1.5) == doctest::Approx(tube_norm(g, 0.5, 1.5)).epsilon(1e-10));
  CHECK_THROWS_AS(tube_norm(g, 1, 1), InvalidArgument);
}

TEST_CASE("three circles examples") {
  auto cs = unit_gap_torus();
  auto tt = build_spectrum(cs, ModeKind::TTTensor);
  const Mode* B = nullptr;
  for (auto& m : tt.modes)
    if (std::abs(m.mu - 1) < 1e-12) {
      B = &m;
      break;
    }
  REQUIRE(B);
  ModeExpansion h(cs.lengths, 2);
  h.add_mode(*B, RadialProfile::exponential(1.0, -1.0));
  ThreeCirclesParams p{1.0, 0.5, 0.3, 3.0, 0, 1, 2};
  p.beta_prime = 0.9 * beta_prime_bound(p.beta, p.L, 1, 2);
  CHECK(three_circles_check(h, p).holds);
  // printed variant: beta = 0.9 with L = 3 violates the L hypothesis
  ThreeCirclesParams bad{1.0, 0.9, 0.05, 3.0, 0, 1, 2};
  CHECK_THROWS_AS(three_circles_check(h, bad), InvalidParams);

  auto lin = linear_b0(cs);
  ThreeCirclesParams q{1.0, 0.9, 0.0, 10.0, 0, 1, 2};
  q.beta_prime = 0.45 * std::log(linear_profile_norm(2) / linear_profile_norm(1)) / 10.0;
  auto res = three_circles_check(lin, q);
  CHECK(res.holds);
  CHECK(res.slack >= 1.0);
  q.beta_prime = 0.45 * std::log((4 + 20 + 100.0 / 3) / (1 + 10 + 100.0 / 3));
  CHECK_THROWS_AS(three_circles_check(lin, q), InvalidParams);

  auto zero = three_circles_check(ModeExpansion(cs.lengths, 2), p);
  CHECK(zero.holds);
}

TEST_CASE("beta prime sharpness") {
  auto cs = unit_gap_torus();
  auto lin = linear_b0(cs);
  double L = 1.0, beta = 0.6;
  bool failed = false;
  for (int t = 1; t < 200 && !failed; ++t) {
    double bp = 1.02 * std::log(linear_profile_norm(t + 1) / linear_profile_norm(t)) / (2 * L);
    if (bp >= beta) continue;
    auto n = [&](int s) { return tube_norm(lin, s * L, (s + 1) * L); };
    failed = !three_circles_from_norms(n(0), n(t), n(t + 1), bp, L).holds;
  }
  CHECK(failed);
}

TEST_CASE("random three circles suite") {
  auto cs = unit_gap_torus();
  std::mt19937_64 rng(42);
  for (int i = 0; i < 200; ++i) {
    auto p = random_params(1.0, rng);
    auto h = random_kernel_form(cs, rng);
    auto r = three_circles_check(h, p);
    CHECK(r.holds);
  }
}

TEST_CASE("monotonicity") {
  auto cs = unit_gap_torus();
  auto tt = build_spectrum(cs, ModeKind::TTTensor);
  const Mode* B = nullptr;
  for (auto& m : tt.modes)
    if (m.mu > 0) {
      B = &m;
      break;
    }
  std::vector<int> offs;
  for (int i = 0; i < 10; ++i) offs.push_back(i);
  double q = std::sqrt(B->mu);
  ModeExpansion dec(cs.lengths, 2), grow(cs.lengths, 2), mix(cs.lengths, 2);
  dec.add_mode(*B, RadialProfile::exponential(1.0, -q));
  grow.add_mode(*B, RadialProfile::exponential(1.0, q));
  mix.add_mode(*B, RadialProfile::exponential(1e-4, q) + RadialProfile::exponential(1.0, -q));
  auto rd = monotonicity_classify(tube_norm_series(dec, 2.0, offs), 0.5);
  for (auto s : rd.steps) CHECK(s == Dominance::Left);
  auto rg = monotonicity_classify(tube_norm_series(grow, 2.0, offs), 0.5);
  for (auto s : rg.steps) CHECK(s == Dominance::Right);
  auto rm = monotonicity_classify(tube_norm_series(mix, 2.0, offs), 0.5);
  CHECK(rm.violations.empty());
  CHECK(rm.propagation_failures.empty());
  CHECK(rm.steps.front() == Dominance::Left);
  CHECK(rm.steps.back() == Dominance::Right);
}

TEST_CASE("project out parallel") {
  TorusCrossSection cs(2, {1.0, 1.0}, 1);
  double amp0 = cs.amplitude({0, 0});
  ModeExpansion h(cs.lengths, 2);
  auto B = parallel_tt_basis(2)[0];
  for (int a = 0; a < 2; ++a)
    for (int b = a; b < 2; ++b) h.add({{0, 0}, Phase::Cos}, h.comp(1 + a, 1 + b), RadialProfile::constant(7 * B[sym_index(a, b, 2)]));
  CHECK(project_out_parallel(h).coefficient_sup(0, 2) < 1e-12);
  ModeExpansion g(cs.lengths, 2), expect(cs.lengths, 2);
  for (int a = 1; a <= 2; ++a) {
    g.add({{0, 0}, Phase::Cos}, g.comp(a, a), RadialProfile::constant(2 / amp0) + RadialProfile::monomial(1 / amp0, 1, 0));
    expect.add({{0, 0}, Phase::Cos}, g.comp(a, a), RadialProfile::monomial(1 / amp0, 1, 0));
  }
  auto pg = project_out_parallel(g);
  CHECK((pg - expect).coefficient_sup(0, 2) < 1e-12);
  CHECK((project_out_parallel(pg) - pg).coefficient_sup(0, 2) < 1e-12);
}

TEST_CASE("perturbed trials") {
  auto cs = unit_gap_torus();
  ThreeCirclesParams p{1.0, 0.5, 0.1, 5.0, 0, 1, 2};
  p.beta_prime = 0.5 * beta_prime_bound(p.beta, p.L, 1, 2);
  auto r0 = perturbed_three_circles_trial(cs, p, 0.0, 20, 9);
  CHECK(r0.pass_rate == 1.0);
  auto r = perturbed_three_circles_trial(cs, p, 1e-4, 20, 9);
  CHECK(r.pass_rate == 1.0);
  CHECK(r.max_perturbation <= 1e-4 * (1 + 1e-12));
}
