#include <cmath>
#include <random>

#include "doctest.h"
#include "ricyl/deformation_solver.hpp"
#include "ricyl/errors.hpp"

using namespace ricyl;

namespace {
FourierKey key(std::vector<int> k, Phase p = Phase::Cos) { return {k, p}; }
}  // namespace

TEST_CASE("harmonic trace split") {
  ModeExpansion t({1.0}, 0);
  t.add(key({0}), 0, RadialProfile::monomial(3.0, 1, 0.0));
  t.add(key({1}), 0, RadialProfile::exponential(1.0, -2 * M_PI));
  auto s = harmonic_trace_split(t);
  CHECK(s.c0 == doctest::Approx(0.0).scale(1.0));
  CHECK(s.c1 == doctest::Approx(3.0));
  REQUIRE(s.modes.size() == 1);
  CHECK(s.modes.begin()->second.minus == doctest::Approx(1.0));
  ModeExpansion bad({1.0}, 0);
  bad.add(key({1}), 0, RadialProfile::monomial(1.0, 1, 0.0));
  CHECK_THROWS_AS(harmonic_trace_split(bad), NonHarmonicTrace);
  ModeExpansion five({1.0}, 0);
  five.add(key({0}), 0, RadialProfile::constant(5.0));
  CHECK(harmonic_trace_split(five).c0 == doctest::Approx(5.0));
}

TEST_CASE("trace absorption field") {
  std::vector<double> L{2 * M_PI};
  auto T = trace_absorption_field(L, {{key({1}), {0.0, 1.0}}});
  auto rr = T.lie.get(key({1}), T.lie.comp(0, 0));
  CHECK(rr(1.3) == doctest::Approx(1.3 / 2 * std::exp(-1.3)));
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> L2{1.0, 1.4};
  std::map<FourierKey, ExpCoeffs> c;
  c[key({1, 0})] = {u(rng), u(rng)};
  c[key({1, 1}, Phase::Sin)] = {u(rng), u(rng)};
  c[key({0, 1})] = {0.0, u(rng)};
  c[key({1, -1})] = {u(rng), 0.0};
  auto A = trace_absorption_field(L2, c);
  auto sg = ops::sym_grad(A.X.one_form);
  CHECK((sg - A.lie).coefficient_sup(-1, 1) < 1e-10);
  CHECK(ops::divergence(A.lie).coefficient_sup(-1, 1) < 1e-9);
  ModeExpansion target(L2, 0);
  for (auto& [k, v] : c) {
    double q = std::sqrt(TorusCrossSection(2, L2, 1).eigenvalue(k.k));
    target.add(k, 0, RadialProfile::exponential(v.plus, q) + RadialProfile::exponential(v.minus, -q));
  }
  CHECK((ops::trace(A.lie) - target).coefficient_sup(-1, 1) < 1e-10);
  CHECK_THROWS_AS(trace_absorption_field(L2, {{key({0, 0}), {1, 0}}}), InvalidArgument);
}

TEST_CASE("reduced system dimensions") {
  for (int d : {1, 2, 3}) {
    TorusCrossSection cs(d, std::vector<double>(d, 2 * M_PI), 1);
    for (double tau : {0.0, 0.01}) {
      auto R = solve_reduced_system(cs, tau, d == 3);
      CHECK(R.parallel_dimension == R.parallel_expected);
      for (auto& s : R.sectors) CHECK(s.dimension == s.expected);
      for (auto& b : R.parallel_basis) CHECK(ops::linearized_ricci(b).is_zero());
    }
  }
  TorusCrossSection cs(2, {1.0, 1.0}, 1);
  auto R0 = solve_reduced_system(cs, 0.0);
  ModeExpansion etadr(cs.lengths, 2);
  etadr.add(key({0, 0}), etadr.comp(0, 1), RadialProfile::constant(1.0));
  CHECK(span_residual(R0.parallel_basis, etadr) < 1e-12);
  auto R1 = solve_reduced_system(cs, 0.01);
  CHECK(span_residual(R1.parallel_basis, etadr) > 0.5);
  CHECK_THROWS_AS(solve_reduced_system(cs, 2 * M_PI / 2, true), ResonantTau);
}

TEST_CASE("classification examples") {
  TorusCrossSection cs(3, {2 * M_PI, 2 * M_PI, 2 * M_PI}, 1);
  auto tt = build_spectrum(cs, ModeKind::TTTensor);
  const Mode* B1 = nullptr;
  for (auto& m : tt.modes)
    if (m.mu > 0) {
      B1 = &m;
      break;
    }
  REQUIRE(B1);
  ModeExpansion h(cs.lengths, 2);
  double amp0 = cs.amplitude({0, 0, 0});
  for (int a = 1; a <= 3; ++a) h.add(key({0, 0, 0}), h.comp(a, a), RadialProfile::constant(3.0 / amp0));
  h.add_mode(*B1, RadialProfile::exponential(1.0, -1.0));
  auto K = classify_kernel(h, 0.01);
  CHECK(K.a == doctest::Approx(3.0));
  ModeLabel lab{ModeKind::TTTensor, B1->key(), B1->pol_index};
  CHECK(K.exp_modes.at(lab).minus == doctest::Approx(1.0));
  CHECK(K.exp_modes.at(lab).plus == doctest::Approx(0.0).scale(1.0));
  CHECK(K.reconstruction_error < 1e-12);

  ModeExpansion drdr(cs.lengths, 2);
  drdr.add(key({0, 0, 0}), drdr.comp(0, 0), RadialProfile::constant(1.0));
  CHECK_THROWS_AS(classify_kernel(drdr, 0.01), NotInKernel);
  auto K0 = classify_kernel(drdr, 0.0);
  CHECK(K0.gauge_Y.c * 2 == doctest::Approx(amp0));

  auto Z = classify_kernel(ModeExpansion(cs.lengths, 2), 0.01);
  CHECK(Z.a == 0.0);
  CHECK(Z.exp_modes.empty());
}

TEST_CASE("classification round trip with gauge and trace parts") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> L{2 * M_PI, 2 * M_PI};
  for (double tau : {0.0, 0.02}) {
    KernelDecomposition K;
    K.lengths = L;
    K.tau = tau;
    K.a = u(rng);
    K.a_tilde = u(rng);
    K.parallel_TT = {u(rng), u(rng)};
    K.linear_TT = {u(rng), u(rng)};
    K.gauge_Y.eta = {0, 0};
    K.gauge_Y.eta_tau = {0, 0};
    if (tau == 0) {
      K.gauge_Y.c = u(rng);
      K.gauge_Y.eta = {u(rng), u(rng)};
    } else {
      K.gauge_Y.eta_tau = {u(rng), u(rng)};
    }
    K.exp_gauge[{ModeKind::Scalar, key({1, 1}, Phase::Sin), 0}] = {u(rng), u(rng)};
    K.exp_gauge[{ModeKind::CoclosedOneForm, key({0, 1}), 0}] = {u(rng), u(rng)};
    K.gauge_X = trace_absorption_field(L, {{key({1, -1}), {u(rng), u(rng)}}});
    auto h = K.reconstruct();
    auto D = classify_kernel(h, tau);
    CHECK(D.reconstruction_error < 1e-12);
    CHECK(D.a == doctest::Approx(K.a));
    CHECK(D.a_tilde == doctest::Approx(K.a_tilde));
    CHECK(D.gauge_Y.c == doctest::Approx(K.gauge_Y.c).scale(1.0));
    auto D2 = classify_kernel(h, tau);
    CHECK(D2.a == D.a);
  }
}
