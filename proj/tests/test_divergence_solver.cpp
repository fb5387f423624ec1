#include <cmath>
#include <random>

#include "doctest.h"
#include "ricyl/divergence_solver.hpp"
#include "ricyl/errors.hpp"

using namespace ricyl;

namespace {

ModeExpansion random_field(std::mt19937& rng, const std::vector<double>& L, bool half_line) {
  std::uniform_int_distribution<int> kd(-1, 1), pd(0, 1), comp(0, (int)L.size());
  std::uniform_real_distribution<double> cd(-1, 1), rate(0.3, 3.0);
  ModeExpansion X(L, 1);
  for (int i = 0; i < 6; ++i) {
    std::vector<int> k(L.size());
    for (auto& v : k) v = kd(rng);
    FourierKey key{k, pd(rng) ? Phase::Cos : Phase::Sin};
    auto p = RadialProfile::monomial(cd(rng), pd(rng), -rate(rng));
    X.add(key, comp(rng), half_line ? p.restricted(0, kInf) : p);
  }
  return X;
}

}  // namespace

TEST_CASE("lie derivative examples") {
  std::vector<double> L{1.0, 1.0};
  FourierKey z{{0, 0}, Phase::Cos};
  ModeExpansion dr(L, 1);
  dr.add(z, 0, RadialProfile::constant(1.0));
  CHECK(lie_derivative_metric(make_gauge_field(dr)).is_zero());
  ModeExpansion rphi(L, 1);
  rphi.add(z, 2, RadialProfile::monomial(1.0, 1, 0.0));
  auto h = lie_derivative_metric(make_gauge_field(rphi));
  CHECK(h.get(z, h.comp(0, 2))(2.0) == doctest::Approx(1.0));
}

TEST_CASE("gauge solve round trip") {
  std::mt19937 rng(7);
  std::vector<double> L{1.0, 1.5};
  for (int trial = 0; trial < 20; ++trial) {
    for (bool half : {true, false}) {
      auto Y = random_field(rng, L, half);
      auto src = ops::sym_grad(Y);
      DivergenceConfig cfg;
      auto X = solve_gauge(src, cfg);
      CHECK(gauge_residual(X, src, cfg.tau, 0.01, 6.0) < 1e-8);
    }
  }
}

TEST_CASE("both infinite-sector routes agree") {
  std::mt19937 rng(3);
  std::vector<double> L{2.0};
  auto Y = random_field(rng, L, true);
  auto w = ops::divergence(ops::sym_grad(Y));
  w = w.filtered([](const FourierKey& k) { return !k.is_zero(); });
  DivergenceConfig a, b;
  b.route = InfiniteRoute::VariationOfParameters;
  auto Xa = solve_gauge_rhs(w, a), Xb = solve_gauge_rhs(w, b);
  CHECK((Xa.one_form - Xb.one_form).coefficient_sup(0, 5) < 1e-10);
  for (auto& [k, s] : Xa.sector) CHECK(s == Sector::Infinite);
}

TEST_CASE("dr x dr source") {
  std::vector<double> L{1.0};
  FourierKey z{{0}, Phase::Cos};
  ModeExpansion h(L, 2);
  h.add(z, h.comp(0, 0), RadialProfile::constant(1.0));
  DivergenceConfig cfg;
  auto X = solve_gauge(h, cfg);
  CHECK(gauge_residual(X, h, cfg.tau, 0, 5) < 1e-12);
  CHECK(X.sector.at(z) == Sector::Finite);
  cfg.tau = 0;
  CHECK_THROWS_AS(solve_gauge(h, cfg), NonInvertibleSector);
  CHECK(solve_gauge(ModeExpansion(L, 2), cfg).one_form.is_zero());
}

TEST_CASE("resonance guard") {
  CHECK_THROWS_AS(check_resonance(0.5, {1.0}), ResonantTau);
  CHECK_NOTHROW(check_resonance(0.01, {1.0, 39.47}));
  CHECK_NOTHROW(check_resonance(0.0, {0.0, 1.0}));
}
