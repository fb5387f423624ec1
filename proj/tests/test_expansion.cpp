#include <cmath>

#include "doctest.h"
#include "ricyl/expansion.hpp"

using namespace ricyl;

namespace {
FourierKey key(std::vector<int> k, Phase p = Phase::Cos) { return {k, p}; }
}  // namespace

TEST_CASE("partial derivatives match finite differences") {
  ModeExpansion f({1.0, 2.0}, 0);
  f.add(key({1, -1}), 0, RadialProfile::exponential(1.0, -1.0));
  f.add(key({0, 1}, Phase::Sin), 0, RadialProfile::monomial(0.5, 1, 0.0));
  std::vector<double> x{0.3, 0.7};
  double r = 0.4, h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    auto df = ops::partial(f, i);
    double fd;
    if (i == 0)
      fd = (f.eval(r + h, x)[0] - f.eval(r - h, x)[0]) / (2 * h);
    else {
      auto xp = x, xm = x;
      xp[i - 1] += h;
      xm[i - 1] -= h;
      fd = (f.eval(r, xp)[0] - f.eval(r, xm)[0]) / (2 * h);
    }
    CHECK(df.eval(r, x)[0] == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("non-canonical keys fold") {
  ModeExpansion f({1.0}, 0);
  f.add(key({-1}, Phase::Sin), 0, RadialProfile::constant(1.0));
  f.add(key({1}, Phase::Sin), 0, RadialProfile::constant(1.0));
  CHECK(f.is_zero());
}

TEST_CASE("Killing fields and Lie derivatives") {
  std::vector<double> L{1.0, 1.0};
  ModeExpansion X(L, 1);
  FourierKey z = key({0, 0});
  X.add(z, 0, RadialProfile::constant(1.0));
  X.add(z, 1, RadialProfile::constant(2.0));
  CHECK(ops::sym_grad(X).is_zero());
  ModeExpansion Y(L, 1);
  Y.add(z, 0, RadialProfile::monomial(1.0, 1, 0.0));  // r dr
  auto h = ops::sym_grad(Y);
  CHECK(h.get(z, h.comp(0, 0))(1.0) == doctest::Approx(2.0));
  ModeExpansion Z(L, 1);
  Z.add(z, 2, RadialProfile::monomial(1.0, 1, 0.0));  // r dx^2
  auto hz = ops::sym_grad(Z);
  CHECK(hz.get(z, hz.comp(0, 2))(3.0) == doctest::Approx(1.0));
  CHECK(hz.get(z, hz.comp(0, 0)).is_zero());
}

TEST_CASE("linearized Ricci annihilates Lie derivatives") {
  std::vector<double> L{1.0, 1.3};
  ModeExpansion X(L, 1);
  X.add(key({1, 0}), 0, RadialProfile::exponential(1.0, -0.7));
  X.add(key({1, 1}, Phase::Sin), 1, RadialProfile::monomial(2.0, 1, 0.3));
  X.add(key({0, 1}), 2, RadialProfile::monomial(-1.0, 2, 0.0));
  auto lr = ops::linearized_ricci(ops::sym_grad(X));
  CHECK(lr.coefficient_sup(0, 2) < 1e-9);
}

TEST_CASE("linearized Ricci of TT exponential and r^2 B0") {
  TorusCrossSection cs(3, {2 * M_PI, 2 * M_PI, 2 * M_PI}, 1);
  auto tt = build_spectrum(cs, ModeKind::TTTensor);
  ModeExpansion metric(cs.lengths, 2);
  for (int i = 0; i < 4; ++i) metric.add(key({0, 0, 0}), metric.comp(i, i), RadialProfile::constant(1.0));
  CHECK(ops::linearized_ricci(metric).is_zero());
  for (auto& m : tt.modes) {
    ModeExpansion h(cs.lengths, 2);
    if (m.mu > 0) {
      h.add_mode(m, RadialProfile::exponential(1.0, -std::sqrt(m.mu)));
      CHECK(ops::linearized_ricci(h).coefficient_sup(0, 3) < 1e-12);
    } else {
      h.add_mode(m, RadialProfile::monomial(1.0, 2, 0.0));
      ModeExpansion expect(cs.lengths, 2);
      expect.add_mode(m, RadialProfile::constant(-2.0));
      CHECK((ops::linearized_ricci(h) - expect).coefficient_sup(0, 3) < 1e-12);
    }
  }
}

TEST_CASE("gauge operator on coclosed modes") {
  TorusCrossSection cs(2, {1.0, 1.0}, 1);
  auto co = build_spectrum(cs, ModeKind::CoclosedOneForm);
  const auto& m = co.modes[0];
  ModeExpansion X(cs.lengths, 1);
  auto f = RadialProfile::monomial(1.0, 1, -2.0);
  X.add_mode(m, f);
  ModeExpansion expect(cs.lengths, 1);
  expect.add_mode(m, f * m.mu - f.derivative().derivative());
  CHECK((ops::gauge_operator(X) - expect).coefficient_sup(0, 2) < 1e-9);
}

TEST_CASE("modified divergence of dr x dr") {
  ModeExpansion h({1.0}, 2);
  FourierKey z = key({0});
  h.add(z, h.comp(0, 0), RadialProfile::constant(1.0));
  auto w = ops::modified_divergence(h, 0.1);
  CHECK(w.get(z, 0)(0.5) == doctest::Approx(-0.1));
  CHECK(ops::modified_divergence(h, 0.0).is_zero());
}

TEST_CASE("tube norm of decaying mode") {
  TorusCrossSection cs(3, {1, 1, 1}, 1);
  auto tt = build_spectrum(cs, ModeKind::TTTensor);
  ModeExpansion h(cs.lengths, 2);
  h.add_mode(tt.modes.back(), RadialProfile::exponential(1.0, -1.0));
  CHECK(h.tube_norm(0, 1) == doctest::Approx((1 - std::exp(-2.0)) / 2).epsilon(1e-12));
}
