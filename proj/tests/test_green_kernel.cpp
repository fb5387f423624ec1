#include <cmath>

#include "doctest.h"
#include "ricyl/errors.hpp"
#include "ricyl/green_kernel.hpp"
#include "ricyl/mode_ode.hpp"

using namespace ricyl;

TEST_CASE("kernel values") {
  CHECK(eval_type1(4.0, 1.0, 1.0) == doctest::Approx(0.25));
  auto v = eval_type2(1.0, 1e-14, 0.0);
  CHECK(v.dd == doctest::Approx(3.0 / 8));
  CHECK(v.lc == doctest::Approx(3.0 / 8));
  auto w = eval_type2_printed(1.0, 1e-14, 0.0);
  CHECK(w.lc == doctest::Approx(3.0 / 4));
  for (double mu : {0.5, 2.0}) {
    auto a = eval_type2(mu, 1e-12, 0.0), b = eval_type2(mu, -1e-12, 0.0);
    CHECK(a.dd == doctest::Approx(b.dd));
    CHECK(a.lb == doctest::Approx(b.lb));
    CHECK(a.kc == doctest::Approx(b.kc));
    CHECK(a.lc == doctest::Approx(b.lc));
  }
  CHECK_THROWS_AS(eval_type1(0.0, 0, 0), InvalidArgument);
}

TEST_CASE("kernel convolution agrees with variation of parameters") {
  auto b = RadialProfile::monomial(1.0, 1, -0.4).restricted(0, kInf);
  auto c = RadialProfile::exponential(0.7, -1.3).restricted(0, kInf);
  for (double mu : {0.6, 1.0, 3.0}) {
    double q = std::sqrt(mu);
    auto K = type2_kernel(mu);
    auto k = convolve(K.dd, q, b) * mu + convolve(K.kc, q, c);
    auto l = convolve(K.lb, q, b) * mu + convolve(K.lc, q, c);
    auto sol = solve_mixed_mode(mu, -b, c * -0.5);
    for (double r : {0.3, 1.0, 4.0, 9.0}) {
      CHECK(k(r) == doctest::Approx(sol.k(r)).epsilon(1e-10));
      CHECK(l(r) == doctest::Approx(sol.l(r)).epsilon(1e-10));
    }
    auto a = RadialProfile::exponential(1.0, -0.2).restricted(0, kInf);
    KernelBlock g{{1 / (2 * q), 0}, {1 / (2 * q), 0}};
    auto f = convolve(g, q, a);
    auto f2 = solve_scalar_mode(mu, -a);
    CHECK(f(2.0) == doctest::Approx(f2(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("decompose and apply green") {
  std::vector<double> L{2 * M_PI, 2 * M_PI};
  ModeExpansion w(L, 1);
  auto s1 = RadialProfile::exponential(1.0, -0.5).restricted(0, kInf);
  auto s2 = RadialProfile::monomial(1.0, 2, -1.0).restricted(0, kInf);
  w.add({{1, 1}, Phase::Cos}, 0, s1);
  w.add({{1, 1}, Phase::Sin}, 1, s2);
  w.add({{0, 1}, Phase::Cos}, 1, s1 * 0.3);
  w.add({{1, 0}, Phase::Sin}, 2, s2 * -1.0);
  auto src = decompose_one_form(w);
  CHECK((assemble_one_form(src) - w).coefficient_sup(0, 5) < 1e-13);
  auto X = apply_green(src);
  CHECK((ops::gauge_operator(X) - w).coefficient_sup(0.01, 10) < 1e-10);
  auto Xp = apply_green(src, GreenVariant::Printed);
  CHECK((ops::gauge_operator(Xp) - w).coefficient_sup(0.01, 10) > 1e-3);
}

TEST_CASE("weighted bound exponents") {
  auto f1 = estimate_weighted_bound(1.0, {0.9, 0.95, 0.98, 0.99}, SourceType::OneForm);
  CHECK(f1.p == doctest::Approx(1.0).epsilon(0.15));
  auto f2 = estimate_weighted_bound(1.0, {0.9, 0.95, 0.98, 0.99}, SourceType::Function);
  CHECK(f2.p == doctest::Approx(2.0).epsilon(0.15));
}
