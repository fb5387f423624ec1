#include <cmath>

#include "doctest.h"
#include "ricyl/errors.hpp"
#include "ricyl/profile.hpp"

using namespace ricyl;

TEST_CASE("terms merge and prune") {
  RadialProfile p({{1.0, 1, -2.0}, {2.0, 1, -2.0}, {0.0, 0, 1.0}});
  REQUIRE(p.terms().size() == 1);
  CHECK(p.terms()[0].c == doctest::Approx(3.0));
  auto z = p - p;
  CHECK(z.is_zero());
}

TEST_CASE("evaluation and derivative") {
  auto p = RadialProfile::monomial(2.0, 1, -0.5) + RadialProfile::constant(1.0);
  double r = 1.3;
  CHECK(p(r) == doctest::Approx(2 * r * std::exp(-0.5 * r) + 1));
  double h = 1e-5;
  CHECK(p.derivative()(r) == doctest::Approx((p(r + h) - p(r - h)) / (2 * h)).epsilon(1e-8));
  CHECK(p.eval_weighted(r, 0.5) == doctest::Approx(2 * r + std::exp(0.5 * r)));
}

TEST_CASE("running and tail integrals") {
  auto p = RadialProfile::monomial(1.0, 2, -1.5);
  auto I = p.running_integral();
  auto T = p.tail_integral();
  for (double r : {-1.0, 0.0, 0.7, 4.0}) {
    CHECK(I.derivative()(r) == doctest::Approx(p(r)).epsilon(1e-12));
    CHECK(T.derivative()(r) == doctest::Approx(-p(r)).epsilon(1e-12));
  }
  CHECK(I(0.0) == doctest::Approx(0.0));
  CHECK(T(50.0) == doctest::Approx(0.0));
  CHECK(I(3.0) + T(3.0) == doctest::Approx(p.integrate(0.0, kInf)));
  CHECK_THROWS_AS(RadialProfile::constant(1.0).tail_integral(), DivergentConvolution);
}

TEST_CASE("windowed integrals") {
  auto box = RadialProfile::constant(1.0).restricted(0.0, 10.0);
  auto I = box.running_integral();
  CHECK(I(-3.0) == doctest::Approx(0.0));
  CHECK(I(4.0) == doctest::Approx(4.0));
  CHECK(I(25.0) == doctest::Approx(10.0));
  auto T = box.tail_integral();
  CHECK(T(-2.0) == doctest::Approx(10.0));
  CHECK(T(3.0) == doctest::Approx(7.0));
  CHECK(T(12.0) == doctest::Approx(0.0));
  CHECK(box.integrate(-5, 5) == doctest::Approx(5.0));
}

TEST_CASE("product") {
  auto a = RadialProfile::exponential(2.0, 1.0);
  auto b = RadialProfile::monomial(3.0, 1, -1.0).restricted(0.0, 2.0);
  auto c = a * b;
  CHECK(c(1.0) == doctest::Approx(6.0));
  CHECK(c(3.0) == doctest::Approx(0.0));
  CHECK(c.integrate(0, 2) == doctest::Approx(12.0));
}
