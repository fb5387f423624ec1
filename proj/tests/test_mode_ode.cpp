#include <cmath>

#include "doctest.h"
#include "ricyl/errors.hpp"
#include "ricyl/mode_ode.hpp"

using namespace ricyl;

TEST_CASE("fundamental matrices at known points") {
  auto P = fundamental_matrix(OdeSystem::Scalar2x2, 0.0, 2.0);
  CHECK(P(0, 0) == 1.0);
  CHECK(P(0, 1) == 2.0);
  CHECK(P(1, 0) == 0.0);
  CHECK(P(1, 1) == 1.0);
  auto Q = fundamental_matrix(OdeSystem::Scalar2x2, 1.0, 0.0);
  CHECK(Q(0, 0) == 1.0);
  CHECK(Q(0, 1) == 1.0);
  CHECK(Q(1, 0) == 1.0);
  CHECK(Q(1, 1) == -1.0);
  auto M = fundamental_matrix(OdeSystem::Mixed4x4, 1.0, 0.0);
  CHECK((M - Eigen::MatrixXd(mixed_V(1.0))).norm() < 1e-15);
}

TEST_CASE("fundamental matrices solve the homogeneous systems") {
  for (auto sys : {OdeSystem::Scalar2x2, OdeSystem::Mixed4x4}) {
    for (double mu : {0.0, 0.3, 1.0, 39.0}) {
      for (double r : {-1.5, 0.0, 0.7, 2.0}) {
        auto P = fundamental_matrix(sys, mu, r);
        auto dP = fundamental_matrix_derivative_fd(sys, mu, r, 1e-2 / std::max(1.0, std::sqrt(mu)));
        auto A = system_matrix(sys, mu);
        CHECK((dP - A * P).norm() <= 1e-8 * std::max(1.0, P.norm()));
        auto Pi = fundamental_matrix_inverse(sys, mu, r);
        CHECK((Pi * P - Eigen::MatrixXd::Identity(P.rows(), P.cols())).norm() < 1e-14 * P.norm() * Pi.norm());
      }
    }
  }
}

TEST_CASE("printed V inverse is not an inverse") {
  double mu = 4.0;
  auto I4 = Eigen::Matrix4d::Identity();
  CHECK((mixed_V_inverse(mu) * mixed_V(mu) - I4).norm() < 1e-14);
  CHECK((mixed_V_inverse_printed(mu) * mixed_V(mu) - I4).norm() > 0.1);
}

TEST_CASE("scalar mode solutions") {
  auto f = solve_scalar_mode(1.0, RadialProfile::exponential(1.0, -1.0).restricted(0, kInf));
  for (double r : {0.5, 1.0, 3.0}) CHECK(f(r) == doctest::Approx(-(r / 2 + 0.25) * std::exp(-r)));
  auto g = solve_scalar_mode(0.0, RadialProfile::constant(1.0));
  CHECK(g(3.0) == doctest::Approx(4.5));
  auto alpha = RadialProfile::monomial(2.0, 1, -3.0).restricted(0, kInf);
  auto h = solve_scalar_mode(2.0, alpha);
  CHECK(scalar_residual(2.0, h, alpha, 0.01, 8) < 1e-12);
  CHECK_THROWS_AS(solve_scalar_mode(1.0, RadialProfile::exponential(1.0, 1.5)), DivergentConvolution);
}

TEST_CASE("mixed mode solutions") {
  auto beta = RadialProfile::monomial(1.0, 1, -0.5).restricted(0, kInf);
  auto gamma = RadialProfile::exponential(-2.0, -2.5).restricted(0, kInf);
  for (double mu : {0.5, 1.0, 4.0}) {
    auto sol = solve_mixed_mode(mu, beta, gamma);
    CHECK(mixed_residual(mu, sol.k, sol.l, beta, gamma, 0.01, 10) < 1e-10);
  }
}

TEST_CASE("characteristic multiplicities") {
  auto roots = check_characteristic(1.0);
  REQUIRE(roots.size() == 2);
  for (auto& c : roots) {
    CHECK(c.algebraic == 2);
    CHECK(c.geometric == 1);
  }
  auto A = system_matrix(OdeSystem::Mixed4x4, 1.0);
  CHECK(rank_of(A - Eigen::MatrixXd::Identity(4, 4)) == 3);
  auto z = check_characteristic(0.0);
  CHECK(z[0].algebraic == 4);
}
