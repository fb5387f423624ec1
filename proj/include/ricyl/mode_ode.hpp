#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ricyl/profile.hpp"

namespace ricyl {

// Scalar2x2:  (f, f')' = A (f, f') + (0, alpha),           A = [[0,1],[mu,0]]
// Mixed4x4:   (k, k', l, l')' = A (k, k', l, l') + (0, beta, 0, gamma)
//             A = [[0,1,0,0],[2mu,0,0,-1],[0,0,0,1],[0,mu/2,mu/2,0]]
enum class OdeSystem { Scalar2x2, Mixed4x4 };

Eigen::MatrixXd system_matrix(OdeSystem sys, double mu);
Eigen::MatrixXd fundamental_matrix(OdeSystem sys, double mu, double r);
Eigen::MatrixXd fundamental_matrix_inverse(OdeSystem sys, double mu, double r);

Eigen::Matrix4d mixed_V(double mu);
Eigen::Matrix4d mixed_V_inverse(double mu);
// V^{-1} with the entries exactly as printed (two entries carry 1/(4 mu) instead of 1/(4 sqrt mu)).
Eigen::Matrix4d mixed_V_inverse_printed(double mu);

// f'' - mu f = alpha. mu > 0: growing-rate rows integrate with -\int_r^\infty, decaying rows
// with \int_0^r; mu = 0: f = \int_0^r (r-s) alpha(s) ds.
RadialProfile solve_scalar_mode(double mu, const RadialProfile& alpha);

struct MixedSolution {
  RadialProfile k, l;
  // y = J(r) c(r) coordinates: the four block coefficients, used for diagnostics
  std::vector<RadialProfile> block;
};
MixedSolution solve_mixed_mode(double mu, const RadialProfile& beta, const RadialProfile& gamma);

struct CharacteristicRoot {
  double root;
  int algebraic;
  int geometric;
};
std::vector<CharacteristicRoot> check_characteristic(double mu, OdeSystem sys = OdeSystem::Mixed4x4);
int rank_of(const Eigen::MatrixXd& m, double tol = 1e-10);

// Residuals of the ODE systems on a lattice of [a,b] (sup norm).
double scalar_residual(double mu, const RadialProfile& f, const RadialProfile& alpha, double a, double b);
double mixed_residual(double mu, const RadialProfile& k, const RadialProfile& l, const RadialProfile& beta,
                      const RadialProfile& gamma, double a, double b);

// Richardson-extrapolated central difference of the fundamental matrix.
Eigen::MatrixXd fundamental_matrix_derivative_fd(OdeSystem sys, double mu, double r, double h = 1e-2);

}  // namespace ricyl
