#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ricyl/cross_section.hpp"
#include "ricyl/expansion.hpp"

namespace ricyl {

// Squared L^2 norms over tubes [t_j L, (t_j + 1) L] x N.
struct TubeNormSeries {
  double L = 1.0;
  std::vector<int> offsets;
  std::vector<double> values;
};

struct ThreeCirclesParams {
  double mu1 = 1.0;
  double beta = 0.5;
  double beta_prime = 0.1;
  double L = 1.0;
  int t1 = 0, t2 = 1, t3 = 2;
};

struct ThreeCirclesResult {
  bool holds = true;
  double slack = 0.0;  // e^{-2 beta' L}(N1 + N3) / N2; infinite when N2 = 0
  double n1 = 0.0, n2 = 0.0, n3 = 0.0;
};

double tube_norm(const ModeExpansion& h, double a, double b);
// Gauss-Legendre in r, trapezoid on the torus (exact for the trigonometric factor).
double tube_norm_quadrature(const ModeExpansion& h, double a, double b, int panels = 16, int nx = 0);
TubeNormSeries tube_norm_series(const ModeExpansion& h, double L, const std::vector<int>& offsets);

// P(t) = t^2 + t + 1/3, the r B~0 tube norm divided by L^3
double linear_profile_norm(double t);
double beta_prime_bound(double beta, double L, int t2, int t3);
// throws InvalidParams
void validate(const ThreeCirclesParams& p);

ThreeCirclesResult three_circles_check(const ModeExpansion& h, const ThreeCirclesParams& p);
ThreeCirclesResult three_circles_from_norms(double n1, double n2, double n3, double beta_prime, double L);

// Removes the constant g_N and parallel TT parts.
ModeExpansion project_out_parallel(const ModeExpansion& h, double tau = 0.0);

enum class Dominance { Left, Right, Both, Neither };
std::string to_string(Dominance d);

struct MonotonicityReport {
  std::vector<Dominance> steps;  // interior indices 1..n-2
  std::vector<int> violations;   // indices where neither side dominates
  std::vector<int> propagation_failures;
};
MonotonicityReport monotonicity_classify(const TubeNormSeries& s, double beta_prime);

// Random field of the form  a~ r g_N + r B~0 + sum (a+ e^{q r} + a- e^{-q r}) B_i  (k != 0 TT modes).
ModeExpansion random_kernel_form(const TorusCrossSection& cs, std::mt19937_64& rng, int max_modes = 5,
                                 bool with_linear = true);
// Random valid parameters with mu1 fixed.
ThreeCirclesParams random_params(double mu1, std::mt19937_64& rng, int max_offset = 5);

struct PerturbedTrials {
  int trials = 0;
  int passed = 0;
  double pass_rate = 0.0;
  double max_perturbation = 0.0;
};
// Adds chi-small perturbations (k != 0 TT modes with non-exponential profiles, hence still
// delta-free, trace-free and without parallel part) to normalized kernel fields.
PerturbedTrials perturbed_three_circles_trial(const TorusCrossSection& cs, const ThreeCirclesParams& p, double chi,
                                              int trials, std::uint64_t seed);
// Bisection on chi for the first failing perturbation size (diagnostic).
double perturbation_failure_threshold(const TorusCrossSection& cs, const ThreeCirclesParams& p, int trials,
                                      std::uint64_t seed, double chi_hi = 10.0, int iterations = 30);

}  // namespace ricyl
