#pragma once

#include <map>
#include <string>
#include <vector>

#include "ricyl/cross_section.hpp"
#include "ricyl/divergence_solver.hpp"
#include "ricyl/expansion.hpp"

namespace ricyl {

struct ExpCoeffs {
  double plus = 0.0;   // e^{+sqrt(mu) r}
  double minus = 0.0;  // e^{-sqrt(mu) r}
};

struct ModeLabel {
  ModeKind kind = ModeKind::TTTensor;
  FourierKey key;
  int pol_index = 0;
  friend bool operator<(const ModeLabel& a, const ModeLabel& b);
};
std::string to_string(const ModeLabel& m);

// Window on which profiles are sampled for fitting and residual certificates.
struct FitWindow {
  double a = 0.0, b = 2.0;
  int points = 24;
};

ModeExpansion linearized_ricci(const ModeExpansion& h);

struct TraceSplit {
  double c0 = 0.0, c1 = 0.0;  // affine part c0 + c1 r (tensor units)
  std::map<FourierKey, ExpCoeffs> modes;
  ModeExpansion remainder;  // mu > 0 part of the trace (rank 0)
  double laplacian_residual = 0.0;
  double fit_residual = 0.0;
};
// Accepts a 2-tensor (its trace is used) or a function.
TraceSplit harmonic_trace_split(const ModeExpansion& h, const FitWindow& w = {}, double tol = 1e-8);

struct TraceAbsorption {
  GaugeField X;
  ModeExpansion lie;  // L_X g0 assembled from the explicit blocks
  std::map<FourierKey, ExpCoeffs> coeffs;
};
// X with tr(L_X g0) = sum c^± e^{±sqrt(mu) r} phi and delta(L_X g0) = 0.
TraceAbsorption trace_absorption_field(const std::vector<double>& lengths,
                                       const std::map<FourierKey, ExpCoeffs>& coeffs);

struct ReducedSector {
  std::vector<int> k;
  double mu = 0.0;
  std::string ansatz;
  int dimension = 0;
  int expected = 0;
  std::vector<ModeExpansion> basis;
};
struct ReducedSystem {
  double tau = 0.0;
  int parallel_dimension = 0;
  int parallel_expected = 0;
  std::vector<ModeExpansion> parallel_basis;
  std::vector<ReducedSector> sectors;  // k = 0 first
};
// Null space of (D Ric, delta_tau, non-affine trace) over a polynomial x exponential ansatz,
// per frequency; the parallel sector uses r-independent tensors.
ReducedSystem solve_reduced_system(const TorusCrossSection& cs, double tau, bool parallel_only = false);
int parallel_dimension_expected(int d, double tau);

// Least-squares distance of h from span(basis) in exact coefficient space (relative).
double span_residual(const std::vector<ModeExpansion>& basis, const ModeExpansion& h);

struct GaugeY {
  double c = 0.0, c_prime = 0.0;  // Y = (c r + c') dr + r eta  (tau = 0)
  std::vector<double> eta;
  std::vector<double> eta_tau;  // tau > 0: e^{-tau r} dr (x) eta_tau
};

struct KernelDecomposition {
  std::vector<double> lengths;
  double tau = 0.0;
  TraceAbsorption gauge_X;
  GaugeY gauge_Y;
  double a = 0.0, a_tilde = 0.0;     // a g_N + a~ r g_N
  std::vector<double> parallel_TT;   // per parallel TT polarization (mode units)
  std::vector<double> linear_TT;     // coefficient of r B~0 per polarization
  std::map<ModeLabel, ExpCoeffs> exp_modes;
  std::map<ModeLabel, ExpCoeffs> exp_gauge;  // L_Y g0 for Y = e^{±}eta (coclosed) or d(e^{±} phi)
  std::map<ModeLabel, ExpCoeffs> osc_modes;  // always empty on flat tori

  double ricci_residual = 0.0;
  double divergence_residual = 0.0;
  double fit_residual = 0.0;
  double condition = 1.0;
  double reconstruction_error = 0.0;

  ModeExpansion reconstruct() const;
};

KernelDecomposition classify_kernel(const ModeExpansion& h, double tau, const FitWindow& w = {}, double tol = 1e-8);

// Basis tensors used by the classification.
ModeExpansion exp_mode_tensor(const std::vector<double>& lengths, const ModeLabel& m, int sign);
ModeExpansion exp_gauge_tensor(const std::vector<double>& lengths, const ModeLabel& m, int sign);
std::vector<std::vector<double>> parallel_tt_basis(int d);

}  // namespace ricyl
