#pragma once

#include <map>
#include <string>
#include <vector>

#include "ricyl/cross_section.hpp"
#include "ricyl/expansion.hpp"

namespace ricyl {

enum class Sector { Finite, Infinite };  // mu = 0 / mu > 0
enum class Growth { Decaying, Bounded, Polynomial, Exponential };
std::string to_string(Sector s);
std::string to_string(Growth g);

enum class InfiniteRoute { Kernel, VariationOfParameters };

struct DivergenceConfig {
  double tau = 0.01;
  double rho = 0.0;
  InfiniteRoute route = InfiniteRoute::Kernel;
  // extra eigenvalues to test against the resonance guard (besides the source's own keys)
  std::vector<double> spectrum;
};

struct GaugeField {
  ModeExpansion one_form;  // X^sharp
  std::map<FourierKey, Sector> sector;
  std::map<FourierKey, Growth> growth;
};

Growth growth_class(const RadialProfile& p);
GaugeField make_gauge_field(const ModeExpansion& X);

ModeExpansion lie_derivative_metric(const GaugeField& X);
ModeExpansion modified_divergence(const ModeExpansion& h, double tau);

// throws ResonantTau if |4 tau^2 - mu| <= 1e-6 for a positive eigenvalue
void check_resonance(double tau, const std::vector<double>& eigenvalues);

// X with delta_tau(L_X g0) = delta_tau(source).
GaugeField solve_gauge(const ModeExpansion& source, const DivergenceConfig& cfg = {});
// Same, given the rank-1 right-hand side w = delta_tau(source) directly.
GaugeField solve_gauge_rhs(const ModeExpansion& w, const DivergenceConfig& cfg = {});

// sup over [a,b] of the coefficients of delta_tau(L_X g0) - delta_tau(source)
double gauge_residual(const GaugeField& X, const ModeExpansion& source, double tau, double a, double b);

}  // namespace ricyl
