#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "ricyl/expansion.hpp"
#include "ricyl/profile.hpp"

namespace ricyl {

// (c0 + c1 (t-s)) e^{-sqrt(mu)|t-s|}
struct KernelBranch {
  double c0 = 0.0, c1 = 0.0;
  double eval(double u, double q) const { return (c0 + c1 * u) * std::exp(-q * std::abs(u)); }
};

struct KernelBlock {
  KernelBranch after;   // t > s
  KernelBranch before;  // t < s
  double eval(double q, double t, double s) const { return t >= s ? after.eval(t - s, q) : before.eval(t - s, q); }
};

// Type-2 kernel blocks, as coefficients of
//   dd: d_N phi(x) (x) d_N phi(y)     lb: phi(x) dr (x) d_N phi(y)
//   kc: phi(y) dr (x) d_N phi(x)      lc: phi(x) dr (x) phi(y) dr
struct Type2Kernel {
  KernelBlock dd, lb, kc, lc;
};
struct Type2Value {
  double dd, lb, kc, lc;
};

double eval_type1(double mu, double t, double s);
Type2Kernel type2_kernel(double mu);
Type2Kernel type2_kernel_printed(double mu);
Type2Value eval_type2(double mu, double t, double s);
Type2Value eval_type2_printed(double mu, double t, double s);

// \int_0^\infty K(t,s) src(s) ds, closed form (src is clipped to s >= 0).
RadialProfile convolve(const KernelBlock& K, double q, const RadialProfile& src);

// Coefficients of a 1-form on the cylinder in the mode types used by the solvers.
//   scalar[phi]   : b d_N phi + c phi dr   (k != 0)
//   coclosed[key] : tangential vector profile orthogonal to kappa, times e_key
//   zero_sector   : the k = 0 part as a rank-1 expansion
struct ScalarSource {
  RadialProfile b, c;
};
struct SourceExpansion {
  std::vector<double> lengths;
  std::map<FourierKey, ScalarSource> scalar;
  std::map<FourierKey, std::vector<RadialProfile>> coclosed;
  ModeExpansion zero_sector;

  bool has_zero_sector() const { return !zero_sector.is_zero(); }
};

SourceExpansion decompose_one_form(const ModeExpansion& w);
ModeExpansion assemble_one_form(const SourceExpansion& s);
// k d_N phi + l phi dr  as a rank-1 expansion
ModeExpansion scalar_type_one_form(const std::vector<double>& lengths, const FourierKey& phi, const RadialProfile& k,
                                   const RadialProfile& l);

enum class GreenVariant { Corrected, Printed };

// Solves (d*d + 2dd*) X = w for w with no k = 0 part, by kernel convolution over s >= 0.
ModeExpansion apply_green(const SourceExpansion& src, GreenVariant v = GreenVariant::Corrected);

enum class SourceType { OneForm, Function };  // coclosed (type 1) / scalar (type 2)

struct WeightedBoundFit {
  std::vector<double> rho, ratio, log_gap;
  double p = 0.0;
  double intercept = 0.0;
};

// Cutoff psi(r): 0 for r <= -1, 1 for r >= 0, smooth in between.
double cutoff_psi(double r, int derivative = 0);
// max_{i+m<=k} |kappa|^m sup_r |d_r^i (psi e^{rho r} f)|, combined over the given profiles.
double weighted_ck_norm(const std::vector<RadialProfile>& f, const std::vector<double>& scale, double kappa, double rho,
                        int k, double q_gap);

// ||X||_{k+2;rho} / ||w||_{k;rho} for worst-case single-mode sources at eigenvalue mu1.
double weighted_bound_ratio(double mu1, double rho, SourceType type, int k = 0);
WeightedBoundFit estimate_weighted_bound(double mu1, const std::vector<double>& rho_samples, SourceType type,
                                         int k = 0);

}  // namespace ricyl
