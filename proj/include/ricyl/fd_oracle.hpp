#pragma once

#include <functional>
#include <vector>

#include "ricyl/expansion.hpp"

namespace ricyl {

struct GridSpec {
  double a = 0.0, b = 1.0;
  int nr = 128;
  std::vector<int> nx;          // per torus direction
  std::vector<double> lengths;  // torus side lengths
  bool periodic_r = false;      // r-periodic grids are only used for adjointness checks

  int dim() const { return (int)nx.size(); }
  double dr() const { return periodic_r ? (b - a) / nr : (b - a) / (nr - 1); }
  double dx(int i) const { return lengths[i] / nx[i]; }
  double r(int ir) const { return a + ir * dr(); }
  long tangential_points() const;
  long points() const { return nr * tangential_points(); }
  // max spacing squared
  double h2() const;
  void validate() const;
};

GridSpec make_grid(const std::vector<double>& lengths, double a, double b, int nr, int nx);

// Dense tensor field on a grid; index (point, component), point = ir * Nx + flat torus index.
struct GridField {
  GridSpec spec;
  int rank = 0;
  int ncomp = 1;
  std::vector<double> data;

  GridField() = default;
  GridField(const GridSpec& s, int rank);
  int n() const { return spec.dim() + 1; }
  double& at(long p, int c) { return data[p * ncomp + c]; }
  double at(long p, int c) const { return data[p * ncomp + c]; }
  std::vector<double> component(int c) const;
  void set_component(int c, const std::vector<double>& v);
  GridField& operator+=(const GridField& o);
  GridField& operator-=(const GridField& o);
  GridField& operator*=(double s);
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
};

enum class BoundaryPolicy { OneSided, InteriorRestricted };
struct StencilConfig {
  int order = 2;  // 2 or 4
  BoundaryPolicy boundary = BoundaryPolicy::OneSided;
};

enum class FdOp { Divergence, SymGrad, RoughLaplacian, TraceHessian, LinearizedRicci, Lichnerowicz, GaugeOperator };

// Exact pointwise evaluation (separable in r and x).
GridField sample(const ModeExpansion& f, const GridSpec& g);
GridField sample_function(const GridSpec& g, int rank,
                          const std::function<std::vector<double>(double, const std::vector<double>&)>& f);
// identity metric dr^2 + g_N
GridField flat_metric(const GridSpec& g);

// Weights of the m-th derivative at z from nodes x (Fornberg's algorithm).
std::vector<double> fornberg_weights(double z, const std::vector<double>& x, int m);

std::vector<double> fd_derivative(const GridSpec& g, const std::vector<double>& f, int dir, const StencilConfig& cfg);
std::vector<double> fd_second(const GridSpec& g, const std::vector<double>& f, int dir1, int dir2,
                              const StencilConfig& cfg);

GridField fd_operator(FdOp op, const GridField& f, const StencilConfig& cfg = {});
GridField nonlinear_ricci(const GridField& metric, const StencilConfig& cfg = {});
// Riemann tensor R_{abcd} of a metric, pointwise contraction (R h)_{ij} = R_{ikjl} h_{kl}.
GridField curvature_action(const GridField& metric, const GridField& h, const StencilConfig& cfg = {});

// sup of the pointwise tensor norm over the band [a + band dr, b - band dr]
double interior_sup(const GridField& f, int band = 5);
double l2_inner(const GridField& u, const GridField& v);

struct RemainderScan {
  std::vector<double> epsilon, remainder;
  double slope = 0.0;
  bool identically_zero = false;
};
// ||Ric(g0 + eps h) - eps L(h)|| with L(h) = (1/2) D Ric(h) evaluated exactly.
RemainderScan quadratic_remainder_scan(const ModeExpansion& h, const std::vector<double>& eps, const GridSpec& g,
                                       const StencilConfig& cfg = {});

constexpr double kMaxGridEntries = 2e8;

}  // namespace ricyl
