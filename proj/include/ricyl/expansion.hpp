#pragma once

#include <functional>
#include <map>
#include <vector>

#include "ricyl/cross_section.hpp"
#include "ricyl/profile.hpp"

namespace ricyl {

// Field on R x T^d: sum over Fourier keys of e_{k,phase}(x) times a radial profile per
// tensor component. Cylinder index 0 is r, 1..d are torus coordinates. Rank-2 tensors
// are symmetric and stored packed (sym_index).
class ModeExpansion {
 public:
  using Components = std::vector<RadialProfile>;

  ModeExpansion() = default;
  ModeExpansion(std::vector<double> lengths, int rank);

  int rank() const { return rank_; }
  int dim() const { return (int)lengths_.size(); }
  int n() const { return dim() + 1; }
  int num_components() const;
  const std::vector<double>& lengths() const { return lengths_; }
  TorusCrossSection torus(int cutoff = 1) const { return TorusCrossSection(dim(), lengths_, cutoff); }

  const std::map<FourierKey, Components>& terms() const { return terms_; }
  bool is_zero() const;

  // Adds p * e_{key}(x) to component c. Non-canonical k are folded (sin flips sign).
  void add(const FourierKey& key, int component, const RadialProfile& p);
  void add(const FourierKey& key, int i, int j, const RadialProfile& p) { add(key, comp(i, j), p); }
  // Adds f(r) * mode, embedding the torus polarization into tangential slots.
  void add_mode(const Mode& m, const RadialProfile& f);
  const RadialProfile& get(const FourierKey& key, int component) const;
  int comp(int i, int j) const { return sym_index(i, j, n()); }

  std::vector<double> eval(double r, const std::vector<double>& x) const;
  // Restrict to one key set (predicate on key).
  ModeExpansion filtered(const std::function<bool(const FourierKey&)>& keep) const;
  ModeExpansion map_profiles(const std::function<RadialProfile(const RadialProfile&)>& f) const;

  ModeExpansion& operator+=(const ModeExpansion& o);
  ModeExpansion& operator-=(const ModeExpansion& o);
  ModeExpansion& operator*=(double s);
  friend ModeExpansion operator+(ModeExpansion a, const ModeExpansion& b) { return a += b; }
  friend ModeExpansion operator-(ModeExpansion a, const ModeExpansion& b) { return a -= b; }
  friend ModeExpansion operator*(double s, ModeExpansion a) { return a *= s; }

  // Scalar multiplication by a radial profile (keeps keys).
  ModeExpansion times(const RadialProfile& f) const;

  // Sup over r in [a,b] (samples) of the coefficient magnitude sum_keys amp*|f|;
  // an upper bound for the pointwise sup norm that is exact for single modes.
  double coefficient_sup(double a, double b, int samples = 201) const;
  // \int_a^b \int_N |h|^2, closed form via Fourier orthogonality.
  double tube_norm(double a, double b) const;

 private:
  void prune();
  std::vector<double> lengths_;
  int rank_ = 0;
  std::map<FourierKey, Components> terms_;
};

namespace ops {

ModeExpansion partial(const ModeExpansion& f, int i);
ModeExpansion gradient(const ModeExpansion& f);     // rank 0 -> 1
ModeExpansion sym_grad(const ModeExpansion& X);     // rank 1 -> 2, d_iX_j + d_jX_i
ModeExpansion divergence(const ModeExpansion& h);   // rank 1 -> 0, rank 2 -> 1, -sum d_i h_i.
ModeExpansion trace(const ModeExpansion& h);        // rank 2 -> 0
ModeExpansion hessian(const ModeExpansion& f);      // rank 0 -> 2
ModeExpansion rough_laplacian(const ModeExpansion& f);  // -sum d_i^2
ModeExpansion scalar_times_metric(const ModeExpansion& f);  // f g_0
ModeExpansion tangential_metric(const ModeExpansion& f);    // f g_N
// (d*d + 2dd*) X = divergence(sym_grad(X))
ModeExpansion gauge_operator(const ModeExpansion& X);
// nabla*nabla h - delta* delta h - nabla^2 tr h  (flat background)
ModeExpansion linearized_ricci(const ModeExpansion& h);
// iota_{d_r} restricted to the k=0 rr and r-a components
ModeExpansion radial_contraction_E0(const ModeExpansion& h);
ModeExpansion modified_divergence(const ModeExpansion& h, double tau);

}  // namespace ops

// Sup over a uniform r-lattice on [a,b] and the torus lattice of the field norm.
double sup_norm(const ModeExpansion& f, double a, double b, int nr = 41, int nx = 8);

}  // namespace ricyl
