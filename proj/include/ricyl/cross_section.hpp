#pragma once

#include <string>
#include <vector>

namespace ricyl {

enum class Phase { Cos, Sin };
enum class ModeKind { Scalar, CoclosedOneForm, HarmonicOneForm, TTTensor, PureTrace };

const char* to_string(Phase p);
const char* to_string(ModeKind k);
Phase phase_from_string(const std::string& s);
ModeKind kind_from_string(const std::string& s);

// Real Fourier function e_{k,phase} on the torus. k is canonical: k = 0 (cos only) or
// first nonzero entry positive.
struct FourierKey {
  std::vector<int> k;
  Phase phase = Phase::Cos;

  bool is_zero() const;
  FourierKey partner() const { return {k, phase == Phase::Cos ? Phase::Sin : Phase::Cos}; }
  friend bool operator<(const FourierKey& a, const FourierKey& b);
  friend bool operator==(const FourierKey& a, const FourierKey& b) { return a.k == b.k && a.phase == b.phase; }
};

bool is_canonical(const std::vector<int>& k);
// Canonical representative; flips sign if needed. sign_out is -1 when k was negated
// (cos is even, sin changes sign).
std::vector<int> canonicalize(const std::vector<int>& k, int* sign_out = nullptr);

struct TorusCrossSection {
  int dim = 1;
  std::vector<double> lengths{1.0};
  int freq_cutoff = 1;

  TorusCrossSection() = default;
  TorusCrossSection(int d, std::vector<double> l, int cutoff);

  void validate() const;
  double volume() const;
  std::vector<double> wavevector(const std::vector<int>& k) const;
  double eigenvalue(const std::vector<int>& k) const;
  // Normalized amplitude of e_{k,phase}: 1/sqrt(vol) for k=0, sqrt(2/vol) otherwise.
  double amplitude(const std::vector<int>& k) const;
  double fourier(const FourierKey& key, const std::vector<double>& x) const;
  // Canonical nonzero frequency vectors with |k_j| <= cutoff.
  std::vector<std::vector<int>> canonical_frequencies(bool include_zero) const;
};

// Polarization: vector (length d) for 1-forms, packed upper-triangular symmetric d×d
// matrix (row-major i<=j) for 2-tensors, empty for scalars.
struct Mode {
  ModeKind kind = ModeKind::Scalar;
  std::vector<int> k;
  double mu = 0.0;
  std::vector<double> polarization;
  Phase phase = Phase::Cos;
  int pol_index = 0;

  int rank() const;
  FourierKey key() const { return {k, phase}; }
};

struct Spectrum {
  std::vector<Mode> modes;
  double mu1 = 0.0;
};

int sym_index(int i, int j, int n);
int sym_size(int n);

// Orthonormal bases of the polarization spaces.
std::vector<std::vector<double>> coclosed_polarizations(const std::vector<double>& kappa);
// Frobenius-orthonormal packed d×d symmetric, traceless, kappa-transverse matrices.
std::vector<std::vector<double>> tt_polarizations(const std::vector<double>& kappa);

Spectrum build_spectrum(const TorusCrossSection& cs, ModeKind rank);
double spectral_gap(const TorusCrossSection& cs);

// Full tensor value of the mode at x (vector for rank 1, packed for rank 2, size 1 for scalars).
std::vector<double> evaluate_mode(const TorusCrossSection& cs, const Mode& m, const std::vector<double>& x);

struct PointwiseImages {
  double laplacian_eigenvalue = 0.0;
  // Coefficient of the divergence image (a scalar/1-form mode of the same key or its partner).
  std::vector<double> divergence_image;
  FourierKey divergence_key;
  double trace_image = 0.0;
};
PointwiseImages pointwise_operators(const TorusCrossSection& cs, const Mode& m);

double l2_inner_product_quadrature(const TorusCrossSection& cs, const Mode& a, const Mode& b, int n_per_dim);

}  // namespace ricyl
