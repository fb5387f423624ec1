#include "ricyl/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "ricyl/errors.hpp"

namespace ricyl {

const char* to_string(Phase p) { return p == Phase::Cos ? "cos" : "sin"; }

const char* to_string(ModeKind k) {
  switch (k) {
    case ModeKind::Scalar: return "Scalar";
    case ModeKind::CoclosedOneForm: return "CoclosedOneForm";
    case ModeKind::HarmonicOneForm: return "HarmonicOneForm";
    case ModeKind::TTTensor: return "TTTensor";
    case ModeKind::PureTrace: return "PureTrace";
  }
  return "?";
}

Phase phase_from_string(const std::string& s) {
  if (s == "cos") return Phase::Cos;
  if (s == "sin") return Phase::Sin;
  throw InvalidArgument("unknown phase '" + s + "'");
}

ModeKind kind_from_string(const std::string& s) {
  for (auto k : {ModeKind::Scalar, ModeKind::CoclosedOneForm, ModeKind::HarmonicOneForm, ModeKind::TTTensor,
                 ModeKind::PureTrace})
    if (s == to_string(k)) return k;
  if (s == "TT") return ModeKind::TTTensor;
  throw InvalidArgument("unknown mode kind '" + s + "'");
}

bool FourierKey::is_zero() const {
  return std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
}

bool operator<(const FourierKey& a, const FourierKey& b) {
  return std::tie(a.k, a.phase) < std::tie(b.k, b.phase);
}

bool is_canonical(const std::vector<int>& k) {
  for (int v : k) {
    if (v > 0) return true;
    if (v < 0) return false;
  }
  return true;
}

std::vector<int> canonicalize(const std::vector<int>& k, int* sign_out) {
  if (is_canonical(k)) {
    if (sign_out) *sign_out = 1;
    return k;
  }
  std::vector<int> m(k.size());
  for (size_t i = 0; i < k.size(); ++i) m[i] = -k[i];
  if (sign_out) *sign_out = -1;
  return m;
}

TorusCrossSection::TorusCrossSection(int d, std::vector<double> l, int cutoff)
    : dim(d), lengths(std::move(l)), freq_cutoff(cutoff) {
  validate();
}

void TorusCrossSection::validate() const {
  if (dim < 1) throw InvalidArgument("cross-section dimension must be >= 1");
  if ((int)lengths.size() != dim) throw InvalidArgument("need one side length per torus direction");
  for (double l : lengths)
    if (!(l > 0)) throw InvalidArgument("torus side lengths must be positive");
  if (freq_cutoff < 1) throw InvalidArgument("frequency cutoff must be >= 1");
}

double TorusCrossSection::volume() const {
  return std::accumulate(lengths.begin(), lengths.end(), 1.0, std::multiplies<>());
}

std::vector<double> TorusCrossSection::wavevector(const std::vector<int>& k) const {
  std::vector<double> kap(dim);
  for (int a = 0; a < dim; ++a) kap[a] = 2.0 * M_PI * k[a] / lengths[a];
  return kap;
}

double TorusCrossSection::eigenvalue(const std::vector<int>& k) const {
  double s = 0;
  for (double v : wavevector(k)) s += v * v;
  return s;
}

double TorusCrossSection::amplitude(const std::vector<int>& k) const {
  bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
  return zero ? 1.0 / std::sqrt(volume()) : std::sqrt(2.0 / volume());
}

double TorusCrossSection::fourier(const FourierKey& key, const std::vector<double>& x) const {
  auto kap = wavevector(key.k);
  double arg = 0;
  for (int a = 0; a < dim; ++a) arg += kap[a] * x[a];
  double amp = amplitude(key.k);
  if (key.is_zero()) return key.phase == Phase::Cos ? amp : 0.0;
  return amp * (key.phase == Phase::Cos ? std::cos(arg) : std::sin(arg));
}

std::vector<std::vector<int>> TorusCrossSection::canonical_frequencies(bool include_zero) const {
  std::vector<std::vector<int>> out;
  std::vector<int> k(dim, -freq_cutoff);
  while (true) {
    bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    if (zero ? include_zero : is_canonical(k)) out.push_back(k);
    int a = dim - 1;
    while (a >= 0 && k[a] == freq_cutoff) k[a--] = -freq_cutoff;
    if (a < 0) break;
    ++k[a];
  }
  return out;
}

int Mode::rank() const {
  switch (kind) {
    case ModeKind::Scalar: return 0;
    case ModeKind::CoclosedOneForm:
    case ModeKind::HarmonicOneForm: return 1;
    default: return 2;
  }
}

int sym_size(int n) { return n * (n + 1) / 2; }

int sym_index(int i, int j, int n) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Frobenius inner product of packed symmetric matrices.
double frob(const std::vector<double>& a, const std::vector<double>& b, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      int q = sym_index(i, j, d);
      s += (i == j ? 1.0 : 2.0) * a[q] * b[q];
    }
  return s;
}

template <class Inner>
std::vector<std::vector<double>> gram_schmidt(const std::vector<std::vector<double>>& cand, Inner inner) {
  std::vector<std::vector<double>> basis;
  for (auto v : cand) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        double c = inner(v, b);
        for (size_t i = 0; i < v.size(); ++i) v[i] -= c * b[i];
      }
    double nrm = std::sqrt(inner(v, v));
    if (nrm < 1e-8) continue;
    for (auto& x : v) x /= nrm;
    basis.push_back(v);
  }
  return basis;
}

}  // namespace

std::vector<std::vector<double>> coclosed_polarizations(const std::vector<double>& kappa) {
  int d = kappa.size();
  double k2 = dot(kappa, kappa);
  std::vector<std::vector<double>> cand;
  for (int a = 0; a < d; ++a) {
    std::vector<double> e(d, 0.0);
    e[a] = 1.0;
    if (k2 > 0) {
      double c = kappa[a] / k2;
      for (int b = 0; b < d; ++b) e[b] -= c * kappa[b];
    }
    cand.push_back(e);
  }
  return gram_schmidt(cand, dot);
}

std::vector<std::vector<double>> tt_polarizations(const std::vector<double>& kappa) {
  int d = kappa.size();
  double k2 = dot(kappa, kappa);
  // projector onto kappa-perp
  std::vector<double> Pi(d * d, 0.0);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) Pi[a * d + b] = (a == b ? 1.0 : 0.0) - (k2 > 0 ? kappa[a] * kappa[b] / k2 : 0.0);
  int m = k2 > 0 ? d - 1 : d;
  std::vector<std::vector<double>> cand;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      std::vector<double> E(d * d, 0.0);
      E[i * d + j] = E[j * d + i] = 1.0;
      std::vector<double> T(d * d, 0.0);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          double s = 0;
          for (int c = 0; c < d; ++c)
            for (int e = 0; e < d; ++e) s += Pi[a * d + c] * E[c * d + e] * Pi[e * d + b];
          T[a * d + b] = s;
        }
      double tr = 0;
      for (int a = 0; a < d; ++a) tr += T[a * d + a];
      if (m > 0)
        for (int a = 0; a < d * d; ++a) T[a] -= tr / m * Pi[a];
      std::vector<double> packed(sym_size(d));
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) packed[sym_index(a, b, d)] = T[a * d + b];
      cand.push_back(packed);
    }
  return gram_schmidt(cand, [d](const auto& a, const auto& b) { return frob(a, b, d); });
}

Spectrum build_spectrum(const TorusCrossSection& cs, ModeKind rank) {
  cs.validate();
  Spectrum sp;
  int d = cs.dim;
  auto add = [&](ModeKind kind, const std::vector<int>& k, const std::vector<double>& pol, int idx, bool phases) {
    for (Phase ph : {Phase::Cos, Phase::Sin}) {
      if (ph == Phase::Sin && !phases) break;
      sp.modes.push_back({kind, k, cs.eigenvalue(k), pol, ph, idx});
    }
  };
  for (const auto& k : cs.canonical_frequencies(true)) {
    bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    auto kap = cs.wavevector(k);
    switch (rank) {
      case ModeKind::Scalar: add(rank, k, {}, 0, !zero); break;
      case ModeKind::PureTrace: {
        std::vector<double> I(sym_size(d), 0.0);
        for (int a = 0; a < d; ++a) I[sym_index(a, a, d)] = 1.0 / std::sqrt((double)d);
        add(rank, k, I, 0, !zero);
        break;
      }
      case ModeKind::HarmonicOneForm:
        if (zero)
          for (int a = 0; a < d; ++a) {
            std::vector<double> e(d, 0.0);
            e[a] = 1.0;
            add(rank, k, e, a, false);
          }
        break;
      case ModeKind::CoclosedOneForm:
        if (!zero) {
          auto pols = coclosed_polarizations(kap);
          for (size_t i = 0; i < pols.size(); ++i) add(rank, k, pols[i], i, true);
        }
        break;
      case ModeKind::TTTensor: {
        auto pols = tt_polarizations(kap);
        for (size_t i = 0; i < pols.size(); ++i) add(rank, k, pols[i], i, !zero);
        break;
      }
    }
  }
  std::stable_sort(sp.modes.begin(), sp.modes.end(), [](const Mode& a, const Mode& b) {
    return std::tie(a.mu, a.k, a.pol_index, a.phase) < std::tie(b.mu, b.k, b.pol_index, b.phase);
  });
  sp.mu1 = spectral_gap(cs);
  return sp;
}

double spectral_gap(const TorusCrossSection& cs) {
  // smallest |kappa|^2 over nonzero integer k is attained at a unit vector
  double m = -1;
  for (double l : cs.lengths) {
    double v = (2.0 * M_PI / l) * (2.0 * M_PI / l);
    if (m < 0 || v < m) m = v;
  }
  return m;
}

std::vector<double> evaluate_mode(const TorusCrossSection& cs, const Mode& m, const std::vector<double>& x) {
  double f = cs.fourier(m.key(), x);
  if (m.rank() == 0) return {f};
  std::vector<double> v = m.polarization;
  for (auto& c : v) c *= f;
  return v;
}

PointwiseImages pointwise_operators(const TorusCrossSection& cs, const Mode& m) {
  PointwiseImages out;
  out.laplacian_eigenvalue = m.mu;
  int d = cs.dim;
  auto kap = cs.wavevector(m.k);
  // d/dx_a e_{k,cos} = -kappa_a e_{k,sin};  d/dx_a e_{k,sin} = kappa_a e_{k,cos}
  double s = m.phase == Phase::Cos ? 1.0 : -1.0;
  out.divergence_key = FourierKey{m.k, m.phase}.partner();
  if (m.rank() == 1) {
    double pk = 0;
    for (int a = 0; a < d; ++a) pk += m.polarization[a] * kap[a];
    out.divergence_image = {s * pk};
  } else if (m.rank() == 2) {
    out.divergence_image.assign(d, 0.0);
    for (int b = 0; b < d; ++b)
      for (int a = 0; a < d; ++a) out.divergence_image[b] += s * m.polarization[sym_index(a, b, d)] * kap[a];
    for (int a = 0; a < d; ++a) out.trace_image += m.polarization[sym_index(a, a, d)];
  }
  for (auto& v : out.divergence_image)
    if (std::abs(v) < 1e-14) v = 0.0;
  if (std::abs(out.trace_image) < 1e-14) out.trace_image = 0.0;
  return out;
}

double l2_inner_product_quadrature(const TorusCrossSection& cs, const Mode& a, const Mode& b, int n) {
  int d = cs.dim;
  long total = 1;
  for (int i = 0; i < d; ++i) total *= n;
  double cell = cs.volume() / total;
  double s = 0;
  std::vector<double> x(d);
  for (long idx = 0; idx < total; ++idx) {
    long q = idx;
    for (int i = d - 1; i >= 0; --i) {
      x[i] = cs.lengths[i] * (q % n) / n;
      q /= n;
    }
    auto va = evaluate_mode(cs, a, x), vb = evaluate_mode(cs, b, x);
    if (a.rank() == 2) {
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          int k = sym_index(i, j, d);
          s += (i == j ? 1.0 : 2.0) * va[k] * vb[k] * cell;
        }
    } else {
      for (size_t i = 0; i < va.size(); ++i) s += va[i] * vb[i] * cell;
    }
  }
  return s;
}

}  // namespace ricyl
