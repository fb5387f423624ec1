#include "ricyl/deformation_solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "ricyl/errors.hpp"
#include "ricyl/green_kernel.hpp"

namespace ricyl {

bool operator<(const ModeLabel& a, const ModeLabel& b) {
  return std::tie(a.kind, a.key, a.pol_index) < std::tie(b.kind, b.key, b.pol_index);
}

std::string to_string(const ModeLabel& m) {
  std::ostringstream os;
  os << to_string(m.kind) << "[";
  for (size_t i = 0; i < m.key.k.size(); ++i) os << (i ? "," : "") << m.key.k[i];
  os << "]" << to_string(m.key.phase) << "#" << m.pol_index;
  return os.str();
}

ModeExpansion linearized_ricci(const ModeExpansion& h) { return ops::linearized_ricci(h); }

namespace {

FourierKey zero_key(int d) { return {std::vector<int>(d, 0), Phase::Cos}; }

std::vector<double> kappa_of(const std::vector<double>& lengths, const std::vector<int>& k) {
  std::vector<double> kap(lengths.size());
  for (size_t a = 0; a < lengths.size(); ++a) kap[a] = 2 * M_PI * k[a] / lengths[a];
  return kap;
}

double mu_of(const std::vector<double>& lengths, const std::vector<int>& k) {
  double m = 0;
  for (double v : kappa_of(lengths, k)) m += v * v;
  return m;
}

std::vector<double> chebyshev(const FitWindow& w) {
  std::vector<double> r(w.points);
  for (int i = 0; i < w.points; ++i)
    r[i] = 0.5 * (w.a + w.b) + 0.5 * (w.b - w.a) * std::cos(M_PI * (i + 0.5) / w.points);
  return r;
}

double frob(const std::vector<double>& A, const std::vector<double>& B, int d) {
  double s = 0;
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      int i = sym_index(a, b, d);
      s += (a == b ? 1.0 : 2.0) * A[i] * B[i];
    }
  return s;
}

struct LsqResult {
  std::vector<double> x;
  double residual = 0.0;
  double condition = 1.0;
};

// Least squares of target against columns, sampling every component of the given keys at r.
LsqResult lsq_fit(const std::vector<ModeExpansion>& cols, const ModeExpansion& target,
                  const std::vector<FourierKey>& keys, const std::vector<double>& r, double scale_ref) {
  int nc = target.num_components();
  int rows = keys.size() * nc * r.size();
  Eigen::MatrixXd A(rows, cols.size());
  Eigen::VectorXd y(rows);
  auto fill = [&](const ModeExpansion& e, auto&& put) {
    int row = 0;
    for (const auto& key : keys)
      for (int c = 0; c < nc; ++c) {
        const RadialProfile& p = e.get(key, c);
        for (double ri : r) put(row++, p.is_zero() ? 0.0 : p(ri));
      }
  };
  fill(target, [&](int i, double v) { y(i) = v; });
  for (size_t j = 0; j < cols.size(); ++j) fill(cols[j], [&](int i, double v) { A(i, j) = v; });
  LsqResult out;
  // residuals are relative to the whole field, not to this block
  double ymax = std::max(scale_ref, y.lpNorm<Eigen::Infinity>());
  if (cols.empty()) {
    out.residual = ymax > 0 ? y.lpNorm<Eigen::Infinity>() / ymax : 0.0;
    return out;
  }
  Eigen::VectorXd scale(cols.size());
  for (int j = 0; j < A.cols(); ++j) {
    scale(j) = A.col(j).norm();
    if (scale(j) == 0) scale(j) = 1;
    A.col(j) /= scale(j);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  out.condition = s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : INFINITY;
  Eigen::VectorXd x = svd.solve(y);
  double res = (A * x - y).lpNorm<Eigen::Infinity>();
  out.residual = ymax > 0 ? res / ymax : res;
  out.x.resize(cols.size());
  for (int j = 0; j < A.cols(); ++j) out.x[j] = x(j) / scale(j);
  return out;
}

std::vector<FourierKey> keys_of(const std::vector<int>& k) {
  std::vector<FourierKey> keys{{k, Phase::Cos}};
  bool zero = true;
  for (int v : k) zero = zero && v == 0;
  if (!zero) keys.push_back({k, Phase::Sin});
  return keys;
}

// Groups the canonical frequency vectors present in an expansion.
std::set<std::vector<int>> frequencies(const ModeExpansion& e) {
  std::set<std::vector<int>> out;
  for (const auto& [key, c] : e.terms()) out.insert(key.k);
  return out;
}

// exact coefficient coordinates: (k, phase, comp, p, rate)
using CoefKey = std::tuple<std::vector<int>, int, int, int, long long>;

void coefficients(const ModeExpansion& e, std::map<CoefKey, int>& index, std::vector<std::pair<int, double>>& out) {
  for (const auto& [key, comps] : e.terms())
    for (int c = 0; c < (int)comps.size(); ++c)
      for (const auto& t : comps[c].terms()) {
        CoefKey ck{key.k, (int)key.phase, c, t.p, std::llround(t.rate * 1e9)};
        auto it = index.find(ck);
        int row = it == index.end() ? (index[ck] = index.size()) : it->second;
        out.push_back({row, t.c});
      }
}

std::vector<ModeExpansion> null_space(const std::vector<ModeExpansion>& elems,
                                      const std::vector<std::vector<std::pair<int, double>>>& images, int rows) {
  int n = elems.size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(std::max(rows, 1), n);
  for (int j = 0; j < n; ++j)
    for (auto [i, v] : images[j]) M(i, j) += v;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-11 * std::max(1.0, smax)) ++rank;
  std::vector<ModeExpansion> basis;
  const auto& V = svd.matrixV();
  for (int c = rank; c < n; ++c) {
    ModeExpansion b(elems[0].lengths(), elems[0].rank());
    for (int j = 0; j < n; ++j)
      if (std::abs(V(j, c)) > 1e-14) {
        ModeExpansion e = elems[j];
        e *= V(j, c);
        b += e;
      }
    basis.push_back(b);
  }
  return basis;
}

}  // namespace

TraceSplit harmonic_trace_split(const ModeExpansion& h, const FitWindow& w, double tol) {
  ModeExpansion t = h.rank() == 2 ? ops::trace(h) : h;
  if (t.rank() != 0) throw RankMismatch("trace split expects a 2-tensor or a function");
  TraceSplit out;
  int d = t.dim();
  double scale = std::max(1.0, t.coefficient_sup(w.a, w.b));
  out.laplacian_residual = ops::rough_laplacian(t).coefficient_sup(w.a, w.b) / scale;
  if (out.laplacian_residual > tol)
    throw NonHarmonicTrace("trace is not harmonic: |Delta tr h| = " + std::to_string(out.laplacian_residual));
  auto r = chebyshev(w);
  double rm = 0.5 * (w.a + w.b);
  FourierKey z = zero_key(d);
  double amp0 = t.torus().amplitude(z.k);
  {
    ModeExpansion c0(t.lengths(), 0), c1(t.lengths(), 0);
    c0.add(z, 0, RadialProfile::constant(1.0));
    c1.add(z, 0, RadialProfile::monomial(1.0, 1, 0.0));
    auto fit = lsq_fit({c0, c1}, t.filtered([](const FourierKey& k) { return k.is_zero(); }), {z}, r, scale);
    out.c0 = fit.x[0] * amp0;
    out.c1 = fit.x[1] * amp0;
    out.fit_residual = std::max(out.fit_residual, fit.residual);
  }
  out.remainder = t.filtered([](const FourierKey& k) { return !k.is_zero(); });
  for (const auto& [key, comps] : out.remainder.terms()) {
    double q = std::sqrt(mu_of(t.lengths(), key.k));
    ModeExpansion ep(t.lengths(), 0), em(t.lengths(), 0);
    ep.add(key, 0, RadialProfile::exponential(std::exp(-q * rm), q));
    em.add(key, 0, RadialProfile::exponential(std::exp(q * rm), -q));
    auto fit = lsq_fit({ep, em}, out.remainder.filtered([&](const FourierKey& k) { return k == key; }), {key}, r, scale);
    out.modes[key] = {fit.x[0] * std::exp(-q * rm), fit.x[1] * std::exp(q * rm)};
    out.fit_residual = std::max(out.fit_residual, fit.residual);
  }
  if (out.fit_residual > tol)
    throw NonHarmonicTrace("trace does not fit the harmonic basis: residual " + std::to_string(out.fit_residual));
  return out;
}

TraceAbsorption trace_absorption_field(const std::vector<double>& lengths,
                                       const std::map<FourierKey, ExpCoeffs>& coeffs) {
  int d = lengths.size();
  ModeExpansion X(lengths, 1), lie(lengths, 2);
  for (const auto& [phi, c] : coeffs) {
    if (phi.is_zero()) throw InvalidArgument("trace absorption needs mu > 0; split off the affine trace first");
    auto kap = kappa_of(lengths, phi.k);
    double mu = mu_of(lengths, phi.k), q = std::sqrt(mu);
    double sg = phi.phase == Phase::Cos ? -1.0 : 1.0;  // d_a phi = sg kappa_a partner
    RadialProfile P, Q;
    for (int s : {1, -1}) {
      double cs = s > 0 ? c.plus : c.minus;
      if (cs == 0.0) continue;
      // X = -(P phi dr + Q d_N phi)
      P += RadialProfile::monomial(-s * cs / (4 * q), 0, s * q) + RadialProfile::monomial(cs / 4, 1, s * q);
      Q += RadialProfile::monomial(cs / (2 * mu), 0, s * q) + RadialProfile::monomial(s * cs / (4 * q), 1, s * q);
      // explicit Lie derivative blocks
      lie.add(phi, lie.comp(0, 0), RadialProfile::monomial(-s * cs * q / 2, 1, s * q));
      RadialProfile mixed = RadialProfile::monomial(-cs / 2, 1, s * q) + RadialProfile::exponential(-s * cs / (2 * q), s * q);
      for (int a = 0; a < d; ++a)
        if (kap[a] != 0.0) lie.add(phi.partner(), lie.comp(0, 1 + a), mixed * (sg * kap[a]));
      RadialProfile hess = RadialProfile::exponential(cs / mu, s * q) + RadialProfile::monomial(s * cs * q / (2 * mu), 1, s * q);
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b)
          if (kap[a] * kap[b] != 0.0) lie.add(phi, lie.comp(1 + a, 1 + b), hess * (kap[a] * kap[b]));
    }
    X += scalar_type_one_form(lengths, phi, -Q, -P);
  }
  TraceAbsorption out;
  out.X = make_gauge_field(X);
  out.lie = lie;
  out.coeffs = coeffs;
  return out;
}

int parallel_dimension_expected(int d, double tau) {
  int tangential = d * (d + 1) / 2;  // g_N plus the parallel TT space
  return tau > 0 ? tangential : tangential + d + 1;
}

ReducedSystem solve_reduced_system(const TorusCrossSection& cs, double tau, bool parallel_only) {
  cs.validate();
  int d = cs.dim, n = d + 1, nc = sym_size(n);
  std::vector<double> eig;
  for (const auto& k : cs.canonical_frequencies(false)) eig.push_back(cs.eigenvalue(k));
  check_resonance(tau, eig);
  ReducedSystem out;
  out.tau = tau;
  out.parallel_expected = parallel_dimension_expected(d, tau);

  auto solve_sector = [&](const std::vector<int>& k, const std::vector<RadialProfile>& ansatz) {
    std::vector<ModeExpansion> elems;
    for (const auto& key : keys_of(k))
      for (int c = 0; c < nc; ++c)
        for (const auto& f : ansatz) {
          ModeExpansion e(cs.lengths, 2);
          e.add(key, c, f);
          elems.push_back(e);
        }
    std::map<CoefKey, int> index;
    std::vector<std::vector<std::pair<int, double>>> images(elems.size());
    for (size_t j = 0; j < elems.size(); ++j) {
      coefficients(ops::linearized_ricci(elems[j]), index, images[j]);
      auto div = ops::modified_divergence(elems[j], tau);
      // divergence and trace rows use negative component tags
      for (const auto& [key, comps] : div.terms())
        for (int c = 0; c < (int)comps.size(); ++c)
          for (const auto& t : comps[c].terms()) {
            CoefKey ck{key.k, (int)key.phase, -1 - c, t.p, std::llround(t.rate * 1e9)};
            auto it = index.find(ck);
            int row = it == index.end() ? (index[ck] = index.size()) : it->second;
            images[j].push_back({row, t.c});
          }
      ModeExpansion tr = ops::trace(elems[j]);
      for (const auto& [key, comps] : tr.terms())
        for (const auto& t : comps[0].terms()) {
          if (key.is_zero() && t.rate == 0.0 && t.p <= 1) continue;  // affine trace allowed
          CoefKey ck{key.k, (int)key.phase, -100, t.p, std::llround(t.rate * 1e9)};
          auto it = index.find(ck);
          int row = it == index.end() ? (index[ck] = index.size()) : it->second;
          images[j].push_back({row, t.c});
        }
    }
    return null_space(elems, images, index.size());
  };

  std::vector<int> zero(d, 0);
  out.parallel_basis = solve_sector(zero, {RadialProfile::constant(1.0)});
  out.parallel_dimension = out.parallel_basis.size();
  if (parallel_only) return out;

  {
    ReducedSector s;
    s.k = zero;
    std::vector<RadialProfile> ans;
    for (int p = 0; p <= 2; ++p) ans.push_back(RadialProfile::monomial(1.0, p, 0.0));
    s.ansatz = "r^p, p<=2";
    if (tau > 0) {
      ans.push_back(RadialProfile::exponential(1.0, -tau));
      ans.push_back(RadialProfile::monomial(1.0, 1, -tau));
      s.ansatz += "; r^p e^{-tau r}, p<=1";
    }
    s.basis = solve_sector(zero, ans);
    s.dimension = s.basis.size();
    s.expected = d * (d + 1) + d + (tau > 0 ? 0 : 1);
    out.sectors.push_back(s);
  }
  for (const auto& k : cs.canonical_frequencies(false)) {
    ReducedSector s;
    s.k = k;
    s.mu = cs.eigenvalue(k);
    double q = std::sqrt(s.mu);
    std::vector<RadialProfile> ans;
    for (int p = 0; p <= 2; ++p)
      for (double lam : {-q, 0.0, q}) ans.push_back(RadialProfile::monomial(1.0, p, lam));
    s.ansatz = "r^p e^{lambda r}, p<=2, lambda in {-q,0,q}";
    s.basis = solve_sector(k, ans);
    s.dimension = s.basis.size();
    int tt = tt_polarizations(cs.wavevector(k)).size();
    s.expected = 4 * (tt + d);
    out.sectors.push_back(s);
  }
  return out;
}

double span_residual(const std::vector<ModeExpansion>& basis, const ModeExpansion& h) {
  std::map<CoefKey, int> index;
  std::vector<std::vector<std::pair<int, double>>> cols(basis.size());
  for (size_t j = 0; j < basis.size(); ++j) coefficients(basis[j], index, cols[j]);
  std::vector<std::pair<int, double>> target;
  coefficients(h, index, target);
  int rows = std::max<int>(1, index.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, std::max<size_t>(1, basis.size()));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
  for (size_t j = 0; j < basis.size(); ++j)
    for (auto [i, v] : cols[j]) A(i, j) += v;
  for (auto [i, v] : target) y(i) += v;
  if (y.norm() == 0) return 0.0;
  Eigen::VectorXd x = A.colPivHouseholderQr().solve(y);
  return (A * x - y).norm() / y.norm();
}

std::vector<std::vector<double>> parallel_tt_basis(int d) { return tt_polarizations(std::vector<double>(d, 0.0)); }

ModeExpansion exp_mode_tensor(const std::vector<double>& lengths, const ModeLabel& m, int sign) {
  auto kap = kappa_of(lengths, m.key.k);
  double q = std::sqrt(mu_of(lengths, m.key.k));
  Mode mode;
  mode.kind = ModeKind::TTTensor;
  mode.k = m.key.k;
  mode.mu = q * q;
  mode.phase = m.key.phase;
  mode.pol_index = m.pol_index;
  mode.polarization = tt_polarizations(kap).at(m.pol_index);
  ModeExpansion h(lengths, 2);
  h.add_mode(mode, RadialProfile::exponential(1.0, sign * q));
  return h;
}

ModeExpansion exp_gauge_tensor(const std::vector<double>& lengths, const ModeLabel& m, int sign) {
  auto kap = kappa_of(lengths, m.key.k);
  double q = std::sqrt(mu_of(lengths, m.key.k));
  if (m.kind == ModeKind::Scalar) {
    ModeExpansion u(lengths, 0);
    u.add(m.key, 0, RadialProfile::exponential(1.0, sign * q));
    return ops::sym_grad(ops::gradient(u));
  }
  Mode mode;
  mode.kind = ModeKind::CoclosedOneForm;
  mode.k = m.key.k;
  mode.mu = q * q;
  mode.phase = m.key.phase;
  mode.pol_index = m.pol_index;
  mode.polarization = coclosed_polarizations(kap).at(m.pol_index);
  ModeExpansion Y(lengths, 1);
  Y.add_mode(mode, RadialProfile::exponential(1.0, sign * q));
  return ops::sym_grad(Y);
}

ModeExpansion KernelDecomposition::reconstruct() const {
  int d = lengths.size();
  ModeExpansion h = gauge_X.lie.rank() == 2 ? gauge_X.lie : ModeExpansion(lengths, 2);
  FourierKey z = zero_key(d);
  double amp0 = h.torus().amplitude(z.k);
  if (gauge_Y.c != 0.0) h.add(z, h.comp(0, 0), RadialProfile::constant(2 * gauge_Y.c / amp0));
  for (int a = 0; a < (int)gauge_Y.eta.size(); ++a)
    if (gauge_Y.eta[a] != 0.0) h.add(z, h.comp(0, 1 + a), RadialProfile::constant(gauge_Y.eta[a] / amp0));
  for (int a = 0; a < (int)gauge_Y.eta_tau.size(); ++a)
    if (gauge_Y.eta_tau[a] != 0.0)
      h.add(z, h.comp(0, 1 + a), RadialProfile::exponential(gauge_Y.eta_tau[a] / amp0, -tau));
  RadialProfile tr = RadialProfile::constant(a / amp0) + RadialProfile::monomial(a_tilde / amp0, 1, 0.0);
  for (int i = 0; i < d; ++i) h.add(z, h.comp(1 + i, 1 + i), tr);
  auto B = parallel_tt_basis(d);
  for (size_t j = 0; j < B.size(); ++j) {
    double c0 = j < parallel_TT.size() ? parallel_TT[j] : 0.0;
    double c1 = j < linear_TT.size() ? linear_TT[j] : 0.0;
    if (c0 == 0.0 && c1 == 0.0) continue;
    RadialProfile f = RadialProfile::constant(c0) + RadialProfile::monomial(c1, 1, 0.0);
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        double v = B[j][sym_index(a, b, d)];
        if (v != 0.0) h.add(z, h.comp(1 + a, 1 + b), f * v);
      }
  }
  for (const auto& [m, c] : exp_modes) {
    if (c.plus != 0.0) h += c.plus * exp_mode_tensor(lengths, m, 1);
    if (c.minus != 0.0) h += c.minus * exp_mode_tensor(lengths, m, -1);
  }
  for (const auto& [m, c] : exp_gauge) {
    if (c.plus != 0.0) h += c.plus * exp_gauge_tensor(lengths, m, 1);
    if (c.minus != 0.0) h += c.minus * exp_gauge_tensor(lengths, m, -1);
  }
  return h;
}

KernelDecomposition classify_kernel(const ModeExpansion& h, double tau, const FitWindow& w, double tol) {
  if (h.rank() != 2) throw RankMismatch("classification expects a symmetric 2-tensor");
  int d = h.dim();
  KernelDecomposition K;
  K.lengths = h.lengths();
  K.tau = tau;
  double scale = std::max(1e-300, h.coefficient_sup(w.a, w.b));
  if (h.is_zero()) scale = 1.0;
  K.ricci_residual = ops::linearized_ricci(h).coefficient_sup(w.a, w.b) / scale;
  K.divergence_residual = ops::modified_divergence(h, tau).coefficient_sup(w.a, w.b) / scale;
  if (K.ricci_residual > tol)
    throw NotInKernel("linearized Ricci residual " + std::to_string(K.ricci_residual));
  if (K.divergence_residual > tol)
    throw NotInKernel("delta_tau residual " + std::to_string(K.divergence_residual));

  TraceSplit ts = harmonic_trace_split(h, w, tol);
  K.gauge_X = trace_absorption_field(K.lengths, ts.modes);
  ModeExpansion h1 = h - K.gauge_X.lie;
  auto r = chebyshev(w);
  double rm = 0.5 * (w.a + w.b);

  // k = 0
  FourierKey z = zero_key(d);
  double amp0 = h.torus().amplitude(z.k);
  K.gauge_Y.eta.assign(d, 0.0);
  K.gauge_Y.eta_tau.assign(d, 0.0);
  ModeExpansion h0 = h1.filtered([](const FourierKey& k) { return k.is_zero(); });
  {
    std::vector<ModeExpansion> cols;
    auto single = [&](int c, const RadialProfile& f) {
      ModeExpansion e(K.lengths, 2);
      e.add(z, c, f);
      cols.push_back(e);
    };
    if (tau == 0.0) single(h1.comp(0, 0), RadialProfile::constant(1.0));
    for (int a = 0; a < d; ++a)
      single(h1.comp(0, 1 + a), tau == 0.0 ? RadialProfile::constant(1.0) : RadialProfile::exponential(1.0, -tau));
    int first_tan = cols.size();
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        single(h1.comp(1 + a, 1 + b), RadialProfile::constant(1.0));
        single(h1.comp(1 + a, 1 + b), RadialProfile::monomial(1.0, 1, 0.0) + RadialProfile::constant(-rm));
      }
    auto fit = lsq_fit(cols, h0, {z}, r, scale);
    K.fit_residual = std::max(K.fit_residual, fit.residual);
    K.condition = std::max(K.condition, fit.condition);
    int idx = 0;
    if (tau == 0.0) K.gauge_Y.c = fit.x[idx++] * amp0 / 2;
    for (int a = 0; a < d; ++a) (tau == 0.0 ? K.gauge_Y.eta : K.gauge_Y.eta_tau)[a] = fit.x[idx++] * amp0;
    std::vector<double> H0(sym_size(d)), H1(sym_size(d));
    idx = first_tan;
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        double c0 = fit.x[idx++], c1 = fit.x[idx++];
        H0[sym_index(a, b, d)] = c0 - rm * c1;
        H1[sym_index(a, b, d)] = c1;
      }
    double tr0 = 0, tr1 = 0;
    for (int a = 0; a < d; ++a) {
      tr0 += H0[sym_index(a, a, d)];
      tr1 += H1[sym_index(a, a, d)];
    }
    K.a = tr0 / d * amp0;
    K.a_tilde = tr1 / d * amp0;
    for (const auto& B : parallel_tt_basis(d)) {
      K.parallel_TT.push_back(frob(H0, B, d));
      K.linear_TT.push_back(frob(H1, B, d));
    }
  }

  // k != 0: TT modes and exponential gauge modes
  ModeExpansion hk = h1.filtered([](const FourierKey& k) { return !k.is_zero(); });
  for (const auto& k : frequencies(hk)) {
    auto keys = keys_of(k);
    auto kap = kappa_of(K.lengths, k);
    double q = std::sqrt(mu_of(K.lengths, k));
    int ntt = tt_polarizations(kap).size(), nco = coclosed_polarizations(kap).size();
    std::vector<ModeExpansion> cols;
    std::vector<std::pair<ModeLabel, int>> labels;
    std::vector<bool> is_tt;
    for (const auto& key : keys)
      for (int s : {1, -1}) {
        double shift = std::exp(-s * q * rm);
        for (int j = 0; j < ntt; ++j) {
          ModeLabel m{ModeKind::TTTensor, key, j};
          cols.push_back(shift * exp_mode_tensor(K.lengths, m, s));
          labels.push_back({m, s});
          is_tt.push_back(true);
        }
        for (int j = 0; j < nco; ++j) {
          ModeLabel m{ModeKind::CoclosedOneForm, key, j};
          cols.push_back(shift * exp_gauge_tensor(K.lengths, m, s));
          labels.push_back({m, s});
          is_tt.push_back(false);
        }
        ModeLabel m{ModeKind::Scalar, key, 0};
        cols.push_back(shift * exp_gauge_tensor(K.lengths, m, s));
        labels.push_back({m, s});
        is_tt.push_back(false);
      }
    auto fit = lsq_fit(cols, hk.filtered([&](const FourierKey& key) { return key.k == k; }), keys, r, scale);
    K.fit_residual = std::max(K.fit_residual, fit.residual);
    K.condition = std::max(K.condition, fit.condition);
    for (size_t j = 0; j < cols.size(); ++j) {
      auto [m, s] = labels[j];
      double v = fit.x[j] * std::exp(-s * q * rm);
      auto& target = is_tt[j] ? K.exp_modes[m] : K.exp_gauge[m];
      (s > 0 ? target.plus : target.minus) = v;
    }
  }
  if (K.fit_residual > tol) throw NotInKernel("mode fit residual " + std::to_string(K.fit_residual));
  K.reconstruction_error = (K.reconstruct() - h).coefficient_sup(w.a, w.b) / scale;
  return K;
}

}  // namespace ricyl
