#include "ricyl/green_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "ricyl/errors.hpp"

namespace ricyl {

namespace {

void require_positive(double mu) {
  if (!(mu > 0.0)) throw InvalidArgument("Green kernels are defined for mu > 0 only");
}

std::vector<double> kappa_of(const std::vector<double>& lengths, const std::vector<int>& k) {
  std::vector<double> kap(lengths.size());
  for (size_t a = 0; a < lengths.size(); ++a) kap[a] = 2.0 * M_PI * k[a] / lengths[a];
  return kap;
}

double norm2(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

double eval_type1(double mu, double t, double s) {
  require_positive(mu);
  double q = std::sqrt(mu);
  return std::exp(-q * std::abs(t - s)) / (2 * q);
}

Type2Kernel type2_kernel(double mu) {
  require_positive(mu);
  double q = std::sqrt(mu);
  Type2Kernel K;
  K.dd = {{3 / (8 * mu * q), -1 / (8 * mu)}, {3 / (8 * mu * q), 1 / (8 * mu)}};
  K.lb = {{0, 1 / (8 * q)}, {0, 1 / (8 * q)}};
  K.kc = {{0, -1 / (8 * q)}, {0, -1 / (8 * q)}};
  K.lc = {{3 / (8 * q), 1.0 / 8}, {3 / (8 * q), -1.0 / 8}};
  return K;
}

Type2Kernel type2_kernel_printed(double mu) {
  require_positive(mu);
  double q = std::sqrt(mu);
  Type2Kernel K = type2_kernel(mu);
  K.kc = {{0, -1 / (4 * q)}, {0, -1 / (4 * q)}};
  K.lc = {{3 / (4 * q), 1.0 / 4}, {3 / (4 * q), -1.0 / 4}};
  return K;
}

namespace {
Type2Value eval_blocks(const Type2Kernel& K, double mu, double t, double s) {
  double q = std::sqrt(mu);
  return {K.dd.eval(q, t, s), K.lb.eval(q, t, s), K.kc.eval(q, t, s), K.lc.eval(q, t, s)};
}
}  // namespace

Type2Value eval_type2(double mu, double t, double s) { return eval_blocks(type2_kernel(mu), mu, t, s); }
Type2Value eval_type2_printed(double mu, double t, double s) {
  return eval_blocks(type2_kernel_printed(mu), mu, t, s);
}

RadialProfile convolve(const KernelBlock& K, double q, const RadialProfile& src_in) {
  RadialProfile src = src_in.restricted(0.0, kInf);
  if (src.is_zero()) return {};
  if (src.max_tail_rate() >= q) throw DivergentConvolution("source does not decay faster than e^{sqrt(mu) s}");
  RadialProfile out;
  // s < t:  e^{-qt} [ (c0 + c1 t) I(e^{qs} src) - c1 I(s e^{qs} src) ]
  {
    RadialProfile I0 = src.shifted_rate(q).running_integral();
    RadialProfile I1 = src.times_power(1).shifted_rate(q).running_integral();
    RadialProfile poly = RadialProfile::constant(K.after.c0) + RadialProfile::monomial(K.after.c1, 1, 0.0);
    out += (poly * I0 - I1 * K.after.c1).shifted_rate(-q);
  }
  // s > t:  e^{qt} [ (d0 + d1 t) T(e^{-qs} src) - d1 T(s e^{-qs} src) ]
  {
    RadialProfile T0 = src.shifted_rate(-q).tail_integral();
    RadialProfile T1 = src.times_power(1).shifted_rate(-q).tail_integral();
    RadialProfile poly = RadialProfile::constant(K.before.c0) + RadialProfile::monomial(K.before.c1, 1, 0.0);
    out += (poly * T0 - T1 * K.before.c1).shifted_rate(q);
  }
  return out;
}

SourceExpansion decompose_one_form(const ModeExpansion& w) {
  if (w.rank() != 1) throw RankMismatch("source decomposition expects a 1-form");
  SourceExpansion s;
  s.lengths = w.lengths();
  s.zero_sector = ModeExpansion(w.lengths(), 1);
  int d = w.dim();
  for (const auto& [key, comps] : w.terms()) {
    if (key.is_zero()) {
      for (int j = 0; j < w.n(); ++j) s.zero_sector.add(key, j, comps[j]);
      continue;
    }
    auto kap = kappa_of(w.lengths(), key.k);
    double k2 = norm2(kap);
    // radial part belongs to phi = key
    if (!comps[0].is_zero()) s.scalar[key].c += comps[0];
    // exact tangential part: d_N e_cos = -kappa e_sin, d_N e_sin = kappa e_cos
    RadialProfile along;
    for (int a = 0; a < d; ++a) along += comps[1 + a] * kap[a];
    if (!along.is_zero()) {
      FourierKey phi = key.partner();
      double sgn = key.phase == Phase::Sin ? -1.0 : 1.0;  // key sin -> phi cos
      s.scalar[phi].b += along * (sgn / k2);
      std::vector<RadialProfile> perp(d);
      bool any = false;
      for (int a = 0; a < d; ++a) {
        perp[a] = comps[1 + a] - along * (kap[a] / k2);
        any = any || !perp[a].is_zero();
      }
      if (any) s.coclosed[key] = perp;
    } else {
      bool any = false;
      for (int a = 0; a < d; ++a) any = any || !comps[1 + a].is_zero();
      if (any) s.coclosed[key] = std::vector<RadialProfile>(comps.begin() + 1, comps.end());
    }
  }
  for (auto it = s.scalar.begin(); it != s.scalar.end();)
    it = (it->second.b.is_zero() && it->second.c.is_zero()) ? s.scalar.erase(it) : std::next(it);
  return s;
}

ModeExpansion scalar_type_one_form(const std::vector<double>& lengths, const FourierKey& phi, const RadialProfile& k,
                                   const RadialProfile& l) {
  ModeExpansion X(lengths, 1);
  X.add(phi, 0, l);
  if (!phi.is_zero() && !k.is_zero()) {
    auto kap = kappa_of(lengths, phi.k);
    double sgn = phi.phase == Phase::Cos ? -1.0 : 1.0;
    for (size_t a = 0; a < kap.size(); ++a)
      if (kap[a] != 0.0) X.add(phi.partner(), 1 + a, k * (sgn * kap[a]));
  }
  return X;
}

ModeExpansion assemble_one_form(const SourceExpansion& s) {
  ModeExpansion w = s.zero_sector.is_zero() ? ModeExpansion(s.lengths, 1) : s.zero_sector;
  for (const auto& [phi, src] : s.scalar) w += scalar_type_one_form(s.lengths, phi, src.b, src.c);
  for (const auto& [key, v] : s.coclosed)
    for (size_t a = 0; a < v.size(); ++a) w.add(key, 1 + a, v[a]);
  return w;
}

ModeExpansion apply_green(const SourceExpansion& src, GreenVariant variant) {
  if (src.has_zero_sector())
    throw InvalidArgument("source has a mu = 0 part; route it to the finite sector of the divergence solver");
  ModeExpansion X(src.lengths, 1);
  for (const auto& [phi, s] : src.scalar) {
    double mu = norm2(kappa_of(src.lengths, phi.k));
    double q = std::sqrt(mu);
    Type2Kernel K = variant == GreenVariant::Corrected ? type2_kernel(mu) : type2_kernel_printed(mu);
    RadialProfile k = convolve(K.dd, q, s.b) * mu + convolve(K.kc, q, s.c);
    RadialProfile l = convolve(K.lb, q, s.b) * mu + convolve(K.lc, q, s.c);
    X += scalar_type_one_form(src.lengths, phi, k, l);
  }
  for (const auto& [key, v] : src.coclosed) {
    double mu = norm2(kappa_of(src.lengths, key.k));
    double q = std::sqrt(mu);
    KernelBlock g{{1 / (2 * q), 0}, {1 / (2 * q), 0}};
    for (size_t a = 0; a < v.size(); ++a) X.add(key, 1 + a, convolve(g, q, v[a]));
  }
  return X;
}

double cutoff_psi(double r, int derivative) {
  auto S = [](double x) {
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
  };
  double x = r + 1.0;
  if (derivative == 0) return S(x);
  if (x <= 0 || x >= 1) return 0.0;
  const double h = 1e-3;
  if (derivative == 1) return (S(x + h) - S(x - h)) / (2 * h);
  if (derivative == 2) return (S(x + h) - 2 * S(x) + S(x - h)) / (h * h);
  return (cutoff_psi(r + h, derivative - 2) - 2 * cutoff_psi(r, derivative - 2) + cutoff_psi(r - h, derivative - 2)) /
         (h * h);
}

namespace {

double binom(int n, int k) {
  double b = 1;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

std::vector<double> lattice(double q_gap) {
  std::vector<double> r;
  for (int i = 0; i <= 200; ++i) r.push_back(-1.0 + i / 200.0);
  double far = std::min(1e5, (40.0 + std::abs(std::log(1e-10))) / q_gap);
  double mid = std::min(far, 40.0);
  for (int i = 1; i <= 2000; ++i) r.push_back(mid * i / 2000.0);
  if (far > mid)
    for (int i = 1; i <= 2000; ++i) r.push_back(mid * std::pow(far / mid, i / 2000.0));
  return r;
}

}  // namespace

double weighted_ck_norm(const std::vector<RadialProfile>& f, const std::vector<double>& scale, double kappa, double rho,
                        int k, double q_gap) {
  std::vector<std::vector<RadialProfile>> ders(f.size());
  for (size_t j = 0; j < f.size(); ++j) {
    ders[j].push_back(f[j]);
    for (int i = 1; i <= k; ++i) ders[j].push_back(ders[j].back().derivative());
  }
  double best = 0.0;
  for (double r : lattice(q_gap)) {
    std::vector<double> psi(k + 1);
    for (int i = 0; i <= k; ++i) psi[i] = cutoff_psi(r, i);
    if (psi[0] == 0.0 && r <= -1.0) continue;
    for (int i = 0; i <= k; ++i) {
      // d^i (psi e^{rho r} f) = sum_a C(i,a) psi^{(i-a)} sum_b C(a,b) rho^{a-b} e^{rho r} f^{(b)}
      double val = 0.0;
      for (size_t j = 0; j < f.size(); ++j) {
        double s = 0.0;
        for (int a = 0; a <= i; ++a) {
          if (psi[i - a] == 0.0) continue;
          double w = 0.0;
          for (int b = 0; b <= a; ++b) w += binom(a, b) * std::pow(rho, a - b) * ders[j][b].eval_weighted(r, rho);
          s += binom(i, a) * psi[i - a] * w;
        }
        val += scale[j] * std::abs(s);
      }
      for (int m = 0; m + i <= k; ++m) best = std::max(best, std::pow(kappa, m) * val);
    }
  }
  return best;
}

double weighted_bound_ratio(double mu1, double rho, SourceType type, int k) {
  require_positive(mu1);
  double q = std::sqrt(mu1);
  if (!(std::abs(rho) < q)) throw InvalidArgument("weight must satisfy |rho| < sqrt(mu1)");
  double gap = q - std::abs(rho);
  RadialProfile src = RadialProfile::exponential(1.0, -rho).restricted(0.0, kInf);
  if (type == SourceType::OneForm) {
    KernelBlock g{{1 / (2 * q), 0}, {1 / (2 * q), 0}};
    RadialProfile f = convolve(g, q, src);
    return weighted_ck_norm({f}, {1.0}, q, rho, k + 2, gap) / weighted_ck_norm({src}, {1.0}, q, rho, k, gap);
  }
  Type2Kernel K = type2_kernel(mu1);
  double best = 0.0;
  for (int which = 0; which < 2; ++which) {
    RadialProfile b = which == 0 ? src * (1.0 / q) : RadialProfile{};
    RadialProfile c = which == 1 ? src : RadialProfile{};
    RadialProfile kk = convolve(K.dd, q, b) * mu1 + convolve(K.kc, q, c);
    RadialProfile ll = convolve(K.lb, q, b) * mu1 + convolve(K.lc, q, c);
    double num = weighted_ck_norm({kk, ll}, {q, 1.0}, q, rho, k + 2, gap);
    double den = weighted_ck_norm({b, c}, {q, 1.0}, q, rho, k, gap);
    best = std::max(best, num / den);
  }
  return best;
}

WeightedBoundFit estimate_weighted_bound(double mu1, const std::vector<double>& rho_samples, SourceType type, int k) {
  WeightedBoundFit fit;
  double q = std::sqrt(mu1);
  for (double rho : rho_samples) {
    fit.rho.push_back(rho);
    fit.ratio.push_back(weighted_bound_ratio(mu1, rho, type, k));
    fit.log_gap.push_back(-std::log(q - rho));
  }
  int n = fit.rho.size();
  if (n >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
      double x = fit.log_gap[i], y = std::log(fit.ratio[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    fit.p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.p * sx) / n;
  }
  return fit;
}

}  // namespace ricyl
