#include "ricyl/three_circles.hpp"

#include <cmath>
#include <limits>

#include "ricyl/deformation_solver.hpp"
#include "ricyl/errors.hpp"

namespace ricyl {

double tube_norm(const ModeExpansion& h, double a, double b) {
  if (!(a < b)) throw InvalidArgument("tube requires a < b");
  return h.tube_norm(a, b);
}

namespace {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5)), pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1, p2 = 0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2 * j - 1) * z * p2 - (j - 1) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2 / ((1 - z * z) * pp * pp);
  }
}

}  // namespace

double tube_norm_quadrature(const ModeExpansion& h, double a, double b, int panels, int nx) {
  int d = h.dim();
  if (nx <= 0) {
    int kmax = 0;
    for (const auto& [key, c] : h.terms())
      for (int v : key.k) kmax = std::max(kmax, std::abs(v));
    nx = 4 * kmax + 3;
  }
  std::vector<double> gx, gw;
  gauss_legendre(20, gx, gw);
  long total = 1;
  for (int i = 0; i < d; ++i) total *= nx;
  double cell = h.torus().volume() / total;
  int n = h.n();
  double s = 0;
  std::vector<double> x(d);
  for (int p = 0; p < panels; ++p) {
    double lo = a + (b - a) * p / panels, hi = a + (b - a) * (p + 1) / panels;
    for (size_t g = 0; g < gx.size(); ++g) {
      double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[g];
      double wr = 0.5 * (hi - lo) * gw[g];
      for (long idx = 0; idx < total; ++idx) {
        long q = idx;
        for (int i = d - 1; i >= 0; --i) {
          x[i] = h.lengths()[i] * (q % nx) / nx;
          q /= nx;
        }
        auto v = h.eval(r, x);
        double e = 0;
        for (int c = 0; c < (int)v.size(); ++c) {
          double wt = 1.0;
          if (h.rank() == 2) {
            // off-diagonal entries appear twice in |h|^2
            for (int i = 0; i < n; ++i)
              for (int j = i; j < n; ++j)
                if (sym_index(i, j, n) == c) wt = i == j ? 1.0 : 2.0;
          }
          e += wt * v[c] * v[c];
        }
        s += wr * cell * e;
      }
    }
  }
  return s;
}

TubeNormSeries tube_norm_series(const ModeExpansion& h, double L, const std::vector<int>& offsets) {
  TubeNormSeries s;
  s.L = L;
  s.offsets = offsets;
  for (int t : offsets) s.values.push_back(h.tube_norm(t * L, (t + 1) * L));
  return s;
}

double linear_profile_norm(double t) { return t * t + t + 1.0 / 3.0; }

double beta_prime_bound(double beta, double L, int t2, int t3) {
  return std::min(beta, std::log(linear_profile_norm(t3) / linear_profile_norm(t2)) / (2 * L));
}

void validate(const ThreeCirclesParams& p) {
  if (!(p.mu1 > 0)) throw InvalidParams("mu1 must be positive");
  double q = std::sqrt(p.mu1);
  if (!(p.L > 0)) throw InvalidParams("L must be positive");
  if (!(p.t1 < p.t2 && p.t2 < p.t3)) throw InvalidParams("offsets must satisfy t1 < t2 < t3");
  if (!(p.beta > 0 && p.beta < q)) throw InvalidParams("beta must lie in (0, sqrt(mu1))");
  if (!(std::exp(2 * (q - p.beta) * p.L) > 2))
    throw InvalidParams("e^{2(sqrt(mu1) - beta)L} > 2 fails: L too short for this beta");
  double bound = beta_prime_bound(p.beta, p.L, p.t2, p.t3);
  if (!(p.beta_prime > 0 && p.beta_prime < bound))
    throw InvalidParams("beta' = " + std::to_string(p.beta_prime) + " must lie in (0, " + std::to_string(bound) + ")");
}

ThreeCirclesResult three_circles_from_norms(double n1, double n2, double n3, double beta_prime, double L) {
  ThreeCirclesResult r;
  r.n1 = n1;
  r.n2 = n2;
  r.n3 = n3;
  double rhs = std::exp(-2 * beta_prime * L) * (n1 + n3);
  r.holds = n2 <= rhs;
  r.slack = n2 > 0 ? rhs / n2 : std::numeric_limits<double>::infinity();
  return r;
}

ThreeCirclesResult three_circles_check(const ModeExpansion& h, const ThreeCirclesParams& p) {
  validate(p);
  auto N = [&](int t) { return h.tube_norm(t * p.L, (t + 1) * p.L); };
  return three_circles_from_norms(N(p.t1), N(p.t2), N(p.t3), p.beta_prime, p.L);
}

ModeExpansion project_out_parallel(const ModeExpansion& h, double tau) {
  KernelDecomposition K = classify_kernel(h, tau);
  KernelDecomposition P;
  P.lengths = K.lengths;
  P.tau = tau;
  P.a = K.a;
  P.parallel_TT = K.parallel_TT;
  return h - P.reconstruct();
}

std::string to_string(Dominance d) {
  switch (d) {
    case Dominance::Left: return "left";
    case Dominance::Right: return "right";
    case Dominance::Both: return "both";
    case Dominance::Neither: return "neither";
  }
  return "?";
}

MonotonicityReport monotonicity_classify(const TubeNormSeries& s, double beta_prime) {
  MonotonicityReport rep;
  double f = std::exp(2 * beta_prime * s.L);
  const auto& N = s.values;
  int n = N.size();
  auto right = [&](int j) { return N[j + 1] >= f * N[j]; };
  auto left = [&](int j) { return N[j - 1] >= f * N[j]; };
  for (int j = 1; j + 1 < n; ++j) {
    bool l = left(j), r = right(j);
    rep.steps.push_back(l && r ? Dominance::Both : l ? Dominance::Left : r ? Dominance::Right : Dominance::Neither);
    if (!l && !r) rep.violations.push_back(j);
  }
  // right domination propagates forward, left domination backward
  for (int j = 1; j + 1 < n; ++j) {
    if (right(j))
      for (int k = j + 1; k + 1 < n; ++k)
        if (!right(k)) {
          rep.propagation_failures.push_back(j);
          break;
        }
    if (left(j))
      for (int k = j - 1; k >= 1; --k)
        if (!left(k)) {
          rep.propagation_failures.push_back(j);
          break;
        }
  }
  return rep;
}

ModeExpansion random_kernel_form(const TorusCrossSection& cs, std::mt19937_64& rng, int max_modes, bool with_linear) {
  std::uniform_real_distribution<double> u(-1, 1);
  int d = cs.dim;
  ModeExpansion h(cs.lengths, 2);
  FourierKey z{std::vector<int>(d, 0), Phase::Cos};
  if (with_linear) {
    double at = u(rng);
    for (int a = 1; a <= d; ++a) h.add(z, h.comp(a, a), RadialProfile::monomial(at, 1, 0.0));
    for (const auto& B : parallel_tt_basis(d)) {
      double c = u(rng);
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b)
          if (B[sym_index(a, b, d)] != 0.0)
            h.add(z, h.comp(1 + a, 1 + b), RadialProfile::monomial(c * B[sym_index(a, b, d)], 1, 0.0));
    }
  }
  auto spec = build_spectrum(cs, ModeKind::TTTensor);
  std::vector<const Mode*> active;
  for (const auto& m : spec.modes)
    if (m.mu > 0) active.push_back(&m);
  if (!active.empty()) {
    std::uniform_int_distribution<int> count(0, max_modes), pick(0, active.size() - 1);
    int m = count(rng);
    for (int i = 0; i < m; ++i) {
      const Mode& mode = *active[pick(rng)];
      double q = std::sqrt(mode.mu);
      h.add_mode(mode, RadialProfile::exponential(u(rng), q) + RadialProfile::exponential(u(rng), -q));
    }
  }
  return h;
}

ThreeCirclesParams random_params(double mu1, std::mt19937_64& rng, int max_offset) {
  std::uniform_real_distribution<double> u(0, 1);
  double q = std::sqrt(mu1);
  ThreeCirclesParams p;
  p.mu1 = mu1;
  p.L = 1.0 + 4.0 * u(rng);
  double beta_max = q - std::log(2.0) / (2 * p.L);
  p.beta = beta_max * (0.02 + 0.96 * u(rng));
  std::uniform_int_distribution<int> off(0, max_offset);
  do {
    p.t1 = off(rng);
    p.t2 = off(rng);
    p.t3 = off(rng);
    if (p.t1 > p.t2) std::swap(p.t1, p.t2);
    if (p.t2 > p.t3) std::swap(p.t2, p.t3);
    if (p.t1 > p.t2) std::swap(p.t1, p.t2);
  } while (!(p.t1 < p.t2 && p.t2 < p.t3));
  p.beta_prime = beta_prime_bound(p.beta, p.L, p.t2, p.t3) * (0.01 + 0.98 * u(rng));
  return p;
}

namespace {

ModeExpansion random_perturbation(const TorusCrossSection& cs, const ThreeCirclesParams& p, double chi,
                                  std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> pw(0, 3);
  auto spec = build_spectrum(cs, ModeKind::TTTensor);
  ModeExpansion e(cs.lengths, 2);
  double a = p.t1 * p.L, b = (p.t3 + 1) * p.L;
  for (const auto& m : spec.modes) {
    if (m.mu == 0 || u(rng) < 0.5) continue;
    double q = std::sqrt(m.mu);
    // rates strictly between the kernel rates so the profile is not a kernel profile
    RadialProfile f = RadialProfile::monomial(u(rng), pw(rng), 0.5 * q * u(rng));
    e.add_mode(m, f);
  }
  double s = e.coefficient_sup(a, b);
  if (s > 0) e *= chi / s;
  return e;
}

bool perturbed_trial(const TorusCrossSection& cs, const ThreeCirclesParams& p, double chi, std::uint64_t seed,
                     double* pert) {
  std::mt19937_64 rng(seed);
  ModeExpansion h = random_kernel_form(cs, rng);
  // normalize to unit size on the three tubes
  double n = 0;
  for (int t : {p.t1, p.t2, p.t3}) n = std::max(n, h.tube_norm(t * p.L, (t + 1) * p.L));
  if (n > 0) h *= 1.0 / std::sqrt(n);
  ModeExpansion e = random_perturbation(cs, p, chi, rng);
  if (pert) *pert = e.coefficient_sup(p.t1 * p.L, (p.t3 + 1) * p.L);
  return three_circles_check(h + e, p).holds;
}

}  // namespace

PerturbedTrials perturbed_three_circles_trial(const TorusCrossSection& cs, const ThreeCirclesParams& p, double chi,
                                              int trials, std::uint64_t seed) {
  validate(p);
  PerturbedTrials out;
  out.trials = trials;
  for (int i = 0; i < trials; ++i) {
    double pert = 0;
    if (perturbed_trial(cs, p, chi, seed + i, &pert)) ++out.passed;
    out.max_perturbation = std::max(out.max_perturbation, pert);
  }
  out.pass_rate = trials ? double(out.passed) / trials : 1.0;
  return out;
}

double perturbation_failure_threshold(const TorusCrossSection& cs, const ThreeCirclesParams& p, int trials,
                                      std::uint64_t seed, double chi_hi, int iterations) {
  auto all_pass = [&](double chi) { return perturbed_three_circles_trial(cs, p, chi, trials, seed).passed == trials; };
  if (all_pass(chi_hi)) return std::numeric_limits<double>::infinity();
  double lo = chi_hi * 1e-8, hi = chi_hi;
  if (!all_pass(lo)) return lo;
  for (int i = 0; i < iterations && hi / lo > 1.01; ++i) {
    double mid = std::sqrt(lo * hi);
    (all_pass(mid) ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace ricyl
