#include "ricyl/divergence_solver.hpp"

#include <cmath>

#include "ricyl/errors.hpp"
#include "ricyl/green_kernel.hpp"
#include "ricyl/mode_ode.hpp"

namespace ricyl {

std::string to_string(Sector s) { return s == Sector::Finite ? "finite" : "infinite"; }

std::string to_string(Growth g) {
  switch (g) {
    case Growth::Decaying: return "decaying";
    case Growth::Bounded: return "bounded";
    case Growth::Polynomial: return "polynomial";
    case Growth::Exponential: return "exponential";
  }
  return "?";
}

Growth growth_class(const RadialProfile& p) {
  Growth g = Growth::Decaying;
  for (const auto& t : p.terms()) {
    if (t.hi != kInf) continue;
    if (t.rate > 0) return Growth::Exponential;
    if (t.rate == 0) g = std::max(g, t.p > 0 ? Growth::Polynomial : Growth::Bounded);
  }
  return g;
}

GaugeField make_gauge_field(const ModeExpansion& X) {
  GaugeField G;
  G.one_form = X;
  for (const auto& [key, comps] : X.terms()) {
    G.sector[key] = key.is_zero() ? Sector::Finite : Sector::Infinite;
    Growth g = Growth::Decaying;
    for (const auto& c : comps) g = std::max(g, growth_class(c));
    G.growth[key] = g;
  }
  return G;
}

ModeExpansion lie_derivative_metric(const GaugeField& X) { return ops::sym_grad(X.one_form); }

ModeExpansion modified_divergence(const ModeExpansion& h, double tau) { return ops::modified_divergence(h, tau); }

void check_resonance(double tau, const std::vector<double>& eigenvalues) {
  if (tau < 0) throw InvalidArgument("tau must be nonnegative");
  if (tau == 0) return;
  for (double mu : eigenvalues)
    if (mu > 0 && std::abs(4 * tau * tau - mu) <= 1e-6)
      throw ResonantTau("4 tau^2 = " + std::to_string(4 * tau * tau) + " hits eigenvalue " + std::to_string(mu));
}

namespace {

// kappa'' + tau kappa' = s with kappa(0) = kappa'(0) = 0
RadialProfile damped_solve(const RadialProfile& s, double tau) {
  if (s.is_zero()) return {};
  RadialProfile u = s.shifted_rate(tau).running_integral().shifted_rate(-tau);
  return u.running_integral();
}

bool has_constant_part(const RadialProfile& p) {
  for (const auto& t : p.terms())
    if (t.p == 0 && t.rate == 0 && t.lo == -kInf && t.hi == kInf) return true;
  return false;
}

bool supported_on_half_line(const RadialProfile& p) {
  for (const auto& t : p.terms())
    if (t.lo < 0) return false;
  return true;
}

double mu_of(const std::vector<double>& lengths, const FourierKey& key) {
  double m = 0;
  for (size_t a = 0; a < lengths.size(); ++a) {
    double kap = 2 * M_PI * key.k[a] / lengths[a];
    m += kap * kap;
  }
  return m;
}

}  // namespace

GaugeField solve_gauge_rhs(const ModeExpansion& w, const DivergenceConfig& cfg) {
  if (w.rank() != 1) throw RankMismatch("gauge right-hand side must be a 1-form");
  std::vector<double> mus = cfg.spectrum;
  for (const auto& [key, c] : w.terms()) mus.push_back(mu_of(w.lengths(), key));
  check_resonance(cfg.tau, mus);

  ModeExpansion X(w.lengths(), 1);
  // finite sector: delta_tau(L_X g) = (-2 kappa'' - 2 tau kappa', -eta'' - tau eta')
  ModeExpansion zero = w.filtered([](const FourierKey& k) { return k.is_zero(); });
  for (const auto& [key, comps] : zero.terms()) {
    X.add(key, 0, damped_solve(comps[0] * -0.5, cfg.tau));
    for (int j = 1; j < w.n(); ++j) X.add(key, j, damped_solve(-comps[j], cfg.tau));
  }

  // infinite sector
  ModeExpansion rest = w.filtered([](const FourierKey& k) { return !k.is_zero(); });
  if (!rest.is_zero()) {
    SourceExpansion src = decompose_one_form(rest);
    bool half_line = true;
    for (const auto& [key, comps] : rest.terms())
      for (const auto& c : comps) half_line = half_line && supported_on_half_line(c);
    if (cfg.route == InfiniteRoute::Kernel && half_line) {
      X += apply_green(src);
    } else {
      for (const auto& [phi, s] : src.scalar) {
        double mu = mu_of(w.lengths(), phi);
        MixedSolution sol = solve_mixed_mode(mu, -s.b, s.c * -0.5);
        X += scalar_type_one_form(w.lengths(), phi, sol.k, sol.l);
      }
      for (const auto& [key, v] : src.coclosed) {
        double mu = mu_of(w.lengths(), key);
        for (size_t a = 0; a < v.size(); ++a) X.add(key, 1 + a, solve_scalar_mode(mu, -v[a]));
      }
    }
  }
  return make_gauge_field(X);
}

GaugeField solve_gauge(const ModeExpansion& source, const DivergenceConfig& cfg) {
  if (source.rank() != 2) throw RankMismatch("gauge source must be a symmetric 2-tensor");
  if (cfg.tau == 0.0) {
    FourierKey z{std::vector<int>(source.dim(), 0), Phase::Cos};
    for (int j = 0; j < source.n(); ++j)
      if (has_constant_part(source.get(z, source.comp(0, j))))
        throw NonInvertibleSector(
            "source has a component along dr(x)dr or dr(x)phi (phi harmonic); these are not in the image of "
            "X -> delta(L_X g) restricted to Killing-dual fields, use tau > 0");
  }
  return solve_gauge_rhs(ops::modified_divergence(source, cfg.tau), cfg);
}

double gauge_residual(const GaugeField& X, const ModeExpansion& source, double tau, double a, double b) {
  ModeExpansion lhs = ops::modified_divergence(lie_derivative_metric(X), tau);
  return (lhs - ops::modified_divergence(source, tau)).coefficient_sup(a, b);
}

}  // namespace ricyl
