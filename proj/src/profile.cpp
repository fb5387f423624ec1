#include "ricyl/profile.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "ricyl/errors.hpp"

namespace ricyl {

namespace {

constexpr double kRateSnap = 1e-12;

bool same_rate(double a, double b) {
  return std::abs(a - b) <= 1e-13 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

double ipow(double r, int p) {
  double v = 1.0;
  for (int i = 0; i < p; ++i) v *= r;
  return v;
}

double clamp_window(double r, double lo, double hi) { return std::min(std::max(r, lo), hi); }

// value of the antiderivative at +-infinity, or throws
double antiderivative_limit(int p, double rate, double s) {
  if (s > 0) {
    if (rate < 0) return 0.0;
  } else {
    if (rate > 0) return 0.0;
  }
  throw DivergentConvolution("integral of r^" + std::to_string(p) + " e^{" + std::to_string(rate) +
                             " r} does not converge");
}

double antiderivative_any(int p, double rate, double s) {
  if (std::isinf(s)) return antiderivative_limit(p, rate, s);
  return antiderivative(p, rate, s);
}

}  // namespace

double antiderivative(int p, double rate, double s) {
  if (rate == 0.0) return ipow(s, p + 1) / (p + 1);
  double sum = 0.0, fact = 1.0, lam = rate;
  for (int j = 0; j <= p; ++j) {
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    sum += sign * fact * ipow(s, p - j) / lam;
    fact *= (p - j);
    lam *= rate;
  }
  return std::exp(rate * s) * sum;
}

std::vector<Term> antiderivative_terms(const Term& t) {
  std::vector<Term> out;
  if (t.rate == 0.0) {
    out.push_back({t.c / (t.p + 1), t.p + 1, 0.0, t.lo, t.hi});
    return out;
  }
  double fact = 1.0, lam = t.rate;
  for (int j = 0; j <= t.p; ++j) {
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    out.push_back({t.c * sign * fact / lam, t.p - j, t.rate, t.lo, t.hi});
    fact *= (t.p - j);
    lam *= t.rate;
  }
  return out;
}

RadialProfile::RadialProfile(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

RadialProfile RadialProfile::constant(double c) { return RadialProfile({Term{c, 0, 0.0}}); }

RadialProfile RadialProfile::monomial(double c, int p, double rate) {
  if (p < 0) throw InvalidArgument("negative power in radial profile");
  return RadialProfile({Term{c, p, rate}});
}

void RadialProfile::normalize() {
  std::vector<Term> in;
  in.reserve(terms_.size());
  for (auto t : terms_) {
    if (t.c == 0.0 || !(t.lo < t.hi)) continue;
    if (std::abs(t.rate) < kRateSnap) t.rate = 0.0;
    in.push_back(t);
  }
  std::sort(in.begin(), in.end(), [](const Term& a, const Term& b) {
    return std::tie(a.lo, a.hi, a.p, a.rate) < std::tie(b.lo, b.hi, b.p, b.rate);
  });
  std::vector<Term> out;
  for (const auto& t : in) {
    if (!out.empty()) {
      auto& u = out.back();
      if (u.lo == t.lo && u.hi == t.hi && u.p == t.p && same_rate(u.rate, t.rate)) {
        u.c += t.c;
        continue;
      }
    }
    out.push_back(t);
  }
  out.erase(std::remove_if(out.begin(), out.end(), [](const Term& t) { return t.c == 0.0; }), out.end());
  terms_ = std::move(out);
}

double RadialProfile::eval(double r) const {
  double v = 0.0;
  for (const auto& t : terms_)
    if (t.active(r)) v += t.c * ipow(r, t.p) * std::exp(t.rate * r);
  return v;
}

double RadialProfile::eval_weighted(double r, double rho) const {
  double v = 0.0;
  for (const auto& t : terms_)
    if (t.active(r)) v += t.c * ipow(r, t.p) * std::exp((t.rate + rho) * r);
  return v;
}

double RadialProfile::derivative_at(double r, int order) const {
  RadialProfile d = *this;
  for (int i = 0; i < order; ++i) d = d.derivative();
  return d.eval(r);
}

RadialProfile RadialProfile::derivative() const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    if (t.p > 0) out.push_back({t.c * t.p, t.p - 1, t.rate, t.lo, t.hi});
    if (t.rate != 0.0) out.push_back({t.c * t.rate, t.p, t.rate, t.lo, t.hi});
  }
  return RadialProfile(std::move(out));
}

RadialProfile RadialProfile::restricted(double lo, double hi) const {
  std::vector<Term> out;
  for (auto t : terms_) {
    t.lo = std::max(t.lo, lo);
    t.hi = std::min(t.hi, hi);
    out.push_back(t);
  }
  return RadialProfile(std::move(out));
}

RadialProfile RadialProfile::shifted_rate(double dlambda) const {
  auto out = terms_;
  for (auto& t : out) t.rate += dlambda;
  return RadialProfile(std::move(out));
}

RadialProfile RadialProfile::times_power(int q) const {
  auto out = terms_;
  for (auto& t : out) t.p += q;
  return RadialProfile(std::move(out));
}

RadialProfile RadialProfile::running_integral() const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    double c0 = clamp_window(0.0, t.lo, t.hi);
    double F0 = t.c * antiderivative(t.p, t.rate, c0);
    if (t.lo > -kInf) {
      double v = t.c * antiderivative(t.p, t.rate, t.lo) - F0;
      out.push_back({v, 0, 0.0, -kInf, t.lo});
    }
    for (auto a : antiderivative_terms(t)) out.push_back(a);
    out.push_back({-F0, 0, 0.0, t.lo, t.hi});
    if (t.hi < kInf) {
      double v = t.c * antiderivative(t.p, t.rate, t.hi) - F0;
      out.push_back({v, 0, 0.0, t.hi, kInf});
    }
  }
  return RadialProfile(std::move(out));
}

RadialProfile RadialProfile::tail_integral() const {
  std::vector<Term> out;
  for (const auto& t : terms_) {
    double Fend;
    if (t.hi < kInf) {
      Fend = t.c * antiderivative(t.p, t.rate, t.hi);
    } else {
      if (!(t.rate < 0.0))
        throw DivergentConvolution("tail integral of a non-decaying term (rate " + std::to_string(t.rate) + ")");
      Fend = 0.0;
    }
    if (t.lo > -kInf) {
      double v = Fend - t.c * antiderivative(t.p, t.rate, t.lo);
      out.push_back({v, 0, 0.0, -kInf, t.lo});
    }
    for (auto a : antiderivative_terms(t)) {
      a.c = -a.c;
      out.push_back(a);
    }
    out.push_back({Fend, 0, 0.0, t.lo, t.hi});
  }
  return RadialProfile(std::move(out));
}

double RadialProfile::integrate(double a, double b) const {
  if (a == b) return 0.0;
  if (a > b) return -integrate(b, a);
  double s = 0.0;
  for (const auto& t : terms_) {
    double lo = std::max(a, t.lo), hi = std::min(b, t.hi);
    if (!(lo < hi)) continue;
    s += t.c * (antiderivative_any(t.p, t.rate, hi) - antiderivative_any(t.p, t.rate, lo));
  }
  return s;
}

double RadialProfile::max_tail_rate(double r0) const {
  double m = -kInf;
  for (const auto& t : terms_)
    if (t.hi == kInf || t.hi > r0) m = std::max(m, t.rate);
  return m;
}

double RadialProfile::sup_abs(double a, double b, int samples) const {
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    double r = a + (b - a) * i / (samples - 1);
    m = std::max(m, std::abs(eval(r)));
  }
  return m;
}

RadialProfile& RadialProfile::operator+=(const RadialProfile& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  normalize();
  return *this;
}

RadialProfile& RadialProfile::operator-=(const RadialProfile& o) {
  for (auto t : o.terms_) {
    t.c = -t.c;
    terms_.push_back(t);
  }
  normalize();
  return *this;
}

RadialProfile& RadialProfile::operator*=(double s) {
  for (auto& t : terms_) t.c *= s;
  normalize();
  return *this;
}

RadialProfile operator*(const RadialProfile& a, const RadialProfile& b) {
  std::vector<Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_)
      out.push_back({x.c * y.c, x.p + y.p, x.rate + y.rate, std::max(x.lo, y.lo), std::min(x.hi, y.hi)});
  return RadialProfile(std::move(out));
}

}  // namespace ricyl
