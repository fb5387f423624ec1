#include "ricyl/expansion.hpp"

#include <cmath>

#include "ricyl/errors.hpp"

namespace ricyl {

namespace {

double amplitude_of(const std::vector<double>& lengths, const std::vector<int>& k) {
  double vol = 1.0;
  for (double l : lengths) vol *= l;
  bool zero = true;
  for (int v : k) zero = zero && v == 0;
  return zero ? 1.0 / std::sqrt(vol) : std::sqrt(2.0 / vol);
}

std::vector<double> kappa_of(const std::vector<double>& lengths, const std::vector<int>& k) {
  std::vector<double> kap(lengths.size());
  for (size_t a = 0; a < lengths.size(); ++a) kap[a] = 2.0 * M_PI * k[a] / lengths[a];
  return kap;
}

double weight(int rank, int c, int n) {
  if (rank < 2) return 1.0;
  // packed index c is diagonal iff it equals sym_index(i,i)
  for (int i = 0; i < n; ++i)
    if (sym_index(i, i, n) == c) return 1.0;
  return 2.0;
}

const RadialProfile kZero{};

}  // namespace

ModeExpansion::ModeExpansion(std::vector<double> lengths, int rank) : lengths_(std::move(lengths)), rank_(rank) {
  if (rank < 0 || rank > 2) throw InvalidArgument("expansion rank must be 0, 1 or 2");
  if (lengths_.empty()) throw InvalidArgument("expansion needs at least one torus direction");
}

int ModeExpansion::num_components() const {
  switch (rank_) {
    case 0: return 1;
    case 1: return n();
    default: return sym_size(n());
  }
}

bool ModeExpansion::is_zero() const { return terms_.empty(); }

void ModeExpansion::add(const FourierKey& key, int component, const RadialProfile& p) {
  if (component < 0 || component >= num_components()) throw InvalidArgument("component index out of range");
  if ((int)key.k.size() != dim()) throw InvalidArgument("frequency vector has wrong dimension");
  int sign = 1;
  FourierKey ck{canonicalize(key.k, &sign), key.phase};
  if (ck.is_zero() && ck.phase == Phase::Sin) return;
  if (p.is_zero()) return;
  auto& comps = terms_[ck];
  if (comps.empty()) comps.resize(num_components());
  if (sign < 0 && ck.phase == Phase::Sin)
    comps[component] -= p;
  else
    comps[component] += p;
  prune();
}

void ModeExpansion::add_mode(const Mode& m, const RadialProfile& f) {
  int d = dim();
  FourierKey key = m.key();
  switch (m.rank()) {
    case 0:
      if (rank_ != 0) throw RankMismatch("scalar mode added to a tensor expansion");
      add(key, 0, f);
      break;
    case 1:
      if (rank_ != 1) throw RankMismatch("1-form mode added to a non-1-form expansion");
      for (int a = 0; a < d; ++a)
        if (m.polarization[a] != 0.0) add(key, 1 + a, f * m.polarization[a]);
      break;
    default:
      if (rank_ != 2) throw RankMismatch("2-tensor mode added to a non-2-tensor expansion");
      for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
          double v = m.polarization[sym_index(a, b, d)];
          if (v != 0.0) add(key, 1 + a, 1 + b, f * v);
        }
  }
}

const RadialProfile& ModeExpansion::get(const FourierKey& key, int component) const {
  auto it = terms_.find(key);
  if (it == terms_.end()) return kZero;
  return it->second[component];
}

void ModeExpansion::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    bool empty = true;
    for (const auto& p : it->second) empty = empty && p.is_zero();
    it = empty ? terms_.erase(it) : std::next(it);
  }
}

std::vector<double> ModeExpansion::eval(double r, const std::vector<double>& x) const {
  std::vector<double> v(num_components(), 0.0);
  TorusCrossSection cs(dim(), lengths_, 1);
  for (const auto& [key, comps] : terms_) {
    double e = cs.fourier(key, x);
    if (e == 0.0) continue;
    for (int c = 0; c < num_components(); ++c)
      if (!comps[c].is_zero()) v[c] += e * comps[c].eval(r);
  }
  return v;
}

ModeExpansion ModeExpansion::filtered(const std::function<bool(const FourierKey&)>& keep) const {
  ModeExpansion out(lengths_, rank_);
  for (const auto& [key, comps] : terms_)
    if (keep(key)) out.terms_[key] = comps;
  return out;
}

ModeExpansion ModeExpansion::map_profiles(const std::function<RadialProfile(const RadialProfile&)>& f) const {
  ModeExpansion out(lengths_, rank_);
  for (const auto& [key, comps] : terms_) {
    Components nc(comps.size());
    for (size_t c = 0; c < comps.size(); ++c) nc[c] = f(comps[c]);
    out.terms_[key] = nc;
  }
  out.prune();
  return out;
}

ModeExpansion& ModeExpansion::operator+=(const ModeExpansion& o) {
  if (o.rank_ != rank_ || o.lengths_ != lengths_) throw RankMismatch("adding incompatible expansions");
  for (const auto& [key, comps] : o.terms_) {
    auto& mine = terms_[key];
    if (mine.empty()) mine.resize(num_components());
    for (size_t c = 0; c < comps.size(); ++c) mine[c] += comps[c];
  }
  prune();
  return *this;
}

ModeExpansion& ModeExpansion::operator-=(const ModeExpansion& o) {
  ModeExpansion neg = o;
  neg *= -1.0;
  return *this += neg;
}

ModeExpansion& ModeExpansion::operator*=(double s) {
  for (auto& [key, comps] : terms_)
    for (auto& p : comps) p *= s;
  prune();
  return *this;
}

ModeExpansion ModeExpansion::times(const RadialProfile& f) const {
  return map_profiles([&](const RadialProfile& p) { return p * f; });
}

double ModeExpansion::coefficient_sup(double a, double b, int samples) const {
  double m = 0.0;
  for (int i = 0; i < samples; ++i) {
    double r = samples == 1 ? a : a + (b - a) * i / (samples - 1);
    double s = 0.0;
    for (const auto& [key, comps] : terms_) {
      double amp = amplitude_of(lengths_, key.k);
      for (int c = 0; c < (int)comps.size(); ++c)
        if (!comps[c].is_zero()) s += amp * std::sqrt(weight(rank_, c, n())) * std::abs(comps[c].eval(r));
    }
    m = std::max(m, s);
  }
  return m;
}

double ModeExpansion::tube_norm(double a, double b) const {
  double s = 0.0;
  for (const auto& [key, comps] : terms_)
    for (int c = 0; c < (int)comps.size(); ++c)
      if (!comps[c].is_zero()) s += weight(rank_, c, n()) * (comps[c] * comps[c]).integrate(a, b);
  return s;
}

namespace ops {

namespace {

ModeExpansion component(const ModeExpansion& f, int c) {
  ModeExpansion out(f.lengths(), 0);
  for (const auto& [key, comps] : f.terms())
    if (!comps[c].is_zero()) out.add(key, 0, comps[c]);
  return out;
}

void add_component(ModeExpansion& out, int c, const ModeExpansion& s, double scale = 1.0) {
  for (const auto& [key, comps] : s.terms())
    if (!comps[0].is_zero()) out.add(key, c, comps[0] * scale);
}

}  // namespace

ModeExpansion partial(const ModeExpansion& f, int i) {
  ModeExpansion out(f.lengths(), f.rank());
  if (i == 0) return f.map_profiles([](const RadialProfile& p) { return p.derivative(); });
  int a = i - 1;
  for (const auto& [key, comps] : f.terms()) {
    if (key.is_zero()) continue;
    double ka = kappa_of(f.lengths(), key.k)[a];
    if (ka == 0.0) continue;
    double s = key.phase == Phase::Cos ? -ka : ka;
    FourierKey target = key.partner();
    for (int c = 0; c < f.num_components(); ++c)
      if (!comps[c].is_zero()) out.add(target, c, comps[c] * s);
  }
  return out;
}

ModeExpansion gradient(const ModeExpansion& f) {
  if (f.rank() != 0) throw RankMismatch("gradient expects a scalar field");
  ModeExpansion out(f.lengths(), 1);
  for (int i = 0; i < f.n(); ++i) add_component(out, i, partial(f, i));
  return out;
}

ModeExpansion sym_grad(const ModeExpansion& X) {
  if (X.rank() != 1) throw RankMismatch("sym_grad expects a 1-form");
  int n = X.n();
  ModeExpansion out(X.lengths(), 2);
  std::vector<ModeExpansion> comp;
  for (int j = 0; j < n; ++j) comp.push_back(component(X, j));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      ModeExpansion v = partial(comp[j], i) + partial(comp[i], j);
      add_component(out, out.comp(i, j), v);
    }
  return out;
}

ModeExpansion divergence(const ModeExpansion& h) {
  int n = h.n();
  if (h.rank() == 1) {
    ModeExpansion out(h.lengths(), 0);
    for (int i = 0; i < n; ++i) out -= partial(component(h, i), i);
    return out;
  }
  if (h.rank() != 2) throw RankMismatch("divergence expects a 1-form or a 2-tensor");
  ModeExpansion out(h.lengths(), 1);
  for (int j = 0; j < n; ++j) {
    ModeExpansion s(h.lengths(), 0);
    for (int i = 0; i < n; ++i) s -= partial(component(h, h.comp(i, j)), i);
    add_component(out, j, s);
  }
  return out;
}

ModeExpansion trace(const ModeExpansion& h) {
  if (h.rank() != 2) throw RankMismatch("trace expects a 2-tensor");
  ModeExpansion out(h.lengths(), 0);
  for (int i = 0; i < h.n(); ++i) out += component(h, h.comp(i, i));
  return out;
}

ModeExpansion hessian(const ModeExpansion& f) {
  if (f.rank() != 0) throw RankMismatch("hessian expects a scalar field");
  int n = f.n();
  ModeExpansion out(f.lengths(), 2);
  for (int i = 0; i < n; ++i) {
    ModeExpansion fi = partial(f, i);
    for (int j = i; j < n; ++j) add_component(out, out.comp(i, j), partial(fi, j));
  }
  return out;
}

ModeExpansion rough_laplacian(const ModeExpansion& f) {
  ModeExpansion out(f.lengths(), f.rank());
  for (const auto& [key, comps] : f.terms()) {
    double mu = 0;
    for (double k : kappa_of(f.lengths(), key.k)) mu += k * k;
    for (int c = 0; c < f.num_components(); ++c)
      if (!comps[c].is_zero()) out.add(key, c, comps[c] * mu - comps[c].derivative().derivative());
  }
  return out;
}

ModeExpansion scalar_times_metric(const ModeExpansion& f) {
  if (f.rank() != 0) throw RankMismatch("expected a scalar field");
  ModeExpansion out(f.lengths(), 2);
  for (int i = 0; i < f.n(); ++i) add_component(out, out.comp(i, i), f);
  return out;
}

ModeExpansion tangential_metric(const ModeExpansion& f) {
  if (f.rank() != 0) throw RankMismatch("expected a scalar field");
  ModeExpansion out(f.lengths(), 2);
  for (int i = 1; i < f.n(); ++i) add_component(out, out.comp(i, i), f);
  return out;
}

ModeExpansion gauge_operator(const ModeExpansion& X) { return divergence(sym_grad(X)); }

ModeExpansion linearized_ricci(const ModeExpansion& h) {
  if (h.rank() != 2) throw RankMismatch("linearized_ricci expects a 2-tensor");
  return rough_laplacian(h) - sym_grad(divergence(h)) - hessian(trace(h));
}

ModeExpansion radial_contraction_E0(const ModeExpansion& h) {
  if (h.rank() != 2) throw RankMismatch("radial contraction expects a 2-tensor");
  ModeExpansion out(h.lengths(), 1);
  FourierKey zero{std::vector<int>(h.dim(), 0), Phase::Cos};
  for (int j = 0; j < h.n(); ++j) {
    const auto& p = h.get(zero, h.comp(0, j));
    if (!p.is_zero()) out.add(zero, j, p);
  }
  return out;
}

ModeExpansion modified_divergence(const ModeExpansion& h, double tau) {
  ModeExpansion out = divergence(h);
  if (tau != 0.0) {
    ModeExpansion c = radial_contraction_E0(h);
    c *= tau;
    out -= c;
  }
  return out;
}

}  // namespace ops

double sup_norm(const ModeExpansion& f, double a, double b, int nr, int nx) {
  int d = f.dim();
  long total = 1;
  for (int i = 0; i < d; ++i) total *= nx;
  double m = 0;
  std::vector<double> x(d);
  for (int ir = 0; ir < nr; ++ir) {
    double r = nr == 1 ? a : a + (b - a) * ir / (nr - 1);
    for (long idx = 0; idx < total; ++idx) {
      long q = idx;
      for (int i = d - 1; i >= 0; --i) {
        x[i] = f.lengths()[i] * (q % nx) / nx;
        q /= nx;
      }
      auto v = f.eval(r, x);
      double s = 0;
      for (int c = 0; c < (int)v.size(); ++c) s += weight(f.rank(), c, f.n()) * v[c] * v[c];
      m = std::max(m, std::sqrt(s));
    }
  }
  return m;
}

}  // namespace ricyl
