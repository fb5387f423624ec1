#include "ricyl/fd_oracle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "ricyl/errors.hpp"

namespace ricyl {

long GridSpec::tangential_points() const {
  long t = 1;
  for (int v : nx) t *= v;
  return t;
}

double GridSpec::h2() const {
  double h = dr();
  for (int i = 0; i < dim(); ++i) h = std::max(h, dx(i));
  return h * h;
}

void GridSpec::validate() const {
  if ((int)lengths.size() != dim()) throw InvalidArgument("grid: lengths and nx differ in size");
  if (!(b > a)) throw InvalidArgument("grid: need a < b");
  if (nr < 8) throw InvalidArgument("grid: n_r must be >= 8");
  for (int v : nx)
    if (v < 8) throw InvalidArgument("grid: tangential counts must be >= 8");
}

GridSpec make_grid(const std::vector<double>& lengths, double a, double b, int nr, int nx) {
  GridSpec g;
  g.a = a;
  g.b = b;
  g.nr = nr;
  g.lengths = lengths;
  g.nx.assign(lengths.size(), nx);
  return g;
}

GridField::GridField(const GridSpec& s, int rk) : spec(s), rank(rk) {
  s.validate();
  int n = s.dim() + 1;
  ncomp = rk == 0 ? 1 : rk == 1 ? n : sym_size(n);
  double entries = double(s.points()) * ncomp;
  if (entries > kMaxGridEntries)
    throw GridTooLarge("grid field needs " + std::to_string(entries) + " entries (limit 2e8)");
  data.assign(s.points() * ncomp, 0.0);
}

std::vector<double> GridField::component(int c) const {
  std::vector<double> v(spec.points());
  for (long p = 0; p < (long)v.size(); ++p) v[p] = at(p, c);
  return v;
}

void GridField::set_component(int c, const std::vector<double>& v) {
  for (long p = 0; p < (long)v.size(); ++p) at(p, c) = v[p];
}

GridField& GridField::operator+=(const GridField& o) {
  if (o.data.size() != data.size()) throw RankMismatch("grid fields differ in shape");
  for (size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& o) {
  if (o.data.size() != data.size()) throw RankMismatch("grid fields differ in shape");
  for (size_t i = 0; i < data.size(); ++i) data[i] -= o.data[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (double& v : data) v *= s;
  return *this;
}

namespace {

std::vector<double> tangential_coord(const GridSpec& g, long t) {
  int d = g.dim();
  std::vector<double> x(d);
  for (int i = d - 1; i >= 0; --i) {
    x[i] = g.lengths[i] * (t % g.nx[i]) / g.nx[i];
    t /= g.nx[i];
  }
  return x;
}

long stride(const GridSpec& g, int a) {
  long s = 1;
  for (int i = g.dim() - 1; i > a; --i) s *= g.nx[i];
  return s;
}

}  // namespace

GridField sample(const ModeExpansion& f, const GridSpec& g) {
  if (f.dim() != g.dim()) throw RankMismatch("expansion and grid have different torus dimensions");
  GridField out(g, f.rank());
  long Nx = g.tangential_points();
  TorusCrossSection cs(g.dim(), g.lengths, 1);
  std::vector<std::vector<double>> xs(Nx);
  for (long t = 0; t < Nx; ++t) xs[t] = tangential_coord(g, t);
  std::vector<double> ex(Nx), er(g.nr);
  for (const auto& [key, comps] : f.terms()) {
    for (long t = 0; t < Nx; ++t) ex[t] = cs.fourier(key, xs[t]);
    for (int c = 0; c < out.ncomp; ++c) {
      if (comps[c].is_zero()) continue;
      for (int ir = 0; ir < g.nr; ++ir) er[ir] = comps[c].eval(g.r(ir));
      for (int ir = 0; ir < g.nr; ++ir)
        for (long t = 0; t < Nx; ++t) out.at(ir * Nx + t, c) += er[ir] * ex[t];
    }
  }
  return out;
}

GridField sample_function(const GridSpec& g, int rank,
                          const std::function<std::vector<double>(double, const std::vector<double>&)>& f) {
  GridField out(g, rank);
  long Nx = g.tangential_points();
  for (int ir = 0; ir < g.nr; ++ir)
    for (long t = 0; t < Nx; ++t) {
      auto v = f(g.r(ir), tangential_coord(g, t));
      for (int c = 0; c < out.ncomp; ++c) out.at(ir * Nx + t, c) = v[c];
    }
  return out;
}

GridField flat_metric(const GridSpec& g) {
  GridField out(g, 2);
  int n = out.n();
  for (long p = 0; p < g.points(); ++p)
    for (int i = 0; i < n; ++i) out.at(p, sym_index(i, i, n)) = 1.0;
  return out;
}

std::vector<double> fornberg_weights(double z, const std::vector<double>& x, int m) {
  int n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0, c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = c[i][m];
  return w;
}

namespace {

void check_order(const StencilConfig& cfg) {
  if (cfg.order != 2 && cfg.order != 4) throw InvalidArgument("stencil order must be 2 or 4");
}

// derivative of order m along one direction; differences against the centre node so that
// constants differentiate to exactly zero
std::vector<double> directional(const GridSpec& g, const std::vector<double>& f, int dir, int m,
                                const StencilConfig& cfg) {
  check_order(cfg);
  int s = cfg.order / 2, w = 2 * s + 1;
  std::vector<double> out(f.size(), 0.0);
  long Nx = g.tangential_points();
  std::vector<double> nodes(w);
  for (int i = 0; i < w; ++i) nodes[i] = i - s;
  auto central = fornberg_weights(0.0, nodes, m);
  if (dir == 0) {
    double h = std::pow(g.dr(), m);
    for (int ir = 0; ir < g.nr; ++ir) {
      std::vector<double> wt = central;
      int start = ir - s;
      if (g.periodic_r) {
        for (int k = 0; k < w; ++k) {
          int jr = ((ir - s + k) % g.nr + g.nr) % g.nr;
          for (long t = 0; t < Nx; ++t) out[ir * Nx + t] += wt[k] * (f[jr * Nx + t] - f[ir * Nx + t]) / h;
        }
        continue;
      }
      if (start < 0 || start + w > g.nr) {
        if (cfg.boundary == BoundaryPolicy::InteriorRestricted) continue;
        start = std::clamp(start, 0, g.nr - w);
        std::vector<double> sh(w);
        for (int i = 0; i < w; ++i) sh[i] = start + i - ir;
        wt = fornberg_weights(0.0, sh, m);
      }
      for (int k = 0; k < w; ++k)
        for (long t = 0; t < Nx; ++t) out[ir * Nx + t] += wt[k] * (f[(start + k) * Nx + t] - f[ir * Nx + t]) / h;
    }
    return out;
  }
  int a = dir - 1;
  long st = stride(g, a);
  int na = g.nx[a];
  double h = std::pow(g.dx(a), m);
  for (long p = 0; p < (long)f.size(); ++p) {
    long t = p % Nx;
    int ia = (t / st) % na;
    double v = 0;
    for (int k = 0; k < w; ++k) {
      int ja = ((ia + k - s) % na + na) % na;
      v += central[k] * (f[p + (ja - ia) * st] - f[p]);
    }
    out[p] = v / h;
  }
  return out;
}

}  // namespace

std::vector<double> fd_derivative(const GridSpec& g, const std::vector<double>& f, int dir, const StencilConfig& cfg) {
  return directional(g, f, dir, 1, cfg);
}

std::vector<double> fd_second(const GridSpec& g, const std::vector<double>& f, int dir1, int dir2,
                              const StencilConfig& cfg) {
  if (dir1 == dir2) return directional(g, f, dir1, 2, cfg);
  return directional(g, directional(g, f, dir1, 1, cfg), dir2, 1, cfg);
}

namespace {

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

std::vector<double> laplacian(const GridSpec& g, const std::vector<double>& f, const StencilConfig& cfg) {
  std::vector<double> out(f.size(), 0.0);
  for (int k = 0; k <= g.dim(); ++k) axpy(out, 1.0, fd_second(g, f, k, k, cfg));
  return out;
}

}  // namespace

GridField fd_operator(FdOp op, const GridField& f, const StencilConfig& cfg) {
  const GridSpec& g = f.spec;
  int n = f.n();
  auto S = [n](int i, int j) { return sym_index(std::min(i, j), std::max(i, j), n); };
  switch (op) {
    case FdOp::Divergence: {
      if (f.rank == 0) throw RankMismatch("divergence of a function");
      GridField out(g, f.rank - 1);
      if (f.rank == 1) {
        std::vector<double> v(g.points(), 0.0);
        for (int i = 0; i < n; ++i) axpy(v, -1.0, fd_derivative(g, f.component(i), i, cfg));
        out.set_component(0, v);
      } else {
        for (int j = 0; j < n; ++j) {
          std::vector<double> v(g.points(), 0.0);
          for (int i = 0; i < n; ++i) axpy(v, -1.0, fd_derivative(g, f.component(S(i, j)), i, cfg));
          out.set_component(j, v);
        }
      }
      return out;
    }
    case FdOp::SymGrad: {
      if (f.rank != 1) throw RankMismatch("sym_grad expects a 1-form");
      GridField out(g, 2);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          auto v = fd_derivative(g, f.component(j), i, cfg);
          axpy(v, 1.0, fd_derivative(g, f.component(i), j, cfg));
          out.set_component(S(i, j), v);
        }
      return out;
    }
    case FdOp::RoughLaplacian:
    case FdOp::Lichnerowicz: {
      GridField out(g, f.rank);
      for (int c = 0; c < f.ncomp; ++c) {
        auto v = laplacian(g, f.component(c), cfg);
        for (double& x : v) x = -x;
        out.set_component(c, v);
      }
      if (op == FdOp::Lichnerowicz) {
        if (f.rank != 2) throw RankMismatch("Lichnerowicz Laplacian acts on 2-tensors");
        GridField g0 = flat_metric(g);
        GridField ric = nonlinear_ricci(g0, cfg);
        GridField rh = curvature_action(g0, f, cfg);
        for (long p = 0; p < g.points(); ++p)
          for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
              double v = -2 * rh.at(p, S(i, j));
              for (int k = 0; k < n; ++k) v += ric.at(p, S(i, k)) * f.at(p, S(k, j)) + ric.at(p, S(j, k)) * f.at(p, S(k, i));
              out.at(p, S(i, j)) += v;
            }
      }
      return out;
    }
    case FdOp::TraceHessian: {
      if (f.rank != 2) throw RankMismatch("trace Hessian expects a 2-tensor");
      std::vector<double> tr(g.points(), 0.0);
      for (int k = 0; k < n; ++k) axpy(tr, 1.0, f.component(S(k, k)));
      GridField out(g, 2);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.set_component(S(i, j), fd_second(g, tr, i, j, cfg));
      return out;
    }
    case FdOp::LinearizedRicci: {
      if (f.rank != 2) throw RankMismatch("linearized Ricci expects a 2-tensor");
      // -Lap h_ij + d_i d_k h_kj + d_j d_k h_ki - d_i d_j h_kk
      std::vector<std::vector<double>> dh(n);  // d_k h_kj
      for (int j = 0; j < n; ++j) {
        dh[j].assign(g.points(), 0.0);
        for (int k = 0; k < n; ++k) axpy(dh[j], 1.0, fd_derivative(g, f.component(S(k, j)), k, cfg));
      }
      std::vector<double> tr(g.points(), 0.0);
      for (int k = 0; k < n; ++k) axpy(tr, 1.0, f.component(S(k, k)));
      GridField out(g, 2);
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          auto v = laplacian(g, f.component(S(i, j)), cfg);
          for (double& x : v) x = -x;
          axpy(v, 1.0, fd_derivative(g, dh[j], i, cfg));
          axpy(v, 1.0, fd_derivative(g, dh[i], j, cfg));
          axpy(v, -1.0, fd_second(g, tr, i, j, cfg));
          out.set_component(S(i, j), v);
        }
      return out;
    }
    case FdOp::GaugeOperator: {
      if (f.rank != 1) throw RankMismatch("gauge operator expects a 1-form");
      std::vector<double> div(g.points(), 0.0);
      for (int i = 0; i < n; ++i) axpy(div, 1.0, fd_derivative(g, f.component(i), i, cfg));
      GridField out(g, 1);
      for (int j = 0; j < n; ++j) {
        auto v = laplacian(g, f.component(j), cfg);
        for (double& x : v) x = -x;
        axpy(v, -1.0, fd_derivative(g, div, j, cfg));
        out.set_component(j, v);
      }
      return out;
    }
  }
  throw InvalidArgument("unknown operator");
}

namespace {

struct Christoffel {
  int n;
  std::vector<std::vector<double>> gam;  // gam[k * ncomp + S(i,j)] = Gamma^k_ij
};

Christoffel christoffel(const GridField& metric, const StencilConfig& cfg) {
  const GridSpec& g = metric.spec;
  int n = metric.n(), nc = metric.ncomp;
  auto S = [n](int i, int j) { return sym_index(std::min(i, j), std::max(i, j), n); };
  std::vector<std::vector<double>> dg(n * nc);
  for (int k = 0; k < n; ++k)
    for (int c = 0; c < nc; ++c) dg[k * nc + c] = fd_derivative(g, metric.component(c), k, cfg);
  Christoffel C;
  C.n = n;
  C.gam.assign(n * nc, std::vector<double>(g.points(), 0.0));
  Eigen::MatrixXd G(n, n);
  for (long p = 0; p < g.points(); ++p) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G(i, j) = metric.at(p, S(i, j));
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("metric is not positive definite at grid point " + std::to_string(p));
    Eigen::MatrixXd Gi = llt.solve(Eigen::MatrixXd::Identity(n, n));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
          double v = 0;
          for (int l = 0; l < n; ++l) {
            double s = dg[i * nc + S(j, l)][p] + dg[j * nc + S(i, l)][p] - dg[l * nc + S(i, j)][p];
            if (s != 0.0) v += Gi(k, l) * s;
          }
          C.gam[k * nc + S(i, j)][p] = 0.5 * v;
        }
  }
  return C;
}

}  // namespace

GridField nonlinear_ricci(const GridField& metric, const StencilConfig& cfg) {
  if (metric.rank != 2) throw RankMismatch("metric must be a 2-tensor");
  const GridSpec& g = metric.spec;
  int n = metric.n(), nc = metric.ncomp;
  auto S = [n](int i, int j) { return sym_index(std::min(i, j), std::max(i, j), n); };
  Christoffel C = christoffel(metric, cfg);
  auto Gam = [&](int k, int i, int j) -> const std::vector<double>& { return C.gam[k * nc + S(i, j)]; };
  // V_i = Gamma^k_ik
  std::vector<std::vector<double>> V(n, std::vector<double>(g.points(), 0.0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) axpy(V[i], 1.0, Gam(k, i, k));
  GridField out(g, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<double> v(g.points(), 0.0);
      for (int k = 0; k < n; ++k) axpy(v, 1.0, fd_derivative(g, Gam(k, i, j), k, cfg));
      axpy(v, -0.5, fd_derivative(g, V[i], j, cfg));
      axpy(v, -0.5, fd_derivative(g, V[j], i, cfg));
      for (long p = 0; p < g.points(); ++p) {
        double q = 0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            q += Gam(k, k, l)[p] * Gam(l, i, j)[p] - Gam(k, j, l)[p] * Gam(l, i, k)[p];
        v[p] += q;
      }
      out.set_component(S(i, j), v);
    }
  return out;
}

GridField curvature_action(const GridField& metric, const GridField& h, const StencilConfig& cfg) {
  const GridSpec& g = metric.spec;
  int n = metric.n(), nc = metric.ncomp;
  auto S = [n](int i, int j) { return sym_index(std::min(i, j), std::max(i, j), n); };
  Christoffel C = christoffel(metric, cfg);
  auto Gam = [&](int k, int i, int j) -> const std::vector<double>& { return C.gam[k * nc + S(i, j)]; };
  GridField out(g, 2);
  Eigen::MatrixXd G(n, n);
  // R^a_{bcd} = d_c Gam^a_db - d_d Gam^a_cb + Gam^a_ce Gam^e_db - Gam^a_de Gam^e_cb ; R_{abcd} = g_af R^f_bcd
  for (int f = 0; f < n; ++f)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          std::vector<double> R = fd_derivative(g, Gam(f, d, b), c, cfg);
          axpy(R, -1.0, fd_derivative(g, Gam(f, c, b), d, cfg));
          for (long p = 0; p < g.points(); ++p)
            for (int e = 0; e < n; ++e) R[p] += Gam(f, c, e)[p] * Gam(e, d, b)[p] - Gam(f, d, e)[p] * Gam(e, c, b)[p];
          // (R h)_{ij} = R_{ikjl} h_{kl} with (i,k,j,l) = (a,b,c,d), lowering f -> a
          for (int a = 0; a < n; ++a)
            for (long p = 0; p < g.points(); ++p) {
              double gaf = metric.at(p, S(a, f));
              if (gaf == 0.0 || R[p] == 0.0) continue;
              if (a <= c) out.at(p, S(a, c)) += gaf * R[p] * h.at(p, S(b, d));
            }
        }
  return out;
}

double interior_sup(const GridField& f, int band) {
  const GridSpec& g = f.spec;
  long Nx = g.tangential_points();
  int n = f.n();
  std::vector<double> w(f.ncomp, 1.0);
  if (f.rank == 2)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) w[sym_index(i, j, n)] = 2.0;
  int lo = g.periodic_r ? 0 : band, hi = g.periodic_r ? g.nr : g.nr - band;
  double m = 0;
  for (int ir = lo; ir < hi; ++ir)
    for (long t = 0; t < Nx; ++t) {
      double s = 0;
      for (int c = 0; c < f.ncomp; ++c) s += w[c] * f.at(ir * Nx + t, c) * f.at(ir * Nx + t, c);
      m = std::max(m, std::sqrt(s));
    }
  return m;
}

double l2_inner(const GridField& u, const GridField& v) {
  if (u.data.size() != v.data.size()) throw RankMismatch("inner product of fields with different shapes");
  int n = u.n();
  std::vector<double> w(u.ncomp, 1.0);
  if (u.rank == 2)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) w[sym_index(i, j, n)] = 2.0;
  double cell = u.spec.dr();
  for (int i = 0; i < u.spec.dim(); ++i) cell *= u.spec.dx(i);
  double s = 0;
  for (long p = 0; p < u.spec.points(); ++p)
    for (int c = 0; c < u.ncomp; ++c) s += w[c] * u.at(p, c) * v.at(p, c);
  return s * cell;
}

RemainderScan quadratic_remainder_scan(const ModeExpansion& h, const std::vector<double>& eps, const GridSpec& g,
                                       const StencilConfig& cfg) {
  RemainderScan out;
  out.epsilon = eps;
  GridField hs = sample(h, g);
  ModeExpansion lin = ops::linearized_ricci(h);
  lin *= 0.5;
  GridField Ls = sample(lin, g);
  GridField g0 = flat_metric(g);
  for (double e : eps) {
    GridField m = hs;
    m *= e;
    m += g0;
    GridField R = nonlinear_ricci(m, cfg);
    GridField L = Ls;
    L *= e;
    out.remainder.push_back(interior_sup(R - L));
  }
  bool zero = true;
  for (double r : out.remainder) zero = zero && r == 0.0;
  out.identically_zero = zero;
  if (!zero && eps.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int k = eps.size();
    for (int i = 0; i < k; ++i) {
      double x = std::log(eps[i]), y = std::log(out.remainder[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    out.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  }
  return out;
}

}  // namespace ricyl
