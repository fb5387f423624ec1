#include "ricyl/mode_ode.hpp"

#include <cmath>

#include "ricyl/errors.hpp"

namespace ricyl {

namespace {

void check_mu(double mu) {
  if (!(mu >= 0.0)) throw InvalidArgument("negative eigenvalue: oscillatory branch is not supported");
}

}  // namespace

Eigen::MatrixXd system_matrix(OdeSystem sys, double mu) {
  check_mu(mu);
  if (sys == OdeSystem::Scalar2x2) {
    Eigen::MatrixXd A(2, 2);
    A << 0, 1, mu, 0;
    return A;
  }
  Eigen::MatrixXd A(4, 4);
  A << 0, 1, 0, 0,
       2 * mu, 0, 0, -1,
       0, 0, 0, 1,
       0, mu / 2, mu / 2, 0;
  return A;
}

Eigen::Matrix4d mixed_V(double mu) {
  double q = std::sqrt(mu);
  Eigen::Matrix4d V;
  V << 1, 0, -1, 0,
       q, 1, q, -1,
       q, -3, q, 3,
       mu, -2 * q, -mu, -2 * q;
  return V;
}

Eigen::Matrix4d mixed_V_inverse(double mu) {
  double q = std::sqrt(mu);
  Eigen::Matrix4d W;
  W << 0.5, 3 / (8 * q), 1 / (8 * q), 0,
       q / 4, 1.0 / 8, -1.0 / 8, -1 / (4 * q),
       -0.5, 3 / (8 * q), 1 / (8 * q), 0,
       q / 4, -1.0 / 8, 1.0 / 8, -1 / (4 * q);
  return W;
}

Eigen::Matrix4d mixed_V_inverse_printed(double mu) {
  Eigen::Matrix4d W = mixed_V_inverse(mu);
  W(1, 3) = -1 / (4 * mu);
  W(3, 3) = -1 / (4 * mu);
  return W;
}

Eigen::MatrixXd fundamental_matrix(OdeSystem sys, double mu, double r) {
  check_mu(mu);
  if (sys == OdeSystem::Scalar2x2) {
    Eigen::MatrixXd P(2, 2);
    if (mu == 0.0) {
      P << 1, r, 0, 1;
    } else {
      double q = std::sqrt(mu), e = std::exp(q * r), f = std::exp(-q * r);
      P << e, f, q * e, -q * f;
    }
    return P;
  }
  Eigen::MatrixXd P(4, 4);
  if (mu == 0.0) {
    P << 1, r, 0, -r * r / 2,
         0, 1, 0, -r,
         0, 0, 1, r,
         0, 0, 0, 1;
    return P;
  }
  double q = std::sqrt(mu), e = std::exp(q * r), f = std::exp(-q * r);
  Eigen::Matrix4d J;
  J << e, r * e, 0, 0,
       0, e, 0, 0,
       0, 0, f, r * f,
       0, 0, 0, f;
  return mixed_V(mu) * J;
}

Eigen::MatrixXd fundamental_matrix_inverse(OdeSystem sys, double mu, double r) {
  check_mu(mu);
  if (sys == OdeSystem::Scalar2x2) {
    Eigen::MatrixXd P(2, 2);
    if (mu == 0.0) {
      P << 1, -r, 0, 1;
    } else {
      double q = std::sqrt(mu), e = std::exp(q * r), f = std::exp(-q * r);
      P << f / 2, f / (2 * q), e / 2, -e / (2 * q);
    }
    return P;
  }
  Eigen::MatrixXd P(4, 4);
  if (mu == 0.0) {
    P << 1, -r, 0, -r * r / 2,
         0, 1, 0, r,
         0, 0, 1, -r,
         0, 0, 0, 1;
    return P;
  }
  double q = std::sqrt(mu), e = std::exp(q * r), f = std::exp(-q * r);
  Eigen::Matrix4d Ji;
  Ji << f, -r * f, 0, 0,
        0, f, 0, 0,
        0, 0, e, -r * e,
        0, 0, 0, e;
  return Ji * mixed_V_inverse(mu);
}

RadialProfile solve_scalar_mode(double mu, const RadialProfile& alpha) {
  check_mu(mu);
  if (alpha.is_zero()) return {};
  if (mu == 0.0) return alpha.running_integral().times_power(1) - alpha.times_power(1).running_integral();
  double q = std::sqrt(mu);
  if (alpha.max_tail_rate() >= q)
    throw DivergentConvolution("scalar mode source grows at least like e^{sqrt(mu) r}");
  // f = e^{qr} c1(r) + e^{-qr} c2(r)
  RadialProfile c1 = alpha.shifted_rate(-q).tail_integral() * (-1.0 / (2 * q));
  RadialProfile c2 = alpha.shifted_rate(q).running_integral() * (-1.0 / (2 * q));
  return c1.shifted_rate(q) + c2.shifted_rate(-q);
}

MixedSolution solve_mixed_mode(double mu, const RadialProfile& beta, const RadialProfile& gamma) {
  if (!(mu > 0.0)) throw InvalidArgument("solve_mixed_mode requires mu > 0");
  double q = std::sqrt(mu);
  if (beta.max_tail_rate() >= q || gamma.max_tail_rate() >= q)
    throw DivergentConvolution("mixed mode source grows at least like e^{sqrt(mu) r}");
  Eigen::Matrix4d W = mixed_V_inverse(mu);
  std::vector<RadialProfile> w(4);
  for (int i = 0; i < 4; ++i) w[i] = beta * W(i, 1) + gamma * W(i, 3);
  // J^{-1}(s) w
  RadialProfile g1 = (w[0] - w[1].times_power(1)).shifted_rate(-q);
  RadialProfile g2 = w[1].shifted_rate(-q);
  RadialProfile g3 = (w[2] - w[3].times_power(1)).shifted_rate(q);
  RadialProfile g4 = w[3].shifted_rate(q);
  RadialProfile c1 = -g1.tail_integral(), c2 = -g2.tail_integral();
  RadialProfile c3 = g3.running_integral(), c4 = g4.running_integral();
  // y = J(r) c
  std::vector<RadialProfile> y(4);
  y[0] = (c1 + c2.times_power(1)).shifted_rate(q);
  y[1] = c2.shifted_rate(q);
  y[2] = (c3 + c4.times_power(1)).shifted_rate(-q);
  y[3] = c4.shifted_rate(-q);
  Eigen::Matrix4d V = mixed_V(mu);
  MixedSolution out;
  for (int j = 0; j < 4; ++j) {
    out.k += y[j] * V(0, j);
    out.l += y[j] * V(2, j);
  }
  out.block = {c1, c2, c3, c4};
  return out;
}

int rank_of(const Eigen::MatrixXd& m, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  double smax = s.size() ? s(0) : 0.0;
  int rk = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, smax)) ++rk;
  return rk;
}

std::vector<CharacteristicRoot> check_characteristic(double mu, OdeSystem sys) {
  check_mu(mu);
  Eigen::MatrixXd A = system_matrix(sys, mu);
  int n = A.rows();
  std::vector<double> roots = mu == 0.0 ? std::vector<double>{0.0} : std::vector<double>{std::sqrt(mu), -std::sqrt(mu)};
  std::vector<CharacteristicRoot> out;
  for (double lam : roots) {
    Eigen::MatrixXd B = A - lam * Eigen::MatrixXd::Identity(n, n);
    int geom = n - rank_of(B);
    // algebraic multiplicity: dimension of ker (A - lam)^n
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    for (int i = 0; i < n; ++i) P = P * B;
    int alg = n - rank_of(P, 1e-9);
    out.push_back({lam, alg, geom});
  }
  return out;
}

double scalar_residual(double mu, const RadialProfile& f, const RadialProfile& alpha, double a, double b) {
  RadialProfile res = f.derivative().derivative() - f * mu - alpha;
  return res.sup_abs(a, b);
}

double mixed_residual(double mu, const RadialProfile& k, const RadialProfile& l, const RadialProfile& beta,
                      const RadialProfile& gamma, double a, double b) {
  RadialProfile kp = k.derivative(), lp = l.derivative();
  RadialProfile r1 = kp.derivative() - k * (2 * mu) + lp - beta;
  RadialProfile r2 = lp.derivative() - kp * (mu / 2) - l * (mu / 2) - gamma;
  return std::max(r1.sup_abs(a, b), r2.sup_abs(a, b));
}

Eigen::MatrixXd fundamental_matrix_derivative_fd(OdeSystem sys, double mu, double r, double h) {
  auto D = [&](double hh) {
    return ((fundamental_matrix(sys, mu, r + hh) - fundamental_matrix(sys, mu, r - hh)) / (2 * hh)).eval();
  };
  // two Richardson levels: O(h^6)
  Eigen::MatrixXd D1 = D(h), D2 = D(h / 2), D3 = D(h / 4);
  Eigen::MatrixXd R1 = (4 * D2 - D1) / 3, R2 = (4 * D3 - D2) / 3;
  return (16 * R2 - R1) / 15;
}

}  // namespace ricyl
