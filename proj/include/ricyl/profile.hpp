#pragma once

#include <limits>
#include <vector>

namespace ricyl {

constexpr double kInf = std::numeric_limits<double>::infinity();

// c * r^p * e^{rate r}, active on lo <= r < hi.
struct Term {
  double c = 0.0;
  int p = 0;
  double rate = 0.0;
  double lo = -kInf;
  double hi = kInf;

  bool active(double r) const { return r >= lo && r < hi; }
};

class RadialProfile {
 public:
  RadialProfile() = default;
  explicit RadialProfile(std::vector<Term> terms);

  static RadialProfile constant(double c);
  static RadialProfile monomial(double c, int p, double rate);
  static RadialProfile exponential(double c, double rate) { return monomial(c, 0, rate); }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  double operator()(double r) const { return eval(r); }
  double eval(double r) const;
  // Sum of c r^p e^{(rate+rho) r}; avoids overflow when the weight cancels the decay.
  double eval_weighted(double r, double rho) const;
  double derivative_at(double r, int order) const;

  RadialProfile derivative() const;
  RadialProfile restricted(double lo, double hi) const;
  RadialProfile shifted_rate(double dlambda) const;  // multiply by e^{dlambda r}
  RadialProfile times_power(int q) const;            // multiply by r^q

  // \int_0^r
  RadialProfile running_integral() const;
  // \int_r^\infty ; throws DivergentConvolution if a term does not decay.
  RadialProfile tail_integral() const;
  double integrate(double a, double b) const;

  // Largest rate among terms that are active on [r0, inf).
  double max_tail_rate(double r0 = 0.0) const;
  double sup_abs(double a, double b, int samples = 801) const;

  RadialProfile& operator+=(const RadialProfile& o);
  RadialProfile& operator-=(const RadialProfile& o);
  RadialProfile& operator*=(double s);

  friend RadialProfile operator+(RadialProfile a, const RadialProfile& b) { return a += b; }
  friend RadialProfile operator-(RadialProfile a, const RadialProfile& b) { return a -= b; }
  friend RadialProfile operator*(RadialProfile a, double s) { return a *= s; }
  friend RadialProfile operator*(double s, RadialProfile a) { return a *= s; }
  friend RadialProfile operator-(RadialProfile a) { return a *= -1.0; }
  friend RadialProfile operator*(const RadialProfile& a, const RadialProfile& b);

 private:
  void normalize();
  std::vector<Term> terms_;
};

// Antiderivative of s^p e^{rate s} evaluated at s (finite s only).
double antiderivative(int p, double rate, double s);
// Terms of the antiderivative of c s^p e^{rate s}, with the given window.
std::vector<Term> antiderivative_terms(const Term& t);

}  // namespace ricyl
