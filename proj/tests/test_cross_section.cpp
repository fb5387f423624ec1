#include <cmath>

#include "doctest.h"
#include "ricyl/cross_section.hpp"
#include "ricyl/errors.hpp"

using namespace ricyl;

TEST_CASE("scalar spectrum on the unit 3-torus") {
  TorusCrossSection cs(3, {1, 1, 1}, 1);
  auto sp = build_spectrum(cs, ModeKind::Scalar);
  CHECK(sp.modes.size() == 27);
  CHECK(sp.mu1 == doctest::Approx(4 * M_PI * M_PI));
  CHECK(sp.modes.front().mu == 0.0);
  for (size_t i = 1; i < sp.modes.size(); ++i) CHECK(sp.modes[i].mu >= sp.modes[i - 1].mu);
}

TEST_CASE("scalar eigenvalues on a circle of length 2 pi") {
  TorusCrossSection cs(1, {2 * M_PI}, 2);
  auto sp = build_spectrum(cs, ModeKind::Scalar);
  std::vector<double> mu;
  for (auto& m : sp.modes) mu.push_back(m.mu);
  REQUIRE(mu.size() == 5);
  std::vector<double> expect{0, 1, 1, 4, 4};
  for (int i = 0; i < 5; ++i) CHECK(mu[i] == doctest::Approx(expect[i]));
}

TEST_CASE("harmonic 1-forms") {
  TorusCrossSection cs(3, {1, 2, 3}, 2);
  auto sp = build_spectrum(cs, ModeKind::HarmonicOneForm);
  CHECK(sp.modes.size() == 3);
  for (auto& m : sp.modes) CHECK(m.mu == 0.0);
}

TEST_CASE("mode counts") {
  TorusCrossSection cs(3, {1, 1.3, 0.7}, 1);
  // k != 0 canonical: 13; coclosed: 2 per k per phase
  CHECK(build_spectrum(cs, ModeKind::CoclosedOneForm).modes.size() == 13 * 2 * 2);
  // TT: 2 per k != 0 per phase, plus 5 parallel
  CHECK(build_spectrum(cs, ModeKind::TTTensor).modes.size() == 13 * 2 * 2 + 5);
  TorusCrossSection cs2(2, {1, 1}, 1);
  CHECK(build_spectrum(cs2, ModeKind::TTTensor).modes.size() == 2);
}

TEST_CASE("evaluate_mode") {
  TorusCrossSection cs(3, {1, 1, 1}, 1);
  Mode m{ModeKind::Scalar, {0, 0, 0}, 0.0, {}, Phase::Cos};
  CHECK(evaluate_mode(cs, m, {0.3, 0.1, 0.9})[0] == doctest::Approx(1.0));
  Mode c{ModeKind::Scalar, {1, 0, 0}, 4 * M_PI * M_PI, {}, Phase::Cos};
  CHECK(evaluate_mode(cs, c, {0, 0, 0})[0] == doctest::Approx(std::sqrt(2.0)));
  auto tt = build_spectrum(cs, ModeKind::TTTensor);
  for (auto& t : tt.modes)
    if (t.mu == 0.0) {
      auto v1 = evaluate_mode(cs, t, {0.1, 0.2, 0.3});
      auto v2 = evaluate_mode(cs, t, {0.7, 0.5, 0.9});
      for (size_t i = 0; i < v1.size(); ++i) CHECK(v1[i] == doctest::Approx(v2[i]));
    }
}

TEST_CASE("invariants: TT, coclosed, orthonormality") {
  TorusCrossSection cs(3, {1, 1.5, 2}, 1);
  for (auto kind : {ModeKind::CoclosedOneForm, ModeKind::TTTensor, ModeKind::Scalar}) {
    auto sp = build_spectrum(cs, kind);
    for (auto& m : sp.modes) {
      auto im = pointwise_operators(cs, m);
      CHECK(im.laplacian_eigenvalue == doctest::Approx(cs.eigenvalue(m.k)));
      for (double v : im.divergence_image) CHECK(v == 0.0);
      CHECK(im.trace_image == 0.0);
    }
    for (size_t i = 0; i < sp.modes.size(); i += 3)
      for (size_t j = i; j < sp.modes.size(); j += 5) {
        double ip = l2_inner_product_quadrature(cs, sp.modes[i], sp.modes[j], 6);
        CHECK(ip == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
      }
  }
}

TEST_CASE("spectral gap equals brute force") {
  TorusCrossSection cs(3, {1, 1.7, 0.8}, 3);
  double m = 1e300;
  for (auto& k : cs.canonical_frequencies(false)) m = std::min(m, cs.eigenvalue(k));
  CHECK(spectral_gap(cs) == doctest::Approx(m));
}

TEST_CASE("rejects bad cross sections") {
  CHECK_THROWS_AS(TorusCrossSection(2, {1, -1}, 1), InvalidArgument);
  CHECK_THROWS_AS(TorusCrossSection(2, {1, 1}, 0), InvalidArgument);
}
