#include <doctest.h>

#include <cmath>
#include <random>

#include "spde/drift.hpp"
#include "support/oracles.hpp"

using namespace spde;
using namespace spde::galerkin;
using spectral::Boundary;
using spectral::ModeVector;
using spectral::Spectrum;

namespace {

Spectrum dirichlet_1d(int n) {
  double L = 1.0;
  return spectral::build_spectrum(1, Boundary::Dirichlet, std::span(&L, 1), n);
}

// quadrature of <F(state), e_k> with everything evaluated from basis calls
double mode_projection_oracle(const Spectrum& spec, const ModeVector& a,
                              const std::function<double(double)>& pointwise,
                              int k) {
  return oracle::fixed_simpson(
      [&](double x) {
        double u = 0.0;
        for (int j = 0; j < spec.cutoff; ++j)
          u += a[j] * spectral::basis_value(spec, j, std::span(&x, 1));
        return pointwise(u) * spectral::basis_value(spec, k, std::span(&x, 1));
      },
      0.0, 1.0, 8192);
}

}  // namespace

TEST_CASE("zero nonlinearity gives zero drift") {
  Spectrum s = dirichlet_1d(6);
  DriftSpec d = DriftSpec::none();
  ModeVector a = {1.0, -2.0, 0.5, 3.0, -1.5, 0.25};
  ModeVector b = drift_eval(d, s, a);
  for (double v : b) CHECK(v == 0.0);
}

TEST_CASE("burgers convection coefficient in closed form") {
  // u = a1 sqrt(2) sin(pi x): u u_x = a1^2 pi sin(2 pi x), so the only
  // nonzero coefficient is <u u_x, e_2> = a1^2 pi / sqrt(2).
  Spectrum s = dirichlet_1d(8);
  DriftSpec d;
  d.family = admissibility::Family::Burgers;
  d.alpha = 0.5;

  ModeVector a(8, 0.0);
  a[0] = 1.0;
  ModeVector b = drift_eval(d, s, a);
  const double golden = M_PI / std::sqrt(2.0);
  CHECK(b[1] == doctest::Approx(golden).epsilon(1e-12));
  for (int k = 0; k < 8; ++k)
    if (k != 1) CHECK(std::fabs(b[k]) < 1e-11);

  // independent quadrature oracle for the mode-product integral
  double ref = oracle::fixed_simpson(
      [&](double x) {
        double u = std::sqrt(2.0) * std::sin(M_PI * x);
        double ux = std::sqrt(2.0) * M_PI * std::cos(M_PI * x);
        return u * ux * std::sqrt(2.0) * std::sin(2.0 * M_PI * x);
      },
      0.0, 1.0, 4096);
  CHECK(b[1] == doctest::Approx(ref).epsilon(1e-10));

  // amplitude scaling is quadratic, sign flag flips the term
  a[0] = 2.0;
  CHECK(drift_eval(d, s, a)[1] == doctest::Approx(4.0 * golden).epsilon(1e-12));
  d.burgers_sign = -1.0;
  CHECK(drift_eval(d, s, a)[1] == doctest::Approx(-4.0 * golden).epsilon(1e-12));
}

TEST_CASE("cubic nemytskii coefficients") {
  // u = e_1: u^3 = 2 sqrt(2) sin^3 = (sqrt(2)/2)(3 sin(pi x) - sin(3 pi x)) * 2,
  // giving <u^3, e_1> = 3/2 and <u^3, e_3> = -1/2.
  Spectrum s = dirichlet_1d(8);
  DriftSpec d;
  d.family = admissibility::Family::HeatPolynomial;
  d.f = PointwiseF::polynomial({0.0, 0.0, 0.0, 1.0});

  ModeVector a(8, 0.0);
  a[0] = 1.0;
  ModeVector b = drift_eval(d, s, a, 8);
  CHECK(b[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(b[2] == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(std::fabs(b[1]) < 1e-12);

  // high-order quadrature oracle on a mixed state
  ModeVector mixed = {0.7, -0.4, 0.2, 0.0, 0.1, 0.0, 0.0, 0.0};
  ModeVector bm = drift_eval(d, s, mixed, 8);
  for (int k = 0; k < 8; ++k) {
    double ref = mode_projection_oracle(s, mixed,
                                        [](double r) { return r * r * r; }, k);
    CHECK(bm[k] == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("divergence drift carries the fractional weight") {
  Spectrum s = dirichlet_1d(6);
  ModeVector a = {0.5, -0.3, 0.2, 0.0, 0.1, -0.05};

  DriftSpec heat;
  heat.family = admissibility::Family::HeatPerturb;
  heat.f = PointwiseF::polynomial({0.0, 1.0, 0.4});

  DriftSpec divv = heat;
  divv.family = admissibility::Family::DivergenceSub;
  divv.beta = 0.3;

  ModeVector bh = drift_eval(heat, s, a);
  ModeVector bd = drift_eval(divv, s, a);
  for (int k = 0; k < 6; ++k)
    CHECK(bd[k] ==
          doctest::Approx(std::pow(s.eigenvalues[k], 0.3) * bh[k]).epsilon(1e-12));
}

TEST_CASE("non-divergence drift evaluates F at the fractional derivative") {
  Spectrum s = dirichlet_1d(6);
  DriftSpec d;
  d.family = admissibility::Family::NonDivergence;
  d.alpha = 0.25;
  d.f = PointwiseF::polynomial({0.0, 0.0, 1.0});  // F(r) = r^2

  ModeVector a = {1.0, 0.3, 0.0, 0.0, 0.0, 0.0};
  ModeVector b = drift_eval(d, s, a);

  ModeVector frac = spectral::frac_power_apply(s, 0.25, a);
  for (int k = 0; k < 6; ++k) {
    double ref = mode_projection_oracle(s, frac, [](double r) { return r * r; }, k);
    CHECK(b[k] == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("cahn-hilliard drift against quadrature oracle") {
  double L = 1.0;
  Spectrum s = spectral::build_spectrum(1, Boundary::NeumannZeroMean,
                                        std::span(&L, 1), 6, 2);
  DriftSpec d;
  d.family = admissibility::Family::CahnHilliard;
  d.alpha = 0.5;
  d.f = PointwiseF::double_well();  // F1(r) = r^3 - r

  ModeVector a = {0.2, -0.1, 0.05, 0.0, 0.0, 0.0};
  ModeVector b = drift_eval(d, s, a, 8);

  // B(u) = F1''(u) |u_x|^2 + F1'(u) u_xx, tested in physical space
  for (int k = 0; k < 6; ++k) {
    double ref = oracle::fixed_simpson(
        [&](double x) {
          double u = 0.0, ux = 0.0, uxx = 0.0;
          for (int j = 0; j < 6; ++j) {
            int m = s.indices[j][0];
            double w = M_PI * m / L;
            double c = std::sqrt(2.0 / L) * std::cos(w * x);
            double snv = std::sqrt(2.0 / L) * std::sin(w * x);
            u += a[j] * c;
            ux += a[j] * (-w * snv);
            uxx += a[j] * (-w * w * c);
          }
          double f1p = 3.0 * u * u - 1.0;
          double f1pp = 6.0 * u;
          double val = f1pp * ux * ux + f1p * uxx;
          int mk = s.indices[k][0];
          return val * std::sqrt(2.0 / L) * std::cos(M_PI * mk * x / L);
        },
        0.0, 1.0, 8192);
    CHECK(b[k] == doctest::Approx(ref).epsilon(5e-8));
  }
}

TEST_CASE("drift truncation") {
  Spectrum s = dirichlet_1d(6);
  DriftSpec d;
  d.family = admissibility::Family::HeatPolynomial;
  d.alpha = 0.25;
  d.f = PointwiseF::polynomial({0.0, 1.0, 0.0, 0.5});
  Collocation grid(s, 4);

  ModeVector small = {0.01, 0.005, 0.0, 0.0, 0.0, 0.0};
  double norm = spectral::sobolev_norm(s, d.alpha, small);
  REQUIRE(norm < 5.0);
  CHECK(truncate_drift(d, 5.0, s, small, grid) == drift_eval(d, s, small, grid));

  // scaled so the fractional norm is exactly 2N: the effective input then
  // has norm N
  ModeVector big = small;
  double target = 2.0 * 5.0;
  for (double& v : big) v *= target / norm;
  ModeVector expect_input = big;
  for (double& v : expect_input) v *= 0.5;
  CHECK(truncate_drift(d, 5.0, s, big, grid) == drift_eval(d, s, expect_input, grid));

  // scanned boundedness of the truncated operator
  std::mt19937 rng(11);
  std::normal_distribution<double> normal(0.0, 2.0);
  const double N = 1.5, beta = 0.0;
  double scanned_sup = 0.0;
  std::vector<double> observed;
  for (int trial = 0; trial < 1000; ++trial) {
    ModeVector v(6);
    for (double& c : v) c = normal(rng);
    if (trial % 3 == 0)
      for (double& c : v) c *= 100.0;  // far outside the ball
    ModeVector bv = truncate_drift(d, N, s, v, grid);
    double out_norm = spectral::sobolev_norm(s, -beta, bv);
    CHECK(std::isfinite(out_norm));
    observed.push_back(out_norm);
    // the effective input is inside the closed ball by construction
    ModeVector inner = v;
    double vn = spectral::sobolev_norm(s, d.alpha, v);
    if (vn > N)
      for (double& c : inner) c *= N / vn;
    CHECK(spectral::sobolev_norm(s, d.alpha, inner) <= N * (1.0 + 1e-12));
    scanned_sup = std::max(scanned_sup,
                           spectral::sobolev_norm(s, -beta, drift_eval(d, s, inner, grid)));
  }
  for (double v : observed) CHECK(v <= scanned_sup * (1.0 + 1e-12));

  CHECK_THROWS_AS(truncate_drift(d, 0.0, s, small, grid), std::invalid_argument);
}

TEST_CASE("clip bounds the pointwise nonlinearity") {
  PointwiseF f = PointwiseF::polynomial({0.0, 10.0});
  f.clip = 0.75;
  CHECK(f(1.0) == 0.75);
  CHECK(f(-1.0) == -0.75);
  CHECK(f(0.01) == doctest::Approx(0.1));

  PointwiseF sine;
  sine.sine_amp = 1.0;
  sine.sine_freq = 2.0;
  CHECK(sine(0.25 * M_PI) == doctest::Approx(1.0));
}
