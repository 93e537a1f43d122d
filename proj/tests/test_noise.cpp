#include <doctest.h>

#include <cmath>

#include "spde/noise.hpp"
#include "spde/spectral.hpp"
#include "support/oracles.hpp"

using namespace spde;
using spectral::Boundary;
using spectral::Spectrum;

namespace {

Spectrum box(int d, int n, int power = 1) {
  std::array<double, 3> L = {1.0, 1.0, 1.0};
  return spectral::build_spectrum(d, Boundary::Dirichlet,
                                  std::span(L.data(), d), n, power);
}

}  // namespace

TEST_CASE("q_t diagonal closed form") {
  Spectrum s = box(1, 16);
  noise::NoiseSpec white = noise::NoiseSpec::colored(0.0);

  auto at0 = noise::qt_diagonal(s, white, 0.0);
  for (double q : at0.q) CHECK(q == 0.0);

  double pi2 = M_PI * M_PI;
  auto at1 = noise::qt_diagonal(s, white, 1.0);
  CHECK(at1.q[0] ==
        doctest::Approx((1.0 - std::exp(-2.0 * pi2)) / (2.0 * pi2)).epsilon(1e-14));

  // defining integral, adaptive quadrature oracle
  noise::NoiseSpec colored = noise::NoiseSpec::colored(0.3);
  for (double t : {0.01, 0.1, 1.0}) {
    auto diag = noise::qt_diagonal(s, colored, t);
    for (int k = 0; k < s.cutoff; ++k) {
      double lam = s.eigenvalues[k];
      double g = std::pow(lam, -0.3);
      double ref = oracle::adaptive_simpson(
          [&](double u) { return g * g * std::exp(-2.0 * u * lam); }, 0.0, t,
          1e-15);
      CHECK(diag.q[k] == doctest::Approx(ref).epsilon(1e-10));
    }
  }
}

TEST_CASE("q_t monotone in t and mode-monotone at infinity") {
  Spectrum s = box(1, 12);
  noise::NoiseSpec colored = noise::NoiseSpec::colored(0.2);
  auto a = noise::qt_diagonal(s, colored, 0.05);
  auto b = noise::qt_diagonal(s, colored, 0.1);
  for (int k = 0; k < s.cutoff; ++k) CHECK(a.q[k] <= b.q[k]);

  auto qinf = noise::q_infinity_trace(s, colored);
  for (int k = 1; k < s.cutoff; ++k) {
    double prev = std::pow(s.eigenvalues[k - 1], -2.0 * 0.2 - 1.0) / 2.0;
    double cur = std::pow(s.eigenvalues[k], -2.0 * 0.2 - 1.0) / 2.0;
    CHECK(cur < prev);
  }
  CHECK(qinf.converges);
}

TEST_CASE("q_infinity trace-class dimension cases") {
  CHECK(noise::q_infinity_trace(box(3, 32), noise::NoiseSpec::colored(0.3)).converges);
  CHECK_FALSE(
      noise::q_infinity_trace(box(3, 32), noise::NoiseSpec::colored(0.2)).converges);
  CHECK(noise::q_infinity_trace(box(1, 32), noise::NoiseSpec::colored(0.0)).converges);
  // the tail bound is finite exactly in the convergent case
  auto tr = noise::q_infinity_trace(box(1, 32), noise::NoiseSpec::colored(0.0));
  CHECK(std::isfinite(tr.tail_bound));
  auto div = noise::q_infinity_trace(box(3, 32), noise::NoiseSpec::colored(0.2));
  CHECK(std::isinf(div.tail_bound));
}

TEST_CASE("time-regularity check") {
  CHECK(noise::check_cont_time(box(1, 24), noise::NoiseSpec::colored(0.0), 0.2, 1.0)
            .satisfied);
  CHECK(noise::check_cont_time(box(2, 24), noise::NoiseSpec::colored(0.3), 0.25, 1.0)
            .satisfied);
  CHECK_FALSE(
      noise::check_cont_time(box(2, 24), noise::NoiseSpec::colored(0.3), 0.35, 1.0)
          .satisfied);
  CHECK_THROWS_AS(
      noise::check_cont_time(box(1, 8), noise::NoiseSpec::colored(0.0), 0.6, 1.0),
      std::invalid_argument);
  CHECK_THROWS_AS(
      noise::check_cont_time(box(1, 8), noise::NoiseSpec::colored(0.0), -0.1, 1.0),
      std::invalid_argument);
}

TEST_CASE("time-regularity integral against quadrature oracle") {
  Spectrum s = box(1, 4);
  noise::NoiseSpec white = noise::NoiseSpec::colored(0.0);
  double xi = 0.2, T = 1.0;
  auto res = noise::check_cont_time(s, white, xi, T);
  // substitute u = t^{1-2xi} so the oracle integrand is smooth at 0
  double kappa = 1.0 / (1.0 - 2.0 * xi);
  double ref = 0.0;
  for (int k = 0; k < s.cutoff; ++k) {
    double lam = s.eigenvalues[k];
    ref += kappa * oracle::adaptive_simpson(
                       [&](double u) {
                         return std::exp(-2.0 * lam * std::pow(u, kappa));
                       },
                       0.0, std::pow(T, 1.0 / kappa), 1e-13);
  }
  CHECK(res.estimate == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("smoothing-norm series against direct summation") {
  Spectrum s = box(1, 10000);
  noise::NoiseSpec white = noise::NoiseSpec::colored(0.0);
  double t = 0.1;
  auto v = noise::l4_integrand(s, white, t, 0.55, 0.55);

  double sum4 = 0.0, sum2 = 0.0;
  for (int k = 0; k < s.cutoff; ++k) {
    double lam = s.eigenvalues[k];
    double e2 = 1.0 - std::exp(-2.0 * t * lam);
    sum4 += 4.0 * lam * lam * std::exp(-4.0 * t * lam) / (e2 * e2);
    sum2 += 2.0 * lam * std::exp(-4.0 * t * lam) / e2;
  }
  CHECK(v.l4_norm4_partial == doctest::Approx(sum4).epsilon(1e-10));
  CHECK(v.l2_norm2_partial == doctest::Approx(sum2).epsilon(1e-10));
}

TEST_CASE("smoothing-norm scaling and decay") {
  Spectrum s = box(1, 512);
  noise::NoiseSpec white = noise::NoiseSpec::colored(0.0);

  std::vector<double> ts, norms2;
  for (double t = 1e-4; t <= 1e-2 * (1 + 1e-9); t *= std::sqrt(10.0)) {
    ts.push_back(t);
    auto v = noise::l4_integrand(s, white, t, 0.55, 0.55);
    norms2.push_back(v.l4_norm() * v.l4_norm());
  }
  double slope = oracle::ls_loglog_slope(ts, norms2);
  // sharp exponent -(1 + d/4) in d = 1
  CHECK(slope > -(1.0 + 0.25) - 0.15);
  CHECK(slope < -1.0);

  double prev4 = 1e300, prev2 = 1e300;
  for (double t = 1.0; t <= 10.0; t += 1.0) {
    auto v = noise::l4_integrand(s, white, t, 0.55, 0.55);
    CHECK(v.l4_norm() < prev4);
    CHECK(v.l2_norm() < prev2);
    prev4 = v.l4_norm();
    prev2 = v.l2_norm();
  }
}

TEST_CASE("interpolated integrability check") {
  Spectrum s1 = box(1, 48);
  CHECK(noise::check_L4(s1, noise::NoiseSpec::colored(0.0), 1.0, 0.6).satisfied);
  CHECK_FALSE(noise::check_L4(s1, noise::NoiseSpec::colored(0.0), 1.0, 0.4).satisfied);
  // Hilbert-Schmidt case: every theta in (2 delta/(2 delta + 1), 1) works
  CHECK(noise::check_L4(s1, noise::NoiseSpec::colored(0.3), 1.0, 0.5).satisfied);

  CHECK_THROWS_AS(noise::check_L4(s1, noise::NoiseSpec::colored(0.0), 0.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(noise::check_L4(s1, noise::NoiseSpec::colored(0.0), 1.0, 1.0),
                  std::invalid_argument);

  auto ok = noise::check_L4(s1, noise::NoiseSpec::colored(0.0), 1.0, 0.6);
  CHECK(std::isfinite(ok.estimate));
  CHECK(ok.estimate > 0.0);
}

TEST_CASE("smoothing constant by maximization") {
  Spectrum s = box(1, 1000);
  noise::NoiseSpec white = noise::NoiseSpec::colored(0.0);

  auto c0 = noise::smoothing_constant(s, white, 0.0);
  // dense scan oracle over the same bracket
  double best = 0.0;
  for (int i = 0; i <= 2000000; ++i) {
    double r = std::exp(std::log(1e-6) +
                        (std::log(50.0) - std::log(1e-6)) * i / 2000000.0);
    double v = std::pow(r, 0.5) * std::exp(-r) / std::sqrt(1.0 - std::exp(-2.0 * r));
    best = std::max(best, v);
  }
  CHECK(c0.value == doctest::Approx(std::sqrt(2.0) * best).epsilon(1e-8));
  CHECK(c0.bound_certified);

  // direct mode scan at t = 0.01
  double t = 0.01;
  double sup = 0.0;
  for (int k = 0; k < s.cutoff; ++k) {
    double lam = s.eigenvalues[k];
    sup = std::max(sup, std::sqrt(2.0) * std::sqrt(lam) * std::exp(-t * lam) /
                            std::sqrt(1.0 - std::exp(-2.0 * t * lam)));
  }
  CHECK(sup <= c0.value / std::sqrt(t) * (1.0 + 1e-12));

  // repeated maximization against the scan oracle for each weight; the sharp
  // constant is not monotone in gamma (the gamma = 0 supremum sits at the
  // r -> 0 boundary and the interior maximum first dips below it)
  for (double gamma : {0.0, 0.1, 0.25}) {
    auto c = noise::smoothing_constant(s, white, gamma);
    double scan = 0.0;
    for (int i = 0; i <= 400000; ++i) {
      double r = std::exp(std::log(1e-6) +
                          (std::log(50.0) - std::log(1e-6)) * i / 400000.0);
      double v = std::pow(r, 0.5 + gamma) * std::exp(-r) /
                 std::sqrt(1.0 - std::exp(-2.0 * r));
      scan = std::max(scan, v);
    }
    CHECK(c.value == doctest::Approx(std::sqrt(2.0) * scan).epsilon(1e-7));
    CHECK(c.bound_certified);
  }
}

TEST_CASE("hilbert-schmidt shift criterion") {
  CHECK(noise::check_hs(box(1, 8), noise::NoiseSpec::colored(0.3), 0.0));
  CHECK_FALSE(noise::check_hs(box(2, 8), noise::NoiseSpec::colored(0.49), 0.0));
  CHECK(noise::check_hs(box(1, 8), noise::NoiseSpec::colored(0.4), 0.1));
  CHECK_FALSE(noise::check_hs(box(1, 8), noise::NoiseSpec::colored(0.35), 0.1));
  CHECK_THROWS_AS(noise::check_hs(box(1, 8), noise::NoiseSpec::colored(0.3), -0.1),
                  std::invalid_argument);
}

TEST_CASE("criterion booleans match the analytic inequalities") {
  // small sweep; the acceptance suite runs the full grid
  for (int d = 1; d <= 3; ++d) {
    Spectrum s = box(d, 32);
    for (double delta : {0.0, 0.1, 0.3, 0.45}) {
      noise::NoiseSpec g = noise::NoiseSpec::colored(delta);
      CHECK(noise::q_infinity_trace(s, g).converges ==
            (2.0 * (1.0 + 2.0 * delta) / d > 1.0));
      for (double xi : {0.05, 0.2, 0.35, 0.49}) {
        bool expect = xi < delta + 0.5 - d / 4.0 && xi < 0.5 && xi > 0.0;
        CHECK(noise::check_cont_time(s, g, xi, 1.0).satisfied == expect);
      }
      for (double theta : {0.2, 0.5, 0.8}) {
        bool expect = theta > d / (2.0 * (1.0 + 2.0 * delta));
        CHECK(noise::check_L4(s, g, 1.0, theta).satisfied == expect);
      }
    }
  }
}

TEST_CASE("rough-noise reindexing identity") {
  Spectrum s = box(1, 128);
  for (double gamma : {0.05, 0.1}) {
    for (double t : {0.05, 0.5}) {
      auto r = noise::rough_reindex(s, gamma, t);
      CHECK(std::fabs(r.direct_l4 - r.shifted_l4) <= 1e-12 * std::fabs(r.direct_l4));
      CHECK(std::fabs(r.direct_l2 - r.shifted_l2) <= 1e-12 * std::fabs(r.direct_l2));
    }
  }
}

TEST_CASE("rough spec behaves like negative coloring in the series") {
  Spectrum s = box(1, 16);
  noise::NoiseSpec rough = noise::NoiseSpec::rough(0.1);
  CHECK(rough.effective_delta() == doctest::Approx(-0.1));
  CHECK(rough.gain(4.0) == doctest::Approx(std::pow(4.0, 0.1)));
  // q_k(inf) = lam^{2 gamma - 1} / 2
  auto tr = noise::q_infinity_trace(s, rough);
  double direct = 0.0;
  for (double lam : s.eigenvalues) direct += std::pow(lam, 2.0 * 0.1 - 1.0) / 2.0;
  CHECK(tr.partial_sum == doctest::Approx(direct).epsilon(1e-12));
}
