#include <doctest.h>

#include "spde/admissibility.hpp"

using namespace spde;
using namespace spde::admissibility;

namespace {

ScenarioParams make(Family f, int d) {
  ScenarioParams p;
  p.family = f;
  p.d = d;
  return p;
}

Rational frac(std::int64_t n, std::int64_t d) { return Rational(n, d); }

}  // namespace

TEST_CASE("burgers limiting route") {
  ScenarioParams p = make(Family::Burgers, 1);
  p.alpha = frac(1, 2);
  p.delta = frac(3, 10);
  Verdict v = classify(p);
  CHECK(v.admissible);
  CHECK(v.route == Route::Thm26Limiting);
  CHECK(v.initial_space == "V_1 (H^1_0)");
  REQUIRE(v.max_hs_shift.has_value());
  CHECK(*v.max_hs_shift == frac(1, 20));

  p.delta = frac(1, 4);  // open endpoint excluded
  CHECK_FALSE(classify(p).admissible);
  p.delta = frac(49, 100);
  CHECK(classify(p).admissible);
  p.delta = frac(1, 2);
  CHECK_FALSE(classify(p).admissible);
}

TEST_CASE("heat perturbation windows by dimension") {
  ScenarioParams p = make(Family::HeatPerturb, 3);
  p.delta = frac(3, 10);
  Verdict v = classify(p);
  CHECK(v.admissible);
  REQUIRE(v.delta_window.has_value());
  CHECK(v.delta_window->str() == "(1/4, 1/2)");

  p.delta = frac(1, 4);
  CHECK_FALSE(classify(p).admissible);
  CHECK(classify(p).binding() == "delta-window");

  p.d = 1;
  p.delta = frac(0, 1);
  CHECK(classify(p).admissible);  // closed left endpoint in d = 1
  p.d = 2;
  CHECK_FALSE(classify(p).admissible);
  p.delta = frac(1, 100);
  CHECK(classify(p).admissible);

  // bounded vs linearly-bounded drift routes
  p.d = 1;
  p.delta = frac(1, 10);
  p.drift_bounded = true;
  CHECK(classify(p).route == Route::Thm25);
  p.drift_bounded = false;
  CHECK(classify(p).route == Route::Thm26);
}

TEST_CASE("divergence sub-critical windows") {
  ScenarioParams p = make(Family::DivergenceSub, 3);
  p.beta = frac(3, 10);
  p.delta = frac(3, 10);
  Verdict v = classify(p);
  CHECK_FALSE(v.admissible);
  CHECK(v.binding() == "beta-window");  // beta must stay below 1/4 in d = 3

  p.beta = frac(1, 5);
  p.delta = frac(28, 100);
  v = classify(p);
  CHECK(v.admissible);
  CHECK(v.delta_window->str() == "(1/4, 3/10)");

  p.d = 1;
  p.beta = frac(3, 10);
  p.delta = frac(0, 1);
  CHECK(classify(p).admissible);  // delta in [0, 1/5)
  p.delta = frac(1, 5);
  CHECK_FALSE(classify(p).admissible);
}

TEST_CASE("heat polynomial parameters") {
  auto p12 = heat_polynomial_params(1, Rational(2));
  CHECK(p12.feasible);
  CHECK(p12.r_opt == Rational(2));
  CHECK(p12.alpha_opt == Rational(0));

  auto p34 = heat_polynomial_params(3, Rational(4));
  CHECK_FALSE(p34.feasible);

  auto p23 = heat_polynomial_params(2, Rational(3));
  CHECK(p23.r_opt == Rational(2));
  CHECK(p23.alpha_opt == Rational(0));
  CHECK(p23.delta_window.str() == "(0, 1/2)");

  // formula-substitution oracle on rationals: r = max{2, p-1, d(p-2)},
  // alpha = (d/2)(1/2 - 1/r)
  for (int d = 1; d <= 3; ++d) {
    for (std::int64_t num = 2; num <= 7; ++num) {
      Rational p = frac(num, 2);  // p in {1, 3/2, ..., 7/2}
      if (p < Rational(2)) continue;
      auto out = heat_polynomial_params(d, p);
      Rational r = Rational(2);
      if (p - Rational(1) > r) r = p - Rational(1);
      if (Rational(d) * (p - Rational(2)) > r) r = Rational(d) * (p - Rational(2));
      CHECK(out.r_opt == r);
      CHECK(out.alpha_opt == Rational(d, 2) * (frac(1, 2) - Rational(1) / r));
    }
  }

  CHECK_THROWS_AS(heat_polynomial_params(1, frac(3, 2)), std::invalid_argument);

  ScenarioParams hp = make(Family::HeatPolynomial, 3);
  hp.p = Rational(4);
  CHECK_FALSE(classify(hp).admissible);
  hp.p = Rational(3);
  hp.delta = frac(2, 5);
  CHECK(classify(hp).admissible);
}

TEST_CASE("supercritical gamma window") {
  Interval w = supercritical_gamma_range(frac(0, 1), frac(3, 5), frac(6, 25));
  CHECK(w.str() == "(1/10, 6/25)");
  CHECK(w.contains(frac(1, 5)));
  CHECK_FALSE(w.contains(frac(1, 10)));

  Interval degenerate = supercritical_gamma_range(frac(0, 1), frac(0, 1), frac(1, 5));
  CHECK_FALSE(degenerate.empty());
  CHECK(degenerate.contains(Rational(0)));
  CHECK_FALSE(degenerate.contains(frac(1, 100)));

  // interval-arithmetic oracle: lo = max(0, beta-1/2) and the window empties
  // once beta - 1/2 >= min(beta, xi - alpha)
  Interval empty = supercritical_gamma_range(frac(1, 5), frac(4, 5), frac(6, 25));
  CHECK(empty.empty());

  CHECK_THROWS_AS(supercritical_gamma_range(frac(1, 4), frac(1, 2), frac(1, 5)),
                  std::invalid_argument);
}

TEST_CASE("divergence supercritical route") {
  ScenarioParams p = make(Family::DivergenceSuper, 1);
  p.beta = frac(3, 5);
  p.drift_bounded = true;
  p.gamma = frac(1, 5);
  Verdict v = classify(p);
  CHECK(v.admissible);
  CHECK(v.route == Route::Cor27);
  REQUIRE(v.gamma_window.has_value());
  CHECK(v.gamma_window->str() == "(1/10, 1/4)");

  p.gamma = frac(1, 20);
  CHECK_FALSE(classify(p).admissible);

  // needs bounded F
  p.drift_bounded = false;
  CHECK_THROWS_AS(classify(p), std::invalid_argument);
}

TEST_CASE("cahn-hilliard window") {
  CHECK(cahn_hilliard_delta_range(1).str() == "(1/8, 1/2)");
  CHECK(cahn_hilliard_delta_range(3).str() == "(3/8, 1/2)");
  CHECK_THROWS_AS(cahn_hilliard_delta_range(4), std::invalid_argument);

  ScenarioParams p = make(Family::CahnHilliard, 3);
  p.alpha = frac(1, 2);
  p.delta = frac(2, 5);
  Verdict v = classify(p);
  CHECK(v.admissible);
  CHECK(v.route == Route::Thm26Limiting);
  REQUIRE(v.max_hs_shift.has_value());
  CHECK(*v.max_hs_shift == frac(2, 5) - frac(3, 8));
}

TEST_CASE("non-divergence table") {
  auto bounded = nondivergence_ranges(3, true);
  REQUIRE(bounded.size() == 1);
  CHECK(bounded[0].alpha.str() == "(0, 1)");
  CHECK(bounded[0].delta_desc == "delta in [0, 1/2)");

  CHECK(nondivergence_delta_window(2, false, frac(3, 10)).str() == "(3/10, 1/2)");
  CHECK(nondivergence_delta_window(3, false, frac(1, 10)).str() == "(7/20, 1/2)");
  CHECK(nondivergence_delta_window(1, false, frac(1, 2)).str() == "(1/4, 1/2)");

  ScenarioParams p = make(Family::NonDivergence, 3);
  p.alpha = frac(3, 10);
  p.delta = frac(2, 5);
  CHECK_FALSE(classify(p).admissible);  // alpha must stay below 1/4 in d = 3

  p.d = 2;
  CHECK(classify(p).admissible);  // delta in (3/10, 1/2)

  p.d = 1;
  p.alpha = frac(1, 2);
  p.delta = frac(1, 10);
  Verdict v = classify(p);
  CHECK_FALSE(v.admissible);  // limiting case needs delta > 1/4
  p.delta = frac(3, 10);
  v = classify(p);
  CHECK(v.admissible);
  CHECK(v.route == Route::Thm26Limiting);

  p.drift_bounded = true;
  p.alpha = frac(7, 10);
  p.d = 3;
  p.delta = frac(3, 10);
  v = classify(p);
  CHECK(v.admissible);
  CHECK(v.route == Route::Thm25);
}

TEST_CASE("classify rejects inconsistent combinations") {
  ScenarioParams p = make(Family::HeatPerturb, 1);
  p.gamma = frac(1, 10);
  CHECK_THROWS_AS(classify(p), std::invalid_argument);

  ScenarioParams q = make(Family::Burgers, 2);
  q.alpha = frac(1, 2);
  CHECK_THROWS_AS(classify(q), std::invalid_argument);

  ScenarioParams r = make(Family::HeatPerturb, 1);
  r.alpha = frac(1, 10);
  CHECK_THROWS_AS(classify(r), std::invalid_argument);

  ScenarioParams s = make(Family::HeatPerturb, 5);
  CHECK_THROWS_AS(classify(s), std::invalid_argument);
}

TEST_CASE("exact rational boundaries never round") {
  // 0.3 stays 3/10; the window test at 1/4 + 1/20 is decided exactly
  Rational x = Rational::parse("0.3");
  CHECK(x == frac(3, 10));
  Rational tiny = Rational::parse("1/3") - frac(1, 3);
  CHECK(tiny == Rational(0));
  Interval w = Interval::open(frac(1, 4), frac(1, 2));
  CHECK_FALSE(w.contains(frac(1, 4)));
  CHECK(w.contains(frac(1, 4) + frac(1, 1000000000)));
}
