#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spde/rational.hpp"

namespace spde::admissibility {

enum class Family {
  HeatPerturb,
  HeatPolynomial,
  DivergenceSub,
  DivergenceSuper,
  NonDivergence,
  Burgers,
  CahnHilliard,
};

std::string to_string(Family f);
std::optional<Family> family_from_string(const std::string& name);

// Interval over exact rationals with independent open/closed endpoints.
struct Interval {
  Rational lo, hi;
  bool lo_open = false;
  bool hi_open = true;

  bool empty() const;
  bool contains(const Rational& x) const;
  Rational midpoint() const { return (lo + hi) / Rational(2); }
  std::string str() const;

  static Interval closed_open(Rational lo, Rational hi) { return {lo, hi, false, true}; }
  static Interval open(Rational lo, Rational hi) { return {lo, hi, true, true}; }
  static Interval closed(Rational lo, Rational hi) { return {lo, hi, false, false}; }
  static Interval intersect(const Interval& a, const Interval& b);
};

struct ScenarioParams {
  Family family = Family::HeatPerturb;
  int d = 1;
  Rational p = Rational(2);          // polynomial growth (HeatPolynomial)
  Rational alpha = Rational(0);
  Rational beta = Rational(0);
  Rational delta = Rational(0);
  std::optional<Rational> gamma;     // DivergenceSuper only
  bool drift_bounded = false;
};

enum class Route { Thm25, Thm26, Thm26Limiting, Cor27, Rejected };

std::string to_string(Route r);

struct Constraint {
  std::string name;       // named inequality
  std::string detail;     // evaluated sides, human-readable
  bool holds = false;
};

struct Verdict {
  bool admissible = false;
  Route route = Route::Rejected;
  std::vector<Constraint> constraints;
  std::string initial_space;               // V_{2s} label
  std::optional<Interval> delta_window;
  std::optional<Interval> gamma_window;
  std::optional<Rational> max_hs_shift;    // best delta' in the limiting case

  // first failed constraint, empty when admissible
  std::string binding() const;
};

// Operator power of A for a family (2 only for Cahn-Hilliard, where the
// leading operator is the square of the Neumann Laplacian).
int operator_power(Family f);

// Route an equation family through the uniqueness theorems at the given
// parameters. Family tables follow the per-example conclusions; the generic
// exponent calculus supplies the xi/theta windows.
Verdict classify(const ScenarioParams& params);

struct PolyParams {
  Rational r_opt;
  Rational alpha_opt;
  Rational beta_opt;
  Interval delta_window;
  bool feasible = false;
};

// r_opt = max{2, p-1, d(p-2)}, alpha_opt = (d/2)(1/2 - 1/r_opt); infeasible
// when d(p-2) > 2(p-1) or (d = 3 and p >= 4).
PolyParams heat_polynomial_params(int d, const Rational& p);

// gamma in [0, beta] intersected with (beta - 1/2, xi - alpha).
Interval supercritical_gamma_range(const Rational& alpha, const Rational& beta,
                                   const Rational& xi);

Interval cahn_hilliard_delta_range(int d);

// Admissible delta window of the non-divergence family at a given alpha.
Interval nondivergence_delta_window(int d, bool bounded, const Rational& alpha);

struct AlphaDeltaRule {
  Interval alpha;
  std::string delta_desc;  // window as a function of alpha
};

std::vector<AlphaDeltaRule> nondivergence_ranges(int d, bool bounded);

// Exact-rational exponent bounds shared with the numeric module:
// xi_sup = delta + 1/2 - d/(4p), capped at 1/2 when used as a window edge.
Rational xi_sup_exact(int d, int power, const Rational& delta);
Rational hs_threshold_exact(int d, int power);  // d/(4p)

}  // namespace spde::admissibility
