#include "spde/admissibility.hpp"

#include <algorithm>
#include <stdexcept>

namespace spde::admissibility {

namespace {

const Rational kHalf(1, 2);
const Rational kQuarter(1, 4);
const Rational kZero(0);
const Rational kOne(1);

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::HeatPerturb: return "heat_perturb";
    case Family::HeatPolynomial: return "heat_polynomial";
    case Family::DivergenceSub: return "divergence_sub";
    case Family::DivergenceSuper: return "divergence_super";
    case Family::NonDivergence: return "non_divergence";
    case Family::Burgers: return "burgers";
    case Family::CahnHilliard: return "cahn_hilliard";
  }
  return "?";
}

std::optional<Family> family_from_string(const std::string& name) {
  for (Family f : {Family::HeatPerturb, Family::HeatPolynomial,
                   Family::DivergenceSub, Family::DivergenceSuper,
                   Family::NonDivergence, Family::Burgers, Family::CahnHilliard})
    if (to_string(f) == name) return f;
  return std::nullopt;
}

std::string to_string(Route r) {
  switch (r) {
    case Route::Thm25: return "bounded-drift";
    case Route::Thm26: return "unbounded-drift";
    case Route::Thm26Limiting: return "unbounded-drift-limiting";
    case Route::Cor27: return "rough-noise";
    case Route::Rejected: return "rejected";
  }
  return "?";
}

bool Interval::empty() const {
  if (lo > hi) return true;
  if (lo == hi) return lo_open || hi_open;
  return false;
}

bool Interval::contains(const Rational& x) const {
  if (x < lo || (x == lo && lo_open)) return false;
  if (x > hi || (x == hi && hi_open)) return false;
  return true;
}

std::string Interval::str() const {
  if (empty()) return "(empty)";
  return std::string(lo_open ? "(" : "[") + lo.str() + ", " + hi.str() +
         (hi_open ? ")" : "]");
}

Interval Interval::intersect(const Interval& a, const Interval& b) {
  Interval r;
  if (a.lo > b.lo) { r.lo = a.lo; r.lo_open = a.lo_open; }
  else if (b.lo > a.lo) { r.lo = b.lo; r.lo_open = b.lo_open; }
  else { r.lo = a.lo; r.lo_open = a.lo_open || b.lo_open; }
  if (a.hi < b.hi) { r.hi = a.hi; r.hi_open = a.hi_open; }
  else if (b.hi < a.hi) { r.hi = b.hi; r.hi_open = b.hi_open; }
  else { r.hi = a.hi; r.hi_open = a.hi_open || b.hi_open; }
  return r;
}

std::string Verdict::binding() const {
  for (const Constraint& c : constraints)
    if (!c.holds) return c.name;
  return {};
}

int operator_power(Family f) { return f == Family::CahnHilliard ? 2 : 1; }

Rational xi_sup_exact(int d, int power, const Rational& delta) {
  return delta + kHalf - Rational(d, 4 * power);
}

Rational hs_threshold_exact(int d, int power) { return Rational(d, 4 * power); }

namespace {

void require_dimension(int d) {
  if (d < 1 || d > 3)
    throw std::invalid_argument("classify: dimension must be 1, 2 or 3");
}

Constraint in_window(const std::string& name, const Rational& x,
                     const Interval& w) {
  return {name, x.str() + " in " + w.str(), w.contains(x)};
}

Constraint claim(const std::string& name, const std::string& detail, bool ok) {
  return {name, detail, ok};
}

// delta window of the base hypotheses for alpha = 0 or bounded drift: the
// xi-window (0, delta + 1/2 - d/(4p)) must be nonempty and delta + beta < 1/2.
Interval base_delta_window(int d, int power, const Rational& beta) {
  Rational lo = Rational(d, 4 * power) - kHalf;  // xi-window nonempty
  Interval w;
  if (lo < kZero) {
    w.lo = kZero;
    w.lo_open = false;
  } else {
    w.lo = lo;
    w.lo_open = true;
  }
  w.hi = kHalf - beta;
  w.hi_open = true;
  return w;
}

void reject_gamma(const ScenarioParams& p) {
  if (p.gamma.has_value())
    throw std::invalid_argument(
        "classify: gamma only applies to the divergence_super family");
}

}  // namespace

PolyParams heat_polynomial_params(int d, const Rational& p) {
  require_dimension(d);
  if (p < Rational(2))
    throw std::invalid_argument("heat_polynomial_params: growth p must be >= 2");
  PolyParams out;
  Rational r = Rational(2);
  if (p - kOne > r) r = p - kOne;
  if (Rational(d) * (p - Rational(2)) > r) r = Rational(d) * (p - Rational(2));
  out.r_opt = r;
  out.alpha_opt = Rational(d, 2) * (kHalf - kOne / r);
  // beta from the dual embedding: alpha + beta = d(p-2)/(2r)
  out.beta_opt = Rational(d, 2) * (p - Rational(2)) / r - out.alpha_opt;
  if (out.beta_opt < kZero) out.beta_opt = kZero;

  bool growth_ok = Rational(d) * (p - Rational(2)) <= Rational(2) * (p - kOne);
  bool d3_ok = d != 3 || p < Rational(4);
  out.feasible = growth_ok && d3_ok;

  if (d == 1)
    out.delta_window = Interval::closed_open(kZero, kHalf);
  else
    out.delta_window = Interval::open(out.alpha_opt, kHalf);
  if (!out.feasible) out.delta_window = Interval::open(kZero, kZero);
  return out;
}

Interval supercritical_gamma_range(const Rational& alpha, const Rational& beta,
                                   const Rational& xi) {
  if (alpha >= xi)
    throw std::invalid_argument("supercritical_gamma_range: alpha must be < xi");
  if (beta < kZero)
    throw std::invalid_argument("supercritical_gamma_range: beta must be >= 0");
  // a beta at or above 1/2 + xi - alpha simply empties the intersection
  return Interval::intersect(Interval::closed(kZero, beta),
                             Interval::open(beta - kHalf, xi - alpha));
}

Interval cahn_hilliard_delta_range(int d) {
  require_dimension(d);
  return Interval::open(Rational(d, 8), kHalf);
}

Interval nondivergence_delta_window(int d, bool bounded, const Rational& alpha) {
  require_dimension(d);
  if (bounded) {
    // bounded drift needs no alpha < xi coupling; only the base hypotheses
    return base_delta_window(d, 1, kZero);
  }
  if (d == 1) {
    if (alpha == kHalf) return Interval::open(kQuarter, kHalf);
    return Interval::closed_open(kZero, kHalf);
  }
  if (d == 2) return Interval::open(alpha, kHalf);
  return Interval::open(alpha + kQuarter, kHalf);
}

std::vector<AlphaDeltaRule> nondivergence_ranges(int d, bool bounded) {
  require_dimension(d);
  std::vector<AlphaDeltaRule> rules;
  if (bounded) {
    rules.push_back({Interval::open(kZero, kOne), "delta in [0, 1/2)"});
    return rules;
  }
  if (d == 1) {
    rules.push_back({Interval::open(kZero, kHalf), "delta in [0, 1/2)"});
    rules.push_back({Interval::closed(kHalf, kHalf), "delta in (1/4, 1/2)"});
  } else if (d == 2) {
    rules.push_back({Interval::open(kZero, kHalf), "delta in (alpha, 1/2)"});
  } else {
    rules.push_back({Interval::open(kZero, kQuarter), "delta in (alpha + 1/4, 1/2)"});
  }
  return rules;
}

namespace {

Verdict classify_heat_perturb(const ScenarioParams& p) {
  Verdict v;
  v.initial_space = "V_0 (L^2)";
  if (p.alpha != kZero || p.beta != kZero)
    throw std::invalid_argument(
        "classify: heat_perturb is a zero-order perturbation (alpha = beta = 0)");
  Interval w = base_delta_window(p.d, 1, kZero);
  v.delta_window = w;
  v.constraints.push_back(in_window("delta-window", p.delta, w));
  v.admissible = v.constraints.back().holds;
  v.route = v.admissible ? (p.drift_bounded ? Route::Thm25 : Route::Thm26)
                         : Route::Rejected;
  return v;
}

Verdict classify_heat_polynomial(const ScenarioParams& p) {
  if (p.drift_bounded)
    throw std::invalid_argument(
        "classify: bounded polynomial drift is the heat_perturb family");
  Verdict v;
  PolyParams pp = heat_polynomial_params(p.d, p.p);
  v.initial_space = "V_" + (Rational(2) * pp.alpha_opt).str() +
                    " (D(A^" + pp.alpha_opt.str() + "))";
  v.delta_window = pp.delta_window;
  v.constraints.push_back(claim(
      "growth-embedding", "d(p-2) = " + (Rational(p.d) * (p.p - Rational(2))).str() +
          " <= 2(p-1) = " + (Rational(2) * (p.p - kOne)).str(),
      Rational(p.d) * (p.p - Rational(2)) <= Rational(2) * (p.p - kOne)));
  if (p.d == 3)
    v.constraints.push_back(
        claim("d3-subquartic", "p = " + p.p.str() + " < 4", p.p < Rational(4)));
  if (pp.feasible)
    v.constraints.push_back(in_window("delta-window", p.delta, pp.delta_window));
  v.admissible = true;
  for (const auto& c : v.constraints) v.admissible = v.admissible && c.holds;
  v.route = v.admissible ? Route::Thm26 : Route::Rejected;
  return v;
}

Verdict classify_divergence_sub(const ScenarioParams& p) {
  Verdict v;
  v.initial_space = "V_0 (L^2)";
  if (p.alpha != kZero)
    throw std::invalid_argument("classify: divergence drift has alpha = 0");
  Interval beta_w = p.d == 3 ? Interval::open(kZero, kQuarter)
                             : Interval::open(kZero, kHalf);
  v.constraints.push_back(in_window("beta-window", p.beta, beta_w));
  Interval delta_w = base_delta_window(p.d, 1, p.beta);
  v.delta_window = delta_w;
  v.constraints.push_back(in_window("delta-window", p.delta, delta_w));
  v.admissible = true;
  for (const auto& c : v.constraints) v.admissible = v.admissible && c.holds;
  v.route = v.admissible ? (p.drift_bounded ? Route::Thm25 : Route::Thm26)
                         : Route::Rejected;
  return v;
}

Verdict classify_divergence_super(const ScenarioParams& p) {
  Verdict v;
  if (!p.drift_bounded)
    throw std::invalid_argument(
        "classify: the super-critical divergence route needs bounded F");
  if (p.delta != kZero)
    throw std::invalid_argument(
        "classify: rough-noise route runs at delta = 0 (cylindrical base)");
  Rational xi = xi_sup_exact(p.d, 1, kZero);
  if (xi > kHalf) xi = kHalf;
  v.constraints.push_back(claim("xi-window", "xi_sup = " + xi.str() + " > 0",
                                xi > kZero));
  v.constraints.push_back(
      claim("alpha<xi", p.alpha.str() + " < " + xi.str(), p.alpha < xi));
  v.constraints.push_back(in_window(
      "beta-supercritical", p.beta, Interval::closed_open(kHalf, kHalf + xi - p.alpha)));
  bool pre_ok = true;
  for (const auto& c : v.constraints) pre_ok = pre_ok && c.holds;
  if (pre_ok) {
    Interval gw = supercritical_gamma_range(p.alpha, p.beta, xi);
    v.gamma_window = gw;
    v.constraints.push_back(
        claim("gamma-window-nonempty", gw.str(), !gw.empty()));
    if (p.gamma.has_value())
      v.constraints.push_back(in_window("gamma", *p.gamma, gw));
  }
  v.admissible = true;
  for (const auto& c : v.constraints) v.admissible = v.admissible && c.holds;
  v.route = v.admissible ? Route::Cor27 : Route::Rejected;
  Rational g = p.gamma.value_or(v.gamma_window ? v.gamma_window->midpoint() : kZero);
  v.initial_space = "V_-" + (Rational(2) * g).str() + " (D(A^-" + g.str() + "))";
  return v;
}

Verdict classify_non_divergence(const ScenarioParams& p) {
  Verdict v;
  if (p.beta != kZero)
    throw std::invalid_argument("classify: non-divergence drift has beta = 0");
  v.initial_space = p.drift_bounded
                        ? "V_0 (L^2)"
                        : "V_" + (Rational(2) * p.alpha).str() + " (D(A^" +
                              p.alpha.str() + "))";
  Interval alpha_w;
  if (p.drift_bounded) {
    alpha_w = Interval::open(kZero, kOne);
  } else if (p.d == 1) {
    alpha_w = Interval{kZero, kHalf, true, false};  // (0, 1/2]
  } else if (p.d == 2) {
    alpha_w = Interval::open(kZero, kHalf);
  } else {
    alpha_w = Interval::open(kZero, kQuarter);
  }
  v.constraints.push_back(in_window("alpha-window", p.alpha, alpha_w));
  bool limiting = !p.drift_bounded && p.d == 1 && p.alpha == kHalf;
  Interval delta_w = nondivergence_delta_window(p.d, p.drift_bounded, p.alpha);
  v.delta_window = delta_w;
  v.constraints.push_back(in_window("delta-window", p.delta, delta_w));
  v.admissible = true;
  for (const auto& c : v.constraints) v.admissible = v.admissible && c.holds;
  if (!v.admissible) {
    v.route = Route::Rejected;
  } else if (p.drift_bounded) {
    v.route = Route::Thm25;
  } else if (limiting) {
    v.route = Route::Thm26Limiting;
    v.max_hs_shift = p.delta - kQuarter;
  } else {
    v.route = Route::Thm26;
  }
  return v;
}

Verdict classify_burgers(const ScenarioParams& p) {
  Verdict v;
  v.initial_space = "V_1 (H^1_0)";
  if (p.d != 1)
    throw std::invalid_argument("classify: the Burgers family is one-dimensional");
  if (p.alpha != kHalf || p.beta != kZero)
    throw std::invalid_argument(
        "classify: Burgers runs at the limiting order alpha = 1/2, beta = 0");
  // alpha = 1/2 exhausts the xi-window, so the route is the limiting one and
  // needs G Hilbert-Schmidt into some D(A^{delta'}), delta' > 0.
  Interval w = Interval::open(kQuarter, kHalf);
  v.delta_window = w;
  v.constraints.push_back(in_window("delta-window (HS)", p.delta, w));
  v.admissible = v.constraints.back().holds;
  v.route = v.admissible ? Route::Thm26Limiting : Route::Rejected;
  if (v.admissible) v.max_hs_shift = p.delta - kQuarter;
  return v;
}

Verdict classify_cahn_hilliard(const ScenarioParams& p) {
  Verdict v;
  v.initial_space = "V_1 w.r.t. A_N^2 (H^2, Neumann)";
  if (p.alpha != kHalf || p.beta != kZero)
    throw std::invalid_argument(
        "classify: Cahn-Hilliard runs at alpha = 1/2, beta = 0 w.r.t. A_N^2");
  Interval w = cahn_hilliard_delta_range(p.d);
  v.delta_window = w;
  v.constraints.push_back(in_window("delta-window (HS)", p.delta, w));
  v.admissible = v.constraints.back().holds;
  v.route = v.admissible ? Route::Thm26Limiting : Route::Rejected;
  if (v.admissible) v.max_hs_shift = p.delta - Rational(p.d, 8);
  return v;
}

}  // namespace

Verdict classify(const ScenarioParams& params) {
  require_dimension(params.d);
  if (params.family != Family::DivergenceSuper) reject_gamma(params);
  if (params.alpha < kZero || params.alpha >= kOne)
    throw std::invalid_argument("classify: alpha outside [0, 1)");
  if (params.beta < kZero || params.beta >= kOne)
    throw std::invalid_argument("classify: beta outside [0, 1)");
  if (params.delta < kZero)
    throw std::invalid_argument("classify: delta must be >= 0");

  switch (params.family) {
    case Family::HeatPerturb: return classify_heat_perturb(params);
    case Family::HeatPolynomial: return classify_heat_polynomial(params);
    case Family::DivergenceSub: return classify_divergence_sub(params);
    case Family::DivergenceSuper: return classify_divergence_super(params);
    case Family::NonDivergence: return classify_non_divergence(params);
    case Family::Burgers: return classify_burgers(params);
    case Family::CahnHilliard: return classify_cahn_hilliard(params);
  }
  throw std::logic_error("classify: unknown family");
}

}  // namespace spde::admissibility
