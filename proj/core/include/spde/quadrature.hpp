#pragma once

#include <functional>
#include <vector>

namespace spde::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
const Rule& gauss_legendre(int order);

// Gauss-Hermite rule with weight exp(-x^2) on the whole line (physicists'
// convention).  E[phi(Z)] for Z ~ N(0,1) is sum w_i phi(sqrt(2) x_i) / sqrt(pi).
const Rule& gauss_hermite(int order);

template <class F>
double integrate(const Rule& rule, F&& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return s * half;
}

// Composite Gauss-Legendre over log-dyadic subintervals of (0, b]; resolves
// integrable endpoint singularities at t=0 with equal work per octave. The
// leftover (0, b*2^-octaves] is approximated as width * f(left endpoint).
template <class F>
double integrate_log_dyadic(F&& f, double b, int octaves, int order = 8) {
  const Rule& rule = gauss_legendre(order);
  double total = 0.0;
  double hi = b;
  for (int j = 0; j < octaves; ++j) {
    double lo = 0.5 * hi;
    total += integrate(rule, f, lo, hi);
    hi = lo;
  }
  total += hi * f(hi);
  return total;
}

// Regularized lower incomplete gamma P(a, x) (series / continued fraction).
double gamma_p(double a, double x);

}  // namespace spde::quad
