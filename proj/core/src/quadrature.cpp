#include "spde/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace spde::quad {

namespace {

Rule make_gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

Rule make_gauss_hermite(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double x = 0.0, pp = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      x = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    } else if (i == 1) {
      x -= 1.14 * std::pow(static_cast<double>(n), 0.426) / x;
    } else if (i == 2) {
      x = 1.86 * x - 0.86 * r.nodes[n - 1];
    } else if (i == 3) {
      x = 1.91 * x - 0.91 * r.nodes[n - 2];
    } else {
      x = 2.0 * x - r.nodes[n - i + 1];
    }
    for (int it = 0; it < 200; ++it) {
      double p0 = pim4, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = x * std::sqrt(2.0 / (j + 1.0)) * p1 -
             std::sqrt(static_cast<double>(j) / (j + 1.0)) * p2;
      }
      pp = std::sqrt(2.0 * n) * p1;
      double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-14) break;
    }
    r.nodes[n - 1 - i] = x;
    r.nodes[i] = -x;
    double w = 2.0 / (pp * pp);
    r.weights[n - 1 - i] = w;
    r.weights[i] = w;
  }
  return r;
}

std::mutex cache_mutex;

const Rule& cached(std::map<int, Rule>& cache, int order, Rule (*make)(int)) {
  if (order < 1) throw std::invalid_argument("quadrature order must be >= 1");
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make(order)).first;
  return it->second;
}

}  // namespace

const Rule& gauss_legendre(int order) {
  static std::map<int, Rule> cache;
  return cached(cache, order, make_gauss_legendre);
}

const Rule& gauss_hermite(int order) {
  static std::map<int, Rule> cache;
  return cached(cache, order, make_gauss_hermite);
}

namespace {

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

}  // namespace spde::quad
