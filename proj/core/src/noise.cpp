#include "spde/noise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spde/quadrature.hpp"
#include "spde/stats.hpp"

namespace spde::noise {

std::string to_string(Kind k) { return k == Kind::Colored ? "colored" : "rough"; }

double NoiseSpec::gain(double lambda) const {
  return kind == Kind::Colored ? std::pow(lambda, -exponent)
                               : std::pow(lambda, exponent);
}

double NoiseSpec::effective_delta() const {
  return kind == Kind::Colored ? exponent : -exponent;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// growth exponent of lambda_k in k
double growth(int d, int power) { return 2.0 * power / static_cast<double>(d); }

// Lower envelope constant of lambda_k / k^{2p/d} over the back half of the
// retained modes; used for integral-comparison tail bounds.
double envelope_lo(const spectral::Spectrum& spec) {
  const double g = growth(spec.dimension, spec.power);
  double c = kInf;
  int n = spec.cutoff;
  for (int k = std::max(1, n / 2); k <= n; ++k) {
    double ratio = spec.eigenvalues[k - 1] / std::pow(static_cast<double>(k), g);
    c = std::min(c, ratio);
  }
  return c;
}

// Bound on sum_{k>n} lambda_k^{-a}: comparison with the integral of
// (c_lo x^{2p/d})^{-a}. Infinite when the exponent test fails.
double lambda_tail_bound(const spectral::Spectrum& spec, double a) {
  const double g = growth(spec.dimension, spec.power);
  if (g * a <= 1.0) return kInf;
  double c_lo = envelope_lo(spec);
  double n = static_cast<double>(spec.cutoff);
  return std::pow(c_lo, -a) * std::pow(n, 1.0 - g * a) / (g * a - 1.0);
}

// max of f on [lo, hi] by golden-section on log r, endpoints included.
// The profiles r^a e^{-cr} / sqrt-or-power(1 - e^{-2r}) are unimodal on the
// bracket (monotone pieces included); endpoint comparison covers the
// boundary-supremum cases such as a = 1/2.
template <class F>
std::pair<double, double> maximize_log(F&& f, double lo, double hi) {
  const double gr = 0.6180339887498949;
  double a = std::log(lo), b = std::log(hi);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(std::exp(x1)), f2 = f(std::exp(x2));
  for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(std::exp(x2));
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(std::exp(x1));
    }
  }
  double xm = 0.5 * (a + b);
  double fm = f(std::exp(xm));
  double best_x = std::exp(xm), best = fm;
  if (f(lo) > best) { best = f(lo); best_x = lo; }
  if (f(hi) > best) { best = f(hi); best_x = hi; }
  return {best_x, best};
}

}  // namespace

double qt_mode(const spectral::Spectrum& spec, const NoiseSpec& noise, int k,
               double t) {
  double lam = spec.eigenvalues[k];
  double g = noise.gain(lam);
  return g * g * (-std::expm1(-2.0 * t * lam)) / (2.0 * lam);
}

CovarianceDiag qt_diagonal(const spectral::Spectrum& spec, const NoiseSpec& noise,
                           double t) {
  if (t < 0.0) throw std::invalid_argument("qt_diagonal: negative time");
  CovarianceDiag out;
  out.q.resize(spec.cutoff);
  stats::KahanSum trace;
  for (int k = 0; k < spec.cutoff; ++k) {
    out.q[k] = qt_mode(spec, noise, k, t);
    trace.add(out.q[k]);
  }
  out.trace_partial = trace.value();
  // q_k(t) <= q_k(inf) = g_k^2 / (2 lambda_k)
  double a = 1.0 + 2.0 * noise.effective_delta();
  out.trace_tail_bound = t == 0.0 ? 0.0 : 0.5 * lambda_tail_bound(spec, a);
  out.trace_class = qinf_trace_class(spec.dimension, spec.power,
                                     noise.effective_delta());
  return out;
}

TraceResult q_infinity_trace(const spectral::Spectrum& spec,
                             const NoiseSpec& noise) {
  TraceResult out;
  stats::KahanSum sum;
  for (int k = 0; k < spec.cutoff; ++k) {
    double lam = spec.eigenvalues[k];
    double g = noise.gain(lam);
    sum.add(g * g / (2.0 * lam));
  }
  out.partial_sum = sum.value();
  out.tail_bound = 0.5 * lambda_tail_bound(spec, 1.0 + 2.0 * noise.effective_delta());
  out.converges = qinf_trace_class(spec.dimension, spec.power,
                                   noise.effective_delta());
  return out;
}

CheckResult check_cont_time(const spectral::Spectrum& spec, const NoiseSpec& noise,
                            double xi, double T) {
  if (!(xi > 0.0 && xi < 0.5))
    throw std::invalid_argument("check_cont_time: xi outside (0, 1/2)");
  if (!(T > 0.0)) throw std::invalid_argument("check_cont_time: T must be positive");
  // integral_0^T t^{-2xi} e^{-2 lambda t} dt = (2 lambda)^{2xi-1} gamma(1-2xi, 2 lambda T)
  const double a = 1.0 - 2.0 * xi;
  const double ga = std::tgamma(a);
  stats::KahanSum sum;
  for (int k = 0; k < spec.cutoff; ++k) {
    double lam = spec.eigenvalues[k];
    double g = noise.gain(lam);
    double c = 2.0 * lam;
    sum.add(g * g * std::pow(c, -a) * ga * quad::gamma_p(a, c * T));
  }
  CheckResult out;
  out.estimate = sum.value();
  out.satisfied = cont_time_holds(spec.dimension, spec.power,
                                  noise.effective_delta(), xi);
  return out;
}

double L4Integrand::l4_norm() const {
  return std::pow(l4_norm4_partial, 0.25);
}
double L4Integrand::l2_norm() const { return std::sqrt(l2_norm2_partial); }

L4Integrand l4_integrand(const spectral::Spectrum& spec, const NoiseSpec& noise,
                         double t, double eps, double sigma) {
  if (!(t > 0.0)) throw std::invalid_argument("l4_integrand: t must be positive");
  L4Integrand out;
  stats::KahanSum s4, s2;
  for (int k = 0; k < spec.cutoff; ++k) {
    double lam = spec.eigenvalues[k];
    double g = noise.gain(lam);
    double e2 = -std::expm1(-2.0 * t * lam);  // 1 - e^{-2t lam}
    double e4 = std::exp(-4.0 * t * lam);
    s4.add(4.0 * lam * lam * e4 / (e2 * e2));
    s2.add(2.0 * g * g * lam * e4 / e2);
  }
  out.l4_norm4_partial = s4.value();
  out.l2_norm2_partial = s2.value();

  const double two_delta = 2.0 * noise.effective_delta();
  auto m4 = maximize_log(
      [eps](double r) {
        double e2 = -std::expm1(-2.0 * r);
        return std::pow(r, 2.0 + eps) * std::exp(-4.0 * r) / (e2 * e2);
      },
      1e-8, 80.0);
  auto m2 = maximize_log(
      [sigma](double r) {
        double e2 = -std::expm1(-2.0 * r);
        return std::pow(r, 1.0 + sigma) * std::exp(-4.0 * r) / e2;
      },
      1e-8, 80.0);
  out.l4_tail_bound =
      4.0 * m4.second * std::pow(t, -(2.0 + eps)) * lambda_tail_bound(spec, eps);
  out.l2_tail_bound = 2.0 * m2.second * std::pow(t, -(1.0 + sigma)) *
                      lambda_tail_bound(spec, two_delta + sigma);
  return out;
}

CheckResult check_L4(const spectral::Spectrum& spec, const NoiseSpec& noise,
                     double lambda, double theta) {
  if (!(lambda > 0.0)) throw std::invalid_argument("check_L4: lambda must be positive");
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("check_L4: theta outside (0, 1)");

  const int d = spec.dimension;
  const int p = spec.power;
  const double delta = noise.effective_delta();
  CheckResult out;
  out.satisfied = l4_condition_holds(d, p, delta, theta);

  const double g = growth(d, p);
  const double eps = 1.0 / g + 0.05;            // valid tail split exponents
  const double sigma = std::max(1.0 / g - 2.0 * delta, 0.0) + 0.05;
  auto integrand = [&](double t) {
    L4Integrand v = l4_integrand(spec, noise, t, eps, sigma);
    return std::exp(-lambda * t) * std::pow(v.l4_norm(), 2.0 * (1.0 - theta)) *
           std::pow(v.l2_norm(), theta);
  };

  // Truncation is only faithful for t >~ 1/lambda_n; below t0 the infinite
  // series follows the power laws t^{-(1+eps/2)} and t^{-(1+sigma)/2}.
  const double t0 = 1.0 / spec.eigenvalues[spec.cutoff - 1];
  const double t_end = std::max(1.0, 40.0 / lambda);
  int octaves = static_cast<int>(std::ceil(std::log2(t_end / t0)));
  const auto& rule = quad::gauss_legendre(8);
  double mid = 0.0;
  double hi = t_end;
  for (int j = 0; j < octaves; ++j) {
    double lo = 0.5 * hi;
    mid += quad::integrate(rule, integrand, lo, hi);
    hi = lo;
  }
  // singular endpoint: integrand ~ C t^{-eta}
  double eta = (1.0 + 0.5 * eps) * (1.0 - theta) + 0.5 * (1.0 + sigma) * theta;
  double head;
  if (eta >= 1.0) {
    head = kInf;
  } else {
    double c = integrand(hi) * std::pow(hi, eta);
    head = c * std::pow(hi, 1.0 - eta) / (1.0 - eta);
  }
  // decay tail beyond t_end
  double tail = integrand(t_end) / lambda;
  out.estimate = mid + head + tail;
  return out;
}

SmoothingConstant smoothing_constant(const spectral::Spectrum& spec,
                                     const NoiseSpec& noise, double gamma) {
  if (gamma < 0.0)
    throw std::invalid_argument("smoothing_constant: gamma must be >= 0");
  const double a = 0.5 + noise.effective_delta() + gamma;
  auto profile = [a](double r) {
    return std::pow(r, a) * std::exp(-r) / std::sqrt(-std::expm1(-2.0 * r));
  };
  auto m = maximize_log(profile, 1e-6, 50.0);

  SmoothingConstant out;
  out.maximizer = m.first;
  out.value = std::sqrt(2.0) * m.second;

  out.bound_certified = true;
  for (double t = 1e-4; t <= 10.0; t *= 2.0) {
    double sup = 0.0;
    for (int k = 0; k < spec.cutoff; ++k) {
      double lam = spec.eigenvalues[k];
      double v = std::pow(lam, gamma) * std::sqrt(2.0) *
                 std::pow(lam, 0.5 + noise.effective_delta()) *
                 std::exp(-t * lam) / std::sqrt(-std::expm1(-2.0 * t * lam));
      sup = std::max(sup, v);
    }
    if (sup > out.value * std::pow(t, -a) * (1.0 + 1e-12)) {
      out.bound_certified = false;
      break;
    }
  }
  return out;
}

bool check_hs(const spectral::Spectrum& spec, const NoiseSpec& noise,
              double delta_prime) {
  if (delta_prime < 0.0)
    throw std::invalid_argument("check_hs: delta' must be >= 0");
  (void)spec;
  return hs_holds(spec.dimension, spec.power, noise.effective_delta(), delta_prime);
}

double xi_sup(int d, int power, double delta) {
  return delta + 0.5 - static_cast<double>(d) / (4.0 * power);
}

double theta_inf(int d, int power, double delta) {
  double denom = 2.0 * power * (1.0 + 2.0 * delta);
  if (denom <= 0.0) return kInf;
  return static_cast<double>(d) / denom;
}

bool qinf_trace_class(int d, int power, double delta) {
  return growth(d, power) * (1.0 + 2.0 * delta) > 1.0;
}

bool cont_time_holds(int d, int power, double delta, double xi) {
  return xi > 0.0 && xi < 0.5 && xi < xi_sup(d, power, delta);
}

bool l4_condition_holds(int d, int power, double delta, double theta) {
  return theta > theta_inf(d, power, delta) && theta < 1.0;
}

bool hs_holds(int d, int power, double delta, double delta_prime) {
  return growth(d, power) * 2.0 * (delta - delta_prime) > 1.0;
}

ReindexCheck rough_reindex(const spectral::Spectrum& spec, double gamma, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("rough_reindex: t must be positive");
  ReindexCheck out;
  stats::KahanSum d4, s4, d2, s2;
  for (int k = 0; k < spec.cutoff; ++k) {
    double lam = spec.eigenvalues[k];
    double e2 = -std::expm1(-2.0 * t * lam);
    // cylindrical-noise coefficients of Q_t^{-1/2}S(t) and Q_t^{-1/2}S(2t)
    double tau4 = std::sqrt(2.0 * lam) * std::exp(-t * lam) / std::sqrt(e2);
    double tau2 = std::sqrt(2.0 * lam) * std::exp(-2.0 * t * lam) / std::sqrt(e2);
    d4.add(std::pow(tau4, 4.0));
    d2.add(tau2 * tau2);
    // same operators applied to the shifted basis e~_k = lam^gamma e_k and
    // measured in the D(A^{-gamma}) norm
    double w_up = std::pow(lam, gamma);
    double w_dn = std::pow(lam, -gamma);
    double t4s = w_dn * (tau4 * w_up);
    double t2s = w_dn * (tau2 * w_up);
    s4.add(std::pow(t4s, 4.0));
    s2.add(t2s * t2s);
  }
  out.direct_l4 = d4.value();
  out.shifted_l4 = s4.value();
  out.direct_l2 = d2.value();
  out.shifted_l2 = s2.value();
  return out;
}

}  // namespace spde::noise
