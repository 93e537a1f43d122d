#include "spde/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace spde::stats {

MeanVar mean_variance(std::span<const double> xs) {
  MeanVar out;
  out.count = xs.size();
  if (xs.empty()) return out;
  // Welford, single pass
  double mean = 0.0, m2 = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  out.mean = mean;
  out.variance = xs.size() > 1 ? m2 / static_cast<double>(xs.size() - 1) : 0.0;
  return out;
}

double loglog_slope(std::span<const double> ts, std::span<const double> ys) {
  if (ts.size() != ys.size() || ts.size() < 2)
    throw std::invalid_argument("loglog_slope: need >= 2 matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i] <= 0.0 || ys[i] <= 0.0)
      throw std::domain_error("loglog_slope: nonpositive data");
    double x = std::log(ts[i]);
    double y = std::log(ys[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("normal_quantile: p outside (0,1)");
  // Acklam's piecewise rational approximation.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r, x;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    q = p - 0.5;
    r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  return x;
}

double ks_asymptotic_pvalue(double d, std::size_t n) {
  double rn = std::sqrt(static_cast<double>(n));
  double lambda = (rn + 0.12 + 0.11 / rn) * d;
  // Kolmogorov tail series, alternating; a handful of terms suffice.
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = 2.0 * ((j % 2) ? 1.0 : -1.0) *
                  std::exp(-2.0 * j * j * lambda * lambda);
    sum += term;
    if (std::fabs(term) < 1e-12) break;
  }
  if (sum < 0.0) sum = 0.0;
  if (sum > 1.0) sum = 1.0;
  return sum;
}

}  // namespace spde::stats
