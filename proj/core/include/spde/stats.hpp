#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

namespace spde::stats {

// Compensated (Kahan) accumulator. Series over modes and path reductions are
// summed in a fixed index order with compensation so results are reproducible
// and insensitive to the magnitude spread across modes.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

struct MeanVar {
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n-1)
  std::size_t count = 0;
};

MeanVar mean_variance(std::span<const double> xs);

// Least-squares slope of log(y) against log(t); ts and ys must be positive.
double loglog_slope(std::span<const double> ts, std::span<const double> ys);

double normal_cdf(double x);
// Inverse standard normal CDF (Acklam's rational approximation, |err| < 1e-9).
double normal_quantile(double p);

// Two-sided Kolmogorov-Smirnov test of samples against a continuous CDF.
// Returns the statistic and the asymptotic p-value (Stephens' correction).
struct KsResult {
  double statistic;
  double p_value;
};
template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf);

double ks_asymptotic_pvalue(double d, std::size_t n);

// -------------------------------------------------------------------------

template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = cdf(samples[i]);
    double lo = f - static_cast<double>(i) / n;
    double hi = static_cast<double>(i + 1) / n - f;
    if (lo > d) d = lo;
    if (hi > d) d = hi;
  }
  return {d, ks_asymptotic_pvalue(d, n)};
}

}  // namespace spde::stats
