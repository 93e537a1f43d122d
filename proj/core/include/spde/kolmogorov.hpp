#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "spde/noise.hpp"
#include "spde/observables.hpp"
#include "spde/spectral.hpp"

namespace spde::kolmogorov {

// Finite-dimensional Kolmogorov problem on the span of the first m modes:
//
//   lambda u(x) - 1/2 sum_k g_k^2 d^2_k u(x) + sum_k lam_k x_k d_k u(x)
//     = f(x) + (B(x), Du(x)),    x in R^m.
//
// m stays small (tensor quadrature); the OU transition kernel is Gaussian
// with per-mode variances q_k(t).
struct ProjectedProblem {
  spectral::Spectrum spec;  // cutoff = m
  noise::NoiseSpec noise;
  std::function<void(const double* x, double* b)> drift;  // bounded, R^m -> R^m
  double drift_bound = 0.0;  // sup_x ||B(x)||
  lawcmp::Observable f;
  double lambda = 1.0;
  double beta = 0.0;
  int gh_order = 48;          // tensor Gauss-Hermite order per dimension
  int quadrature_cap = 3;     // largest m handled by tensor quadrature
  int mc_samples = 20000;     // fallback for m = cap+1
  std::uint64_t mc_seed = 77;

  int m() const { return spec.cutoff; }
};

using ScalarField = std::function<double(const double* x, int m)>;

// [R_t v](x) = E v(S(t) x + Y_t), Y_t ~ N(0, diag q(t)). Tensor Gauss-Hermite
// for m <= quadrature_cap, Monte Carlo (with the configured sample count) for
// m = cap + 1. t = 0 returns v(x).
double ou_apply(const ProjectedProblem& problem, const ScalarField& v, double t,
                const double* x);

// Gaussian regularization operator: c_k > 0 are the eigenvalues of the
// regularizer on the m modes, T(eps) = diag(e^{-eps c_k}), and the smoothing
// covariance is (1 - e^{-2 eps c_k}) / (2 c_k) per mode.
struct RegularizerSpec {
  std::vector<double> c;
  double eps = 0.0;

  static RegularizerSpec uniform(int m, double c, double eps) {
    return {std::vector<double>(m, c), eps};
  }
};

// B_eps(x) = E[ T(eps) B(T(eps) x + Y) ], smooth and converging to B
// pointwise as eps -> 0.
void regularize_drift(const ProjectedProblem& problem, const RegularizerSpec& reg,
                      const double* x, double* out);
double regularize_f(const ProjectedProblem& problem, const RegularizerSpec& reg,
                    const double* x);

// Contraction threshold: lambda_0 = (C_R Gamma(1/2-delta-beta) sup||B||)^{1/(1/2-delta-beta)}.
double lambda0(double c_r, double delta, double beta, double drift_bound);

// Empirical smoothing constant: max over the catalog and t-grid of
// t^{1/2+delta+gamma} sup_y ||A^gamma D(R_t v)(y)|| / sup|v|, inflated by 1.5
// so the resulting lambda_0 errs on the safe side.
double estimate_smoothing_constant(const spectral::Spectrum& spec,
                                   const noise::NoiseSpec& noise, double gamma,
                                   int catalog_modes = 16);

struct GridSpec {
  int points_per_dim = 61;
  double radius_sigmas = 6.0;  // box half-width in units of max_k sqrt(q_k(inf))
};

enum class SolveStatus { Converged, NonContraction, MaxSweeps };

struct Solution {
  int m = 1;
  int points_per_dim = 0;
  double radius = 0.0;
  std::vector<double> coords;              // per-dim grid coordinates
  std::vector<double> u;                   // tensor grid values
  std::vector<std::vector<double>> du;     // grid gradients, one field per axis
  std::vector<double> contraction_factors; // per Picard sweep, U-norm ratios
  SolveStatus status = SolveStatus::MaxSweeps;
  double tol = 0.0;
  double final_increment = 0.0;

  double value_at(const double* x) const;           // multilinear, clamped
  void gradient_at(const double* x, double* g) const;
  double sup_u() const;
  double sup_du() const;
};

struct SolveOptions {
  double tol = 1e-4;
  int max_sweeps = 80;
  GridSpec grid;
  int time_octaves = 48;       // log-dyadic quadrature depth for the t-integral
  int time_order = 6;          // Gauss-Legendre order per octave
  std::optional<RegularizerSpec> regularizer;  // solve with (B_eps, f_eps)
  bool start_from_f_over_lambda = false;
};

// Picard iteration for the mild form
//   u = integral_0^inf e^{-lambda t} R_t[ f + (B, Du) ] dt,
// truncated where the tail bound e^{-lambda T}(sup|f| + sup||B|| sup||Du||)/lambda
// drops below tol/10. Aborts with NonContraction when the U-norm increment
// ratio stays >= 1 on two consecutive sweeps.
Solution solve_mild(const ProjectedProblem& problem, const SolveOptions& opts);

// Pointwise residual of the strong (regularised) equation with second-order
// central differences on the solution grid.
std::vector<double> residual_strong(const ProjectedProblem& problem,
                                    const Solution& sol,
                                    const std::vector<std::vector<double>>& points,
                                    const RegularizerSpec& reg,
                                    bool fourth_order = false);

struct SmoothingReport {
  std::vector<double> t;
  std::vector<double> grad_sup;        // sup ||D(R_t v)|| over catalog
  std::vector<double> grad_gamma_sup;  // sup ||A^gamma D(R_t v)||
  double slope = 0.0;                  // log-log fit of grad_sup
  double slope_gamma = 0.0;
};

// Measures the strong-Feller gradient decay through finite differences of the
// one-coordinate OU integrals, taking the sup over observables aligned with
// the first `modes` eigendirections.
SmoothingReport verify_smoothing(const spectral::Spectrum& spec,
                                 const noise::NoiseSpec& noise,
                                 const std::vector<double>& t_grid, double gamma,
                                 int modes, double kink_scale = 2000.0);

// sum_{k > j} g_k^2 d^2_k u(x), averaged over the sample points: the
// finite-mode image of the projection remainder in the trace term.
double trace_remainder(const ProjectedProblem& problem, const Solution& sol,
                       int j, const std::vector<std::vector<double>>& points);

}  // namespace spde::kolmogorov
