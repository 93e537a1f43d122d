#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spde/kolmogorov.hpp"
#include "spde/observables.hpp"
#include "spde/simulate.hpp"

namespace spde::lawcmp {

// Monte-Carlo estimate of u(x) = integral_0^inf e^{-lambda s} E f(X(s)) ds,
// truncated at the simulation horizon with the explicit tail bound
// e^{-lambda T} sup|f| / lambda folded into the error budget.
struct LaplaceEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double tail_bound = 0.0;
  int paths = 0;
  double horizon = 0.0;
};

struct LaplaceBatch {
  std::vector<LaplaceEstimate> estimates;          // one per observable
  std::vector<std::vector<double>> per_path;       // [observable][path]
  std::vector<galerkin::PathResult> path_results;  // blow-up diagnostics
  int blowups = 0;
};

// Trapezoidal time quadrature of e^{-lambda s} f(X(s)) along each path,
// averaged across paths; all observables ride the same path ensemble.
LaplaceBatch laplace_batch(const galerkin::SimConfig& cfg,
                           const std::vector<Observable>& observables,
                           double lambda, int paths, int threads = 1);

// Single-observable convenience wrapper; throws on path blow-up.
LaplaceEstimate laplace_functional(const galerkin::SimConfig& cfg,
                                   const Observable& f, double lambda, int paths,
                                   int threads = 1);

struct ObservableRow {
  std::string observable;
  double est_a = 0.0, se_a = 0.0;
  double est_b = 0.0, se_b = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct ComparisonReport {
  std::vector<ObservableRow> rows;
  bool pass = false;
  double level = 0.01;
  double z_critical = 0.0;  // Bonferroni-corrected two-sided quantile
  double max_abs_z = 0.0;
  double lambda = 0.0;
  int paths_a = 0, paths_b = 0;
};

// Two-sample equality test of the Laplace functionals of two discretizations
// of the same continuous equation (they may differ in cutoff, step and seed;
// anything touching the continuous problem must match, otherwise throws).
// Non-rejection at Bonferroni-corrected `level` over the catalog.
ComparisonReport compare_laws(const galerkin::SimConfig& cfg_a,
                              const galerkin::SimConfig& cfg_b,
                              const std::vector<Observable>& catalog,
                              double lambda, int paths, double level,
                              int threads = 1);

struct LinearLaw {
  std::vector<double> mean;
  std::vector<double> variance;
};

// Exact per-mode terminal law of the drift-free equation.
LinearLaw exact_linear_law(const spectral::Spectrum& spec,
                           const noise::NoiseSpec& noise,
                           const spectral::ModeVector& x, double t);

struct CrossCheckRow {
  spectral::ModeVector x;
  double u_pde = 0.0;
  double u_mc = 0.0;
  double mc_se = 0.0;
  double mc_tail = 0.0;
  double budget = 0.0;  // 3 (SE + tail + pde_tol)
  bool pass = false;
};

struct CrossCheckReport {
  std::vector<CrossCheckRow> rows;
  bool pass = false;
  double lambda = 0.0;
  kolmogorov::SolveStatus solve_status = kolmogorov::SolveStatus::MaxSweeps;
  std::vector<double> contraction_factors;
};

struct CrossCheckOptions {
  std::vector<spectral::ModeVector> points;
  double drift_bound = 0.0;
  kolmogorov::SolveOptions solve;
  int paths = 20000;
  int threads = 1;
  int gh_order = 48;
};

// The duality check: solve the projected Kolmogorov equation for u and
// compare with the Monte-Carlo Laplace functional of the same m-mode
// dynamics, point by point.
CrossCheckReport kolmogorov_cross_check(const galerkin::SimConfig& projected,
                                        const Observable& f, double lambda,
                                        const CrossCheckOptions& opts);

}  // namespace spde::lawcmp
