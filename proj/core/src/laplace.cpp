#include "spde/laplace.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

#include "spde/stats.hpp"

namespace spde::lawcmp {

LaplaceBatch laplace_batch(const galerkin::SimConfig& cfg,
                           const std::vector<Observable>& observables,
                           double lambda, int paths, int threads) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("laplace_batch: lambda must be positive");
  if (paths < 1) throw std::invalid_argument("laplace_batch: need paths >= 1");

  galerkin::Simulator sim(cfg);
  const int steps = sim.steps();
  const double h = sim.dt();
  const std::size_t n_obs = observables.size();

  LaplaceBatch out;
  out.per_path.assign(n_obs, std::vector<double>(paths, 0.0));

  // t = 0 endpoint is path-independent
  std::vector<double> at_zero(n_obs);
  for (std::size_t j = 0; j < n_obs; ++j)
    at_zero[j] = 0.5 * h * observables[j](cfg.x0);

  auto sink_factory = [&](int) {
    return galerkin::Simulator::StepSink(
        [&, steps, h, lambda](int step, double t, const double* states, int n,
                              int count, std::uint64_t first) {
          const double w = (step == steps ? 0.5 * h : h) * std::exp(-lambda * t);
          for (int c = 0; c < count; ++c) {
            const double* a = states + static_cast<std::size_t>(c) * n;
            const std::size_t p = first + c;
            for (std::size_t j = 0; j < n_obs; ++j)
              out.per_path[j][p] += w * observables[j].eval(a, n);
          }
        });
  };
  out.path_results = sim.run_paths(0, paths, threads, sink_factory);
  for (const auto& r : out.path_results)
    if (r.blew_up) ++out.blowups;

  out.estimates.resize(n_obs);
  for (std::size_t j = 0; j < n_obs; ++j) {
    auto& vals = out.per_path[j];
    for (double& v : vals) v += at_zero[j];
    auto mv = stats::mean_variance(vals);
    LaplaceEstimate& est = out.estimates[j];
    est.value = mv.mean;
    est.std_error = std::sqrt(mv.variance / paths);
    est.tail_bound = observables[j].sup_bound * std::exp(-lambda * cfg.T) / lambda;
    est.paths = paths;
    est.horizon = cfg.T;
  }
  return out;
}

LaplaceEstimate laplace_functional(const galerkin::SimConfig& cfg,
                                   const Observable& f, double lambda, int paths,
                                   int threads) {
  LaplaceBatch batch = laplace_batch(cfg, {f}, lambda, paths, threads);
  if (batch.blowups > 0)
    throw std::runtime_error("laplace_functional: " +
                             std::to_string(batch.blowups) +
                             " path(s) blew up before the horizon");
  return batch.estimates[0];
}

namespace {

bool same_pointwise(const galerkin::PointwiseF& a, const galerkin::PointwiseF& b) {
  return a.poly == b.poly && a.sine_amp == b.sine_amp &&
         a.sine_freq == b.sine_freq && a.clip == b.clip;
}

void require_same_equation(const galerkin::SimConfig& a,
                           const galerkin::SimConfig& b) {
  const auto& sa = a.spec;
  const auto& sb = b.spec;
  bool ok = sa.dimension == sb.dimension && sa.bc == sb.bc &&
            sa.power == sb.power && a.noise.kind == b.noise.kind &&
            a.noise.exponent == b.noise.exponent && a.T == b.T &&
            a.drift.family == b.drift.family && a.drift.alpha == b.drift.alpha &&
            a.drift.beta == b.drift.beta && same_pointwise(a.drift.f, b.drift.f) &&
            same_pointwise(a.drift.f2, b.drift.f2) &&
            a.drift.burgers_sign == b.drift.burgers_sign &&
            a.trunc_level == b.trunc_level && a.noise_scale == b.noise_scale;
  for (int i = 0; ok && i < sa.dimension; ++i)
    ok = sa.lengths[i] == sb.lengths[i];
  if (ok) {
    // initial datum must be the same element of H
    const auto& xa = a.x0;
    const auto& xb = b.x0;
    std::size_t shared = std::min(xa.size(), xb.size());
    for (std::size_t k = 0; ok && k < shared; ++k) ok = xa[k] == xb[k];
    const auto& longer = xa.size() > xb.size() ? xa : xb;
    for (std::size_t k = shared; ok && k < longer.size(); ++k)
      ok = longer[k] == 0.0;
  }
  if (!ok)
    throw std::invalid_argument(
        "compare_laws: configurations describe different continuous equations");
}

}  // namespace

ComparisonReport compare_laws(const galerkin::SimConfig& cfg_a,
                              const galerkin::SimConfig& cfg_b,
                              const std::vector<Observable>& catalog,
                              double lambda, int paths, double level,
                              int threads) {
  require_same_equation(cfg_a, cfg_b);
  if (catalog.empty())
    throw std::invalid_argument("compare_laws: empty observable catalog");
  if (!(level > 0.0 && level < 1.0))
    throw std::invalid_argument("compare_laws: level outside (0,1)");

  LaplaceBatch A = laplace_batch(cfg_a, catalog, lambda, paths, threads);
  LaplaceBatch B = laplace_batch(cfg_b, catalog, lambda, paths, threads);
  if (A.blowups || B.blowups)
    throw std::runtime_error("compare_laws: blow-up inside the comparison run");

  ComparisonReport rep;
  rep.level = level;
  rep.lambda = lambda;
  rep.paths_a = rep.paths_b = paths;
  const double corrected = level / (2.0 * static_cast<double>(catalog.size()));
  rep.z_critical = stats::normal_quantile(1.0 - corrected);
  rep.pass = true;
  for (std::size_t j = 0; j < catalog.size(); ++j) {
    ObservableRow row;
    row.observable = catalog[j].name;
    row.est_a = A.estimates[j].value;
    row.se_a = A.estimates[j].std_error;
    row.est_b = B.estimates[j].value;
    row.se_b = B.estimates[j].std_error;
    double se = std::sqrt(row.se_a * row.se_a + row.se_b * row.se_b);
    double diff = row.est_a - row.est_b;
    row.z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : INFINITY);
    // truncation tails enter the allowance, not the statistic
    double allowance = rep.z_critical * se + A.estimates[j].tail_bound +
                       B.estimates[j].tail_bound;
    row.pass = std::fabs(diff) <= allowance;
    rep.max_abs_z = std::max(rep.max_abs_z, std::fabs(row.z));
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

LinearLaw exact_linear_law(const spectral::Spectrum& spec,
                           const noise::NoiseSpec& noise,
                           const spectral::ModeVector& x, double t) {
  if (t < 0.0) throw std::invalid_argument("exact_linear_law: negative time");
  if (static_cast<int>(x.size()) != spec.cutoff)
    throw std::invalid_argument("exact_linear_law: state length differs from cutoff");
  LinearLaw law;
  law.mean.resize(spec.cutoff);
  law.variance.resize(spec.cutoff);
  for (int k = 0; k < spec.cutoff; ++k) {
    double lam = spec.eigenvalues[k];
    double g = noise.gain(lam);
    law.mean[k] = std::exp(-t * lam) * x[k];
    law.variance[k] = g * g / (2.0 * lam) * (-std::expm1(-2.0 * t * lam));
  }
  return law;
}

CrossCheckReport kolmogorov_cross_check(const galerkin::SimConfig& projected,
                                        const Observable& f, double lambda,
                                        const CrossCheckOptions& opts) {
  const int m = projected.spec.cutoff;
  if (m > 4)
    throw std::invalid_argument("kolmogorov_cross_check: projection too large");

  // Both sides share the same projected drift B_m = P_m B P_m; the PDE route
  // solves the fixed point, the MC route simulates the same m-mode system.
  auto grid = std::make_shared<galerkin::Collocation>(projected.spec,
                                                      projected.oversample);
  kolmogorov::ProjectedProblem problem;
  problem.spec = projected.spec;
  problem.noise = projected.noise;
  problem.lambda = lambda;
  problem.beta = projected.drift.beta;
  problem.f = f;
  problem.gh_order = opts.gh_order;
  problem.drift_bound = opts.drift_bound;
  if (!projected.drift.f.is_zero() ||
      projected.drift.family == admissibility::Family::Burgers ||
      projected.drift.family == admissibility::Family::CahnHilliard) {
    const galerkin::DriftSpec drift = projected.drift;
    const spectral::Spectrum spec = projected.spec;
    problem.drift = [drift, spec, grid, m](const double* x, double* b) {
      spectral::ModeVector a(x, x + m);
      spectral::ModeVector out = galerkin::drift_eval(drift, spec, a, *grid);
      std::copy(out.begin(), out.end(), b);
    };
  }

  kolmogorov::Solution sol = kolmogorov::solve_mild(problem, opts.solve);

  CrossCheckReport rep;
  rep.lambda = lambda;
  rep.solve_status = sol.status;
  rep.contraction_factors = sol.contraction_factors;
  rep.pass = sol.status == kolmogorov::SolveStatus::Converged;

  for (const auto& x : opts.points) {
    if (static_cast<int>(x.size()) != m)
      throw std::invalid_argument("kolmogorov_cross_check: point dimension mismatch");
    galerkin::SimConfig cfg = projected;
    cfg.x0 = x;
    LaplaceEstimate mc = laplace_functional(cfg, f, lambda, opts.paths, opts.threads);
    CrossCheckRow row;
    row.x = x;
    row.u_pde = sol.value_at(x.data());
    row.u_mc = mc.value;
    row.mc_se = mc.std_error;
    row.mc_tail = mc.tail_bound;
    row.budget = 3.0 * (mc.std_error + mc.tail_bound + opts.solve.tol);
    row.pass = std::fabs(row.u_pde - row.u_mc) <= row.budget;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace spde::lawcmp
