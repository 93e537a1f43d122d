#include "spde/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "spde/quadrature.hpp"
#include "spde/rng.hpp"
#include "spde/stats.hpp"

namespace spde::kolmogorov {

namespace {

std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

// Gaussian sweep shared by R_t and the regularizers: E v(mean + diag(sd) Z).
// Tensor Gauss-Hermite up to the cap, Monte Carlo one dimension above it.
double gaussian_expect(const ScalarField& v, const double* mean,
                       const double* sd, int m, int gh_order, int cap,
                       int mc_samples, std::uint64_t mc_seed) {
  if (m <= cap) {
    const auto& gh = quad::gauss_hermite(gh_order);
    const int order = static_cast<int>(gh.nodes.size());
    const std::size_t total = ipow(order, m);
    const double norm = std::pow(M_PI, -0.5 * m);
    double y[4];
    stats::KahanSum acc;
    for (std::size_t flat = 0; flat < total; ++flat) {
      std::size_t rem = flat;
      double w = norm;
      for (int i = 0; i < m; ++i) {
        int d = static_cast<int>(rem % order);
        rem /= order;
        w *= gh.weights[d];
        y[i] = mean[i] + sd[i] * M_SQRT2 * gh.nodes[d];
      }
      acc.add(w * v(y, m));
    }
    return acc.value();
  }
  if (m > cap + 1)
    throw std::invalid_argument("gaussian_expect: dimension above the quadrature cap");
  stats::KahanSum acc;
  double y[8];
  for (int i = 0; i < mc_samples; ++i) {
    for (int k = 0; k < m; k += 2) {
      auto z = rng::normal_pair(mc_seed, i, 0, static_cast<std::uint32_t>(k >> 1));
      y[k] = mean[k] + sd[k] * z[0];
      if (k + 1 < m) y[k + 1] = mean[k + 1] + sd[k + 1] * z[1];
    }
    acc.add(v(y, m));
  }
  return acc.value() / mc_samples;
}

}  // namespace

double ou_apply(const ProjectedProblem& problem, const ScalarField& v, double t,
                const double* x) {
  const int m = problem.m();
  if (t < 0.0) throw std::invalid_argument("ou_apply: negative time");
  if (t == 0.0) return v(x, m);
  double mean[4], sd[4];
  if (m > 4) throw std::invalid_argument("ou_apply: m above cap");
  for (int k = 0; k < m; ++k) {
    double lam = problem.spec.eigenvalues[k];
    mean[k] = std::exp(-t * lam) * x[k];
    sd[k] = std::sqrt(noise::qt_mode(problem.spec, problem.noise, k, t));
  }
  return gaussian_expect(v, mean, sd, m, problem.gh_order, problem.quadrature_cap,
                         problem.mc_samples, problem.mc_seed);
}

namespace {

void regularizer_moments(const RegularizerSpec& reg, int m, const double* x,
                         double* mean, double* sd, double* contraction) {
  for (int k = 0; k < m; ++k) {
    double c = reg.c[k];
    if (!(c > 0.0))
      throw std::invalid_argument("regularizer: c_k must be positive");
    double damp = std::exp(-reg.eps * c);
    contraction[k] = damp;
    mean[k] = damp * x[k];
    sd[k] = std::sqrt(-std::expm1(-2.0 * reg.eps * c) / (2.0 * c));
  }
}

}  // namespace

void regularize_drift(const ProjectedProblem& problem, const RegularizerSpec& reg,
                      const double* x, double* out) {
  const int m = problem.m();
  if (static_cast<int>(reg.c.size()) != m)
    throw std::invalid_argument("regularize_drift: regularizer size mismatch");
  if (!problem.drift) {
    std::fill(out, out + m, 0.0);
    return;
  }
  if (!(reg.eps > 0.0)) {
    problem.drift(x, out);
    return;
  }
  double mean[4], sd[4], damp[4];
  regularizer_moments(reg, m, x, mean, sd, damp);
  for (int i = 0; i < m; ++i) {
    auto vi = [&problem, i](const double* y, int mm) {
      double b[4];
      (void)mm;
      problem.drift(y, b);
      return b[i];
    };
    out[i] = damp[i] * gaussian_expect(vi, mean, sd, m, problem.gh_order,
                                       problem.quadrature_cap, problem.mc_samples,
                                       problem.mc_seed);
  }
}

double regularize_f(const ProjectedProblem& problem, const RegularizerSpec& reg,
                    const double* x) {
  const int m = problem.m();
  if (static_cast<int>(reg.c.size()) != m)
    throw std::invalid_argument("regularize_f: regularizer size mismatch");
  if (!(reg.eps > 0.0)) return problem.f.eval(x, m);
  double mean[4], sd[4], damp[4];
  regularizer_moments(reg, m, x, mean, sd, damp);
  auto vf = [&problem](const double* y, int mm) { return problem.f.eval(y, mm); };
  return gaussian_expect(vf, mean, sd, m, problem.gh_order, problem.quadrature_cap,
                         problem.mc_samples, problem.mc_seed);
}

double lambda0(double c_r, double delta, double beta, double drift_bound) {
  double p = 0.5 - delta - beta;
  if (!(p > 0.0))
    throw std::invalid_argument("lambda0: requires delta + beta < 1/2");
  if (drift_bound == 0.0) return 0.0;
  double base = c_r * std::tgamma(p) * drift_bound;
  return std::pow(base, 1.0 / p);
}

namespace {

// psi(y) = E clip(K (decay y + sigma Z), +-1) in closed form; the catalog of
// the strong-Feller measurements is exactly this family, and quadrature of
// the near-sign members would need unreasonable orders.
double clip_linear_smoothed(double decay, double sigma, double kink, double y) {
  double mu = decay * y;
  if (sigma <= 0.0) return std::clamp(kink * mu, -1.0, 1.0);
  auto cdf = [](double z) { return 0.5 * std::erfc(-z / M_SQRT2); };
  auto pdf = [](double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); };
  double a = (-1.0 / kink - mu) / sigma;
  double b = (1.0 / kink - mu) / sigma;
  double mid = kink * (mu * (cdf(b) - cdf(a)) + sigma * (pdf(a) - pdf(b)));
  return -cdf(a) + (1.0 - cdf(b)) + mid;
}

}  // namespace

double estimate_smoothing_constant(const spectral::Spectrum& spec,
                                   const noise::NoiseSpec& noise, double gamma,
                                   int catalog_modes) {
  const double delta = noise.effective_delta();
  // steep enough that the kink width stays below every transition sd in the
  // measured window, otherwise the catalog caps the measurable gradient
  const double kink = 2000.0;
  catalog_modes = std::min(catalog_modes, spec.cutoff);

  double best = 0.0;
  for (double t = 1e-3; t <= 0.5; t *= 1.5) {
    for (int k = 0; k < catalog_modes; ++k) {
      double lam = spec.eigenvalues[k];
      double decay = std::exp(-t * lam);
      double sigma = std::sqrt(noise::qt_mode(spec, noise, k, t));
      if (sigma <= 0.0 || decay < 1e-14) continue;
      double scale = (1.0 / kink + sigma) / std::max(decay, 1e-10);
      double sup = 0.0;
      for (int i = -20; i <= 20; ++i) {
        double y = scale * i / 20.0;
        double dy = 0.02 * scale;
        double d = (clip_linear_smoothed(decay, sigma, kink, y + dy) -
                    clip_linear_smoothed(decay, sigma, kink, y - dy)) /
                   (2.0 * dy);
        sup = std::max(sup, std::fabs(d));
      }
      best = std::max(best,
                      std::pow(t, 0.5 + delta + gamma) * std::pow(lam, gamma) * sup);
    }
  }
  return 1.5 * best;
}

// --- solution grid ---------------------------------------------------------

namespace {

struct GridGeom {
  int m = 1;
  int pts = 2;
  double R = 1.0;
  double spacing = 1.0;
  std::vector<double> coords;
  std::size_t total = 0;

  static GridGeom make(int m, int pts, double R) {
    GridGeom g;
    g.m = m;
    g.pts = pts;
    g.R = R;
    g.spacing = 2.0 * R / (pts - 1);
    g.coords.resize(pts);
    for (int i = 0; i < pts; ++i) g.coords[i] = -R + g.spacing * i;
    g.total = ipow(pts, m);
    return g;
  }

  void decode(std::size_t flat, int* idx) const {
    for (int i = m - 1; i >= 0; --i) {
      idx[i] = static_cast<int>(flat % pts);
      flat /= pts;
    }
  }
  std::size_t encode(const int* idx) const {
    std::size_t f = 0;
    for (int i = 0; i < m; ++i) f = f * pts + idx[i];
    return f;
  }
};

void central_gradient(const GridGeom& g, const std::vector<double>& u,
                      std::vector<std::vector<double>>& du) {
  du.assign(g.m, std::vector<double>(g.total, 0.0));
  std::vector<int> idx(g.m);
  for (std::size_t flat = 0; flat < g.total; ++flat) {
    g.decode(flat, idx.data());
    for (int ax = 0; ax < g.m; ++ax) {
      int i = idx[ax];
      double v;
      std::size_t stride = ipow(g.pts, g.m - 1 - ax);
      if (i == 0)
        v = (u[flat + stride] - u[flat]) / g.spacing;
      else if (i == g.pts - 1)
        v = (u[flat] - u[flat - stride]) / g.spacing;
      else
        v = (u[flat + stride] - u[flat - stride]) / (2.0 * g.spacing);
      du[ax][flat] = v;
    }
  }
}

double interp_clamped(const GridGeom& g, const std::vector<double>& field,
                      const double* x) {
  // multilinear with constant continuation outside the box
  int base[4];
  double frac[4];
  for (int i = 0; i < g.m; ++i) {
    double s = (x[i] + g.R) / g.spacing;
    if (s <= 0.0) { base[i] = 0; frac[i] = 0.0; }
    else if (s >= g.pts - 1) { base[i] = g.pts - 2; frac[i] = 1.0; }
    else {
      base[i] = static_cast<int>(s);
      frac[i] = s - base[i];
    }
  }
  double acc = 0.0;
  const int corners = 1 << g.m;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    int idx[4];
    for (int i = 0; i < g.m; ++i) {
      int bit = (c >> i) & 1;
      idx[i] = base[i] + bit;
      w *= bit ? frac[i] : (1.0 - frac[i]);
    }
    if (w != 0.0) acc += w * field[g.encode(idx)];
  }
  return acc;
}

GridGeom geom_of(const Solution& sol) {
  return GridGeom::make(sol.m, sol.points_per_dim, sol.radius);
}

}  // namespace

double Solution::value_at(const double* x) const {
  return interp_clamped(geom_of(*this), u, x);
}

void Solution::gradient_at(const double* x, double* g) const {
  GridGeom geom = geom_of(*this);
  for (int i = 0; i < m; ++i) g[i] = interp_clamped(geom, du[i], x);
}

double Solution::sup_u() const {
  double s = 0.0;
  for (double v : u) s = std::max(s, std::fabs(v));
  return s;
}

double Solution::sup_du() const {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double norm2 = 0.0;
    for (const auto& comp : du) norm2 += comp[i] * comp[i];
    s = std::max(s, std::sqrt(norm2));
  }
  return s;
}

Solution solve_mild(const ProjectedProblem& problem, const SolveOptions& opts) {
  const int m = problem.m();
  if (m < 1 || m > problem.quadrature_cap + 1)
    throw std::invalid_argument("solve_mild: m outside the quadrature range");
  if (!(problem.lambda > 0.0))
    throw std::invalid_argument("solve_mild: lambda must be positive");

  // state-space box from the stationary covariance
  double sigma_inf = 0.0;
  for (int k = 0; k < m; ++k) {
    double lam = problem.spec.eigenvalues[k];
    double g = problem.noise.gain(lam);
    sigma_inf = std::max(sigma_inf, g / std::sqrt(2.0 * lam));
  }
  GridGeom geom = GridGeom::make(m, opts.grid.points_per_dim,
                                 opts.grid.radius_sigmas * sigma_inf);

  Solution sol;
  sol.m = m;
  sol.points_per_dim = geom.pts;
  sol.radius = geom.R;
  sol.coords = geom.coords;
  sol.tol = opts.tol;

  // data (possibly regularised; the smoothing integrals are evaluated
  // directly so the fixed point sees smooth fields, not interpolants)
  std::function<void(const double*, double*)> drift_fn;
  std::function<double(const double*)> f_fn;
  if (opts.regularizer && opts.regularizer->eps > 0.0) {
    const RegularizerSpec reg = *opts.regularizer;
    drift_fn = [&problem, reg](const double* x, double* b) {
      regularize_drift(problem, reg, x, b);
    };
    f_fn = [&problem, reg](const double* x) {
      return regularize_f(problem, reg, x);
    };
  } else {
    drift_fn = problem.drift;
    f_fn = [&problem, m](const double* x) { return problem.f.eval(x, m); };
  }
  const bool has_drift = static_cast<bool>(problem.drift);

  // time quadrature of integral_0^T e^{-lambda t} R_t[...] dt: truncate where
  // the tail bound e^{-lambda T}(sup f + B sup Du)/lambda < tol/10, then
  // log-dyadic Gauss-Legendre down to a negligible floor.
  const double g_scale = problem.f.sup_bound + problem.drift_bound + 1.0;
  double t_end = std::log(10.0 * g_scale * (1.0 + 1.0 / problem.lambda) / opts.tol) /
                 problem.lambda;
  t_end = std::max(t_end, 1.0 / problem.lambda);
  struct TNode { double t, w; };
  std::vector<TNode> nodes;
  {
    const auto& rule = quad::gauss_legendre(opts.time_order);
    double hi = t_end;
    for (int j = 0; j < opts.time_octaves; ++j) {
      double lo = 0.5 * hi;
      double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double t = mid + half * rule.nodes[i];
        nodes.push_back({t, half * rule.weights[i] * std::exp(-problem.lambda * t)});
      }
      hi = lo;
    }
    nodes.push_back({0.0, hi});  // R_0 g = g on the leftover sliver
  }

  // per-node OU transition data
  std::vector<std::vector<double>> node_decay(nodes.size()),
      node_sd(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    node_decay[i].resize(m);
    node_sd[i].resize(m);
    for (int k = 0; k < m; ++k) {
      double lam = problem.spec.eigenvalues[k];
      node_decay[i][k] = std::exp(-nodes[i].t * lam);
      node_sd[i][k] =
          nodes[i].t == 0.0
              ? 0.0
              : std::sqrt(noise::qt_mode(problem.spec, problem.noise, k, nodes[i].t));
    }
  }

  // Picard iteration
  std::vector<double> u(geom.total, 0.0), u_new(geom.total, 0.0);
  std::vector<std::vector<double>> du;
  if (opts.start_from_f_over_lambda) {
    std::vector<int> idx(m);
    double x[4];
    for (std::size_t flat = 0; flat < geom.total; ++flat) {
      geom.decode(flat, idx.data());
      for (int i = 0; i < m; ++i) x[i] = geom.coords[idx[i]];
      u[flat] = f_fn(x) / problem.lambda;
    }
  }
  central_gradient(geom, u, du);

  const auto& gh = quad::gauss_hermite(problem.gh_order);
  const int order = static_cast<int>(gh.nodes.size());
  const double gh_norm = std::pow(M_PI, -0.5 * m);
  const std::size_t gh_total = ipow(order, m);

  auto g_eval = [&](const double* y) {
    double v = f_fn(y);
    if (has_drift) {
      double b[4], dgrad[4];
      drift_fn(y, b);
      for (int i = 0; i < m; ++i) dgrad[i] = interp_clamped(geom, du[i], y);
      for (int i = 0; i < m; ++i) v += b[i] * dgrad[i];
    }
    return v;
  };

  double prev_increment = -1.0;
  int consecutive_expanding = 0;
  std::vector<int> idx(m);
  std::vector<std::vector<double>> du_new;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (std::size_t flat = 0; flat < geom.total; ++flat) {
      geom.decode(flat, idx.data());
      double x[4];
      for (int i = 0; i < m; ++i) x[i] = geom.coords[idx[i]];
      stats::KahanSum acc;
      for (std::size_t ni = 0; ni < nodes.size(); ++ni) {
        double mean[4];
        for (int i = 0; i < m; ++i) mean[i] = node_decay[ni][i] * x[i];
        double rt;
        if (nodes[ni].t == 0.0) {
          rt = g_eval(mean);
        } else {
          double s = 0.0;
          double y[4];
          for (std::size_t q = 0; q < gh_total; ++q) {
            std::size_t rem = q;
            double w = gh_norm;
            for (int i = 0; i < m; ++i) {
              int dd = static_cast<int>(rem % order);
              rem /= order;
              w *= gh.weights[dd];
              y[i] = mean[i] + node_sd[ni][i] * M_SQRT2 * gh.nodes[dd];
            }
            s += w * g_eval(y);
          }
          rt = s;
        }
        acc.add(nodes[ni].w * rt);
      }
      u_new[flat] = acc.value();
    }
    central_gradient(geom, u_new, du_new);

    double inc_u = 0.0, inc_du = 0.0;
    for (std::size_t i = 0; i < geom.total; ++i)
      inc_u = std::max(inc_u, std::fabs(u_new[i] - u[i]));
    for (int ax = 0; ax < m; ++ax)
      for (std::size_t i = 0; i < geom.total; ++i)
        inc_du = std::max(inc_du, std::fabs(du_new[ax][i] - du[ax][i]));
    double increment = inc_u + inc_du;

    u.swap(u_new);
    du.swap(du_new);

    if (prev_increment > 0.0)
      sol.contraction_factors.push_back(increment / prev_increment);
    sol.final_increment = increment;

    if (!sol.contraction_factors.empty() && sol.contraction_factors.back() >= 1.0)
      ++consecutive_expanding;
    else
      consecutive_expanding = 0;
    if (consecutive_expanding >= 2) {
      sol.status = SolveStatus::NonContraction;
      break;
    }
    if (increment <= opts.tol && sweep >= 1) {
      sol.status = SolveStatus::Converged;
      break;
    }
    prev_increment = increment;
  }
  sol.u = std::move(u);
  sol.du = std::move(du);
  return sol;
}

std::vector<double> residual_strong(const ProjectedProblem& problem,
                                    const Solution& sol,
                                    const std::vector<std::vector<double>>& points,
                                    const RegularizerSpec& reg,
                                    bool fourth_order) {
  GridGeom geom = geom_of(sol);
  const int m = sol.m;
  std::vector<double> out;
  out.reserve(points.size());
  const int margin = fourth_order ? 2 : 1;
  for (const auto& pt : points) {
    if (static_cast<int>(pt.size()) != m)
      throw std::invalid_argument("residual_strong: point dimension mismatch");
    // snap to the nearest interior grid node; stencils live on the grid
    int idx[4];
    double x[4];
    for (int i = 0; i < m; ++i) {
      int j = static_cast<int>(std::lround((pt[i] + geom.R) / geom.spacing));
      idx[i] = std::clamp(j, margin, geom.pts - 1 - margin);
      x[i] = geom.coords[idx[i]];
    }
    std::size_t flat = geom.encode(idx);
    double lap_term = 0.0, adv_term = 0.0;
    for (int ax = 0; ax < m; ++ax) {
      std::size_t stride = ipow(geom.pts, m - 1 - ax);
      double d1, d2;
      if (fourth_order) {
        double um2 = sol.u[flat - 2 * stride], um1 = sol.u[flat - stride];
        double up1 = sol.u[flat + stride], up2 = sol.u[flat + 2 * stride];
        d1 = (um2 - 8.0 * um1 + 8.0 * up1 - up2) / (12.0 * geom.spacing);
        d2 = (-um2 + 16.0 * um1 - 30.0 * sol.u[flat] + 16.0 * up1 - up2) /
             (12.0 * geom.spacing * geom.spacing);
      } else {
        d1 = (sol.u[flat + stride] - sol.u[flat - stride]) / (2.0 * geom.spacing);
        d2 = (sol.u[flat + stride] - 2.0 * sol.u[flat] + sol.u[flat - stride]) /
             (geom.spacing * geom.spacing);
      }
      double lam = problem.spec.eigenvalues[ax];
      double g = problem.noise.gain(lam);
      lap_term += g * g * d2;
      adv_term += lam * x[ax] * d1;
    }
    double b[4], grad[4];
    regularize_drift(problem, reg, x, b);
    double feps = regularize_f(problem, reg, x);
    for (int ax = 0; ax < m; ++ax) {
      std::size_t stride = ipow(geom.pts, m - 1 - ax);
      grad[ax] = (sol.u[flat + stride] - sol.u[flat - stride]) / (2.0 * geom.spacing);
    }
    double bdu = 0.0;
    for (int ax = 0; ax < m; ++ax) bdu += b[ax] * grad[ax];
    double res = problem.lambda * sol.u[flat] - 0.5 * lap_term + adv_term - feps - bdu;
    out.push_back(res);
  }
  return out;
}

SmoothingReport verify_smoothing(const spectral::Spectrum& spec,
                                 const noise::NoiseSpec& noise,
                                 const std::vector<double>& t_grid, double gamma,
                                 int modes, double kink_scale) {
  if (gamma < 0.0)
    throw std::invalid_argument("verify_smoothing: gamma must be >= 0");
  modes = std::min(modes, spec.cutoff);

  SmoothingReport rep;
  rep.t = t_grid;
  for (double t : t_grid) {
    double sup_plain = 0.0, sup_gamma = 0.0;
    for (int k = 0; k < modes; ++k) {
      double lam = spec.eigenvalues[k];
      double decay = std::exp(-t * lam);
      if (decay < 1e-13) continue;
      double sigma = std::sqrt(noise::qt_mode(spec, noise, k, t));
      double scale = (1.0 / kink_scale + sigma) / decay;
      double sup = 0.0;
      for (int i = -16; i <= 16; ++i) {
        double y = scale * i / 16.0;
        double dy = 0.02 * scale;
        double d = (clip_linear_smoothed(decay, sigma, kink_scale, y + dy) -
                    clip_linear_smoothed(decay, sigma, kink_scale, y - dy)) /
                   (2.0 * dy);
        sup = std::max(sup, std::fabs(d));
      }
      sup_plain = std::max(sup_plain, sup);
      sup_gamma = std::max(sup_gamma, std::pow(lam, gamma) * sup);
    }
    rep.grad_sup.push_back(sup_plain);
    rep.grad_gamma_sup.push_back(sup_gamma);
  }
  rep.slope = stats::loglog_slope(rep.t, rep.grad_sup);
  rep.slope_gamma = stats::loglog_slope(rep.t, rep.grad_gamma_sup);
  return rep;
}

double trace_remainder(const ProjectedProblem& problem, const Solution& sol,
                       int j, const std::vector<std::vector<double>>& points) {
  const int m = sol.m;
  if (j < 0 || j > m)
    throw std::invalid_argument("trace_remainder: j outside [0, m]");
  if (j == m) return 0.0;
  GridGeom geom = geom_of(sol);
  stats::KahanSum acc;
  for (const auto& pt : points) {
    int idx[4];
    for (int i = 0; i < m; ++i) {
      int q = static_cast<int>(std::lround((pt[i] + geom.R) / geom.spacing));
      idx[i] = std::clamp(q, 1, geom.pts - 2);
    }
    std::size_t flat = geom.encode(idx);
    double sum = 0.0;
    for (int ax = j; ax < m; ++ax) {
      std::size_t stride = ipow(geom.pts, m - 1 - ax);
      double d2 = (sol.u[flat + stride] - 2.0 * sol.u[flat] + sol.u[flat - stride]) /
                  (geom.spacing * geom.spacing);
      double lam = problem.spec.eigenvalues[ax];
      double g = problem.noise.gain(lam);
      sum += g * g * d2;
    }
    acc.add(sum);
  }
  return acc.value() / static_cast<double>(points.size());
}

}  // namespace spde::kolmogorov
