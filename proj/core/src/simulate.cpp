#include "spde/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "spde/rng.hpp"

namespace spde::galerkin {

int SimConfig::steps() const {
  double hh = step_size();
  int m = static_cast<int>(std::llround(T / hh));
  return std::max(m, 1);
}

Simulator::Simulator(const SimConfig& cfg)
    : cfg_(cfg), grid_(cfg.spec, cfg.oversample) {
  n_ = cfg_.spec.cutoff;
  if (static_cast<int>(cfg_.x0.size()) != n_)
    throw std::invalid_argument("Simulator: initial datum length differs from cutoff");
  if (!(cfg_.T > 0.0)) throw std::invalid_argument("Simulator: T must be positive");
  h_ = cfg_.step_size();
  if (!(h_ > 0.0)) throw std::invalid_argument("Simulator: step must be positive");
  steps_ = cfg_.steps();
  drift_zero_ = cfg_.drift.family != admissibility::Family::Burgers &&
                cfg_.drift.family != admissibility::Family::CahnHilliard &&
                cfg_.drift.f.is_zero();

  decay_.resize(n_);
  drift_w_.resize(n_);
  noise_sd_.resize(n_);
  lam_alpha_.resize(n_);
  lam_beta_.resize(n_);
  for (int k = 0; k < n_; ++k) {
    double lam = cfg_.spec.eigenvalues[k];
    double e1 = -std::expm1(-h_ * lam);  // 1 - e^{-h lam}
    decay_[k] = 1.0 - e1;
    drift_w_[k] = e1 / lam;
    double g = cfg_.noise.gain(lam);
    noise_sd_[k] = cfg_.noise_scale * g *
                   std::sqrt(-std::expm1(-2.0 * h_ * lam) / (2.0 * lam));
    lam_alpha_[k] = std::pow(lam, cfg_.drift.alpha);
    lam_beta_[k] = std::pow(lam, cfg_.drift.beta);
  }
}

void Simulator::drift_block(const double* states, double* out, int count,
                            std::vector<double>& work) const {
  using admissibility::Family;
  const Family fam = cfg_.drift.family;
  if (!cfg_.trunc_level && cfg_.drift.diagonal_linear()) {
    const double cc = cfg_.drift.f.poly[1];
    const std::size_t total = static_cast<std::size_t>(n_) * count;
    for (std::size_t i = 0; i < total; ++i) out[i] = cc * states[i];
    return;
  }
  const bool batchable = !cfg_.trunc_level &&
                         (fam == Family::HeatPerturb || fam == Family::HeatPolynomial ||
                          fam == Family::DivergenceSub || fam == Family::DivergenceSuper ||
                          fam == Family::NonDivergence);
  if (batchable) {
    const int q = grid_.points();
    const std::size_t grid_size = static_cast<std::size_t>(q) * count;
    const std::size_t state_size = static_cast<std::size_t>(n_) * count;
    work.resize(grid_size + (fam == Family::NonDivergence ? state_size : 0));
    double* values = work.data();
    const double* in = states;
    if (fam == Family::NonDivergence) {
      double* scaled = work.data() + grid_size;
      for (int c = 0; c < count; ++c) {
        const double* a = states + static_cast<std::size_t>(c) * n_;
        double* sa = scaled + static_cast<std::size_t>(c) * n_;
        for (int k = 0; k < n_; ++k) sa[k] = lam_alpha_[k] * a[k];
      }
      in = scaled;
    }
    grid_.synth_batch(in, values, count);
    const auto& f = cfg_.drift.f;
    for (std::size_t i = 0; i < grid_size; ++i) values[i] = f(values[i]);
    grid_.analyze_batch(values, out, count);
    if (fam == Family::DivergenceSub || fam == Family::DivergenceSuper) {
      for (int c = 0; c < count; ++c) {
        double* b = out + static_cast<std::size_t>(c) * n_;
        for (int k = 0; k < n_; ++k) b[k] *= lam_beta_[k];
      }
    }
    return;
  }
  for (int c = 0; c < count; ++c) {
    spectral::ModeVector a(states + static_cast<std::size_t>(c) * n_,
                           states + static_cast<std::size_t>(c + 1) * n_);
    spectral::ModeVector b =
        cfg_.trunc_level
            ? truncate_drift(cfg_.drift, *cfg_.trunc_level, cfg_.spec, a, grid_)
            : drift_eval(cfg_.drift, cfg_.spec, a, grid_);
    std::copy(b.begin(), b.end(), out + static_cast<std::size_t>(c) * n_);
  }
}

void Simulator::step_single(spectral::ModeVector& a, std::uint64_t path_index,
                            std::uint64_t step_index) const {
  if (static_cast<int>(a.size()) != n_)
    throw std::invalid_argument("step_single: state length differs from cutoff");
  spectral::ModeVector b;
  if (!drift_zero_) {
    b = cfg_.trunc_level
            ? truncate_drift(cfg_.drift, *cfg_.trunc_level, cfg_.spec, a, grid_)
            : drift_eval(cfg_.drift, cfg_.spec, a, grid_);
  }
  for (int k = 0; k < n_; ++k) {
    double z = rng::normal_pair(cfg_.seed, path_index, step_index,
                                static_cast<std::uint32_t>(k >> 1))[k & 1];
    double v = decay_[k] * a[k] + noise_sd_[k] * z;
    if (!drift_zero_) v += drift_w_[k] * b[k];
    a[k] = v;
  }
  for (double v : a)
    if (!std::isfinite(v))
      throw std::runtime_error("step_single: state left the finite range");
}

std::vector<PathResult> Simulator::run_batch(std::uint64_t first, int count,
                                             const StepSink& sink) const {
  std::vector<PathResult> results(count);
  std::vector<double> states(static_cast<std::size_t>(n_) * count);
  for (int c = 0; c < count; ++c)
    std::copy(cfg_.x0.begin(), cfg_.x0.end(),
              states.begin() + static_cast<std::size_t>(c) * n_);

  std::vector<char> dead(count, 0);
  std::vector<double> drift(drift_zero_ ? 0 : states.size());
  std::vector<double> work;

  const double alpha = cfg_.drift.alpha;
  const bool track_stop = cfg_.trunc_level.has_value();
  if (track_stop) {
    double norm0 = spectral::sobolev_norm(cfg_.spec, alpha, cfg_.x0);
    double tau0 = norm0 > *cfg_.trunc_level ? 0.0 : kNeverStopped;
    for (int c = 0; c < count; ++c)
      results[c].stopping = StoppingRecord{*cfg_.trunc_level, tau0};
  }

  std::vector<double> prev_state(n_);
  for (int s = 0; s < steps_; ++s) {
    if (!drift_zero_) drift_block(states.data(), drift.data(), count, work);
    const double t_next = (s + 1) * h_;
    for (int c = 0; c < count; ++c) {
      if (dead[c]) continue;
      double* a = states.data() + static_cast<std::size_t>(c) * n_;
      std::copy(a, a + n_, prev_state.begin());
      const double* b = drift_zero_ ? nullptr : drift.data() + static_cast<std::size_t>(c) * n_;
      const std::uint64_t path = first + c;
      for (int k = 0; k < n_; k += 2) {
        auto z = rng::normal_pair(cfg_.seed, path, s,
                                  static_cast<std::uint32_t>(k >> 1));
        double v = decay_[k] * a[k] + noise_sd_[k] * z[0];
        if (b) v += drift_w_[k] * b[k];
        a[k] = v;
        if (k + 1 < n_) {
          double w = decay_[k + 1] * a[k + 1] + noise_sd_[k + 1] * z[1];
          if (b) w += drift_w_[k + 1] * b[k + 1];
          a[k + 1] = w;
        }
      }
      double norm2 = 0.0;
      bool finite = true;
      for (int k = 0; k < n_; ++k) {
        if (!std::isfinite(a[k])) { finite = false; break; }
        norm2 += a[k] * a[k];
      }
      if (!finite || norm2 > cfg_.blowup_threshold * cfg_.blowup_threshold) {
        dead[c] = 1;
        results[c].blew_up = true;
        results[c].blowup_time = t_next;
        results[c].last_state = prev_state;  // last finite state
        std::copy(prev_state.begin(), prev_state.end(), a);  // freeze
        continue;
      }
      if (track_stop && results[c].stopping->tau == kNeverStopped) {
        spectral::ModeVector av(a, a + n_);
        if (spectral::sobolev_norm(cfg_.spec, alpha, av) > *cfg_.trunc_level)
          results[c].stopping->tau = t_next;
      }
    }
    if (sink) sink(s + 1, t_next, states.data(), n_, count, first);
  }
  for (int c = 0; c < count; ++c) {
    if (!results[c].blew_up) {
      const double* a = states.data() + static_cast<std::size_t>(c) * n_;
      results[c].last_state.assign(a, a + n_);
    }
  }
  return results;
}

GalerkinPath Simulator::run_path(std::uint64_t path_index, bool record_states) const {
  GalerkinPath out;
  out.seed = cfg_.seed;
  out.path_index = path_index;
  out.times.reserve(steps_ + 1);
  out.times.push_back(0.0);
  if (record_states) {
    out.states.reserve(steps_ + 1);
    out.states.push_back(cfg_.x0);
  }
  auto sink = [&](int, double t, const double* states, int n, int, std::uint64_t) {
    out.times.push_back(t);
    if (record_states) out.states.emplace_back(states, states + n);
  };
  auto results = run_batch(path_index, 1, sink);
  out.result = std::move(results[0]);
  return out;
}

std::vector<PathResult> Simulator::run_paths(
    std::uint64_t first, int count, int threads,
    const std::function<StepSink(int worker)>& sink_factory) const {
  threads = std::max(1, threads);
  if (threads == 1 || count < 2 * threads) {
    StepSink sink = sink_factory ? sink_factory(0) : StepSink{};
    return run_batch(first, count, sink);
  }
  std::vector<PathResult> all(count);
  std::vector<std::thread> pool;
  const int chunk = (count + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const int lo = w * chunk;
    const int len = std::min(chunk, count - lo);
    if (len <= 0) break;
    pool.emplace_back([this, &all, &sink_factory, first, lo, len, w]() {
      StepSink sink = sink_factory ? sink_factory(w) : StepSink{};
      auto part = run_batch(first + lo, len, sink);
      std::copy(part.begin(), part.end(), all.begin() + lo);
    });
  }
  for (auto& th : pool) th.join();
  return all;
}

CoupleReport couple_resolutions(const SimConfig& base, int n1, int n2,
                                int paths, double norm_exponent) {
  if (!(n1 >= 1 && n1 < n2))
    throw std::invalid_argument("couple_resolutions: need 1 <= n1 < n2");

  SimConfig coarse = base;
  SimConfig fine = base;
  auto rebuild = [&](SimConfig& cfg, int n) {
    std::array<double, 3> len = cfg.spec.lengths;
    cfg.spec = spectral::build_spectrum(
        cfg.spec.dimension, cfg.spec.bc,
        std::span<const double>(len.data(), cfg.spec.dimension), n, cfg.spec.power);
    cfg.x0.resize(n, 0.0);
  };
  if (static_cast<int>(base.x0.size()) < n2)
    throw std::invalid_argument("couple_resolutions: initial datum shorter than n2");
  rebuild(coarse, n1);
  rebuild(fine, n2);
  std::copy(base.x0.begin(), base.x0.begin() + n1, coarse.x0.begin());
  std::copy(base.x0.begin(), base.x0.begin() + n2, fine.x0.begin());

  Simulator sim1(coarse);
  Simulator sim2(fine);
  const int steps = sim1.steps();
  if (steps != sim2.steps())
    throw std::logic_error("couple_resolutions: step mismatch");

  CoupleReport report;
  report.sup_difference.resize(paths, 0.0);
  report.sup_norm_fine.resize(paths, 0.0);

  for (int p = 0; p < paths; ++p) {
    spectral::ModeVector a1 = coarse.x0;
    spectral::ModeVector a2 = fine.x0;
    double sup_diff = 0.0, sup_norm = 0.0;
    for (int s = 0; s < steps; ++s) {
      sim1.step_single(a1, p, s);
      sim2.step_single(a2, p, s);
      double d2 = 0.0;
      for (int k = 0; k < n1; ++k) {
        double dk = a2[k] - a1[k];
        d2 += dk * dk;
      }
      sup_diff = std::max(sup_diff, std::sqrt(d2));
      sup_norm = std::max(sup_norm,
                          spectral::sobolev_norm(fine.spec, norm_exponent, a2));
    }
    report.sup_difference[p] = sup_diff;
    report.sup_norm_fine[p] = sup_norm;
  }
  std::vector<double> sorted = report.sup_difference;
  std::sort(sorted.begin(), sorted.end());
  report.median_sup_difference = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];
  return report;
}

double stopping_time(const GalerkinPath& path, const spectral::Spectrum& spec,
                     double alpha, double level) {
  if (path.states.size() != path.times.size())
    throw std::invalid_argument("stopping_time: path was not recorded with states");
  for (std::size_t i = 0; i < path.states.size(); ++i)
    if (spectral::sobolev_norm(spec, alpha, path.states[i]) > level)
      return path.times[i];
  return kNeverStopped;
}

}  // namespace spde::galerkin
