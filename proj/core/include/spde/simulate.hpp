#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>

#include "spde/drift.hpp"
#include "spde/noise.hpp"
#include "spde/spectral.hpp"

namespace spde::galerkin {

// One simulation setup: dX + AX dt = B(X) dt + G dW truncated to the first n
// modes, advanced with the exponential-Euler mild step
//
//   a_k+ = e^{-h lam_k} a_k + (1 - e^{-h lam_k})/lam_k b_k(a) + eta_k,
//   eta_k ~ N(0, g_k^2 (1 - e^{-2 h lam_k}) / (2 lam_k))
//
// so the linear and noise parts carry no discretization error; all time-
// stepping bias sits in the drift term.
struct SimConfig {
  spectral::Spectrum spec;
  noise::NoiseSpec noise;
  DriftSpec drift;
  spectral::ModeVector x0;
  double T = 1.0;
  double h = 0.0;  // 0 -> default T/2048
  std::uint64_t seed = 0;
  std::optional<double> trunc_level;  // drift truncation Pi_N
  double noise_scale = 1.0;
  double blowup_threshold = 1e12;
  int oversample = 4;

  int steps() const;
  double step_size() const { return h > 0.0 ? h : T / 2048.0; }
};

constexpr double kNeverStopped = std::numeric_limits<double>::infinity();

struct StoppingRecord {
  double level = 0.0;
  double tau = kNeverStopped;  // first grid time with ||a||_{2 alpha} > level
};

struct PathResult {
  bool blew_up = false;
  double blowup_time = 0.0;
  spectral::ModeVector last_state;
  std::optional<StoppingRecord> stopping;
};

struct GalerkinPath {
  std::vector<double> times;
  std::vector<spectral::ModeVector> states;  // filled when recording
  PathResult result;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

// Batched engine. Paths are addressed by index; the per-(path, step, mode)
// noise streams make any path reproducible in isolation and make increments
// across different cutoffs coincide on the shared mode prefix.
class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }
  int modes() const { return n_; }
  int steps() const { return steps_; }
  double dt() const { return h_; }

  // In-place single step of one path (unit tests, couplings).
  void step_single(spectral::ModeVector& a, std::uint64_t path_index,
                   std::uint64_t step_index) const;

  GalerkinPath run_path(std::uint64_t path_index, bool record_states = false) const;

  // sink(step_index, t, states, n, count, first) is called after every step
  // with the column-major state block of the paths [first, first+count).
  // Paths that blow up are frozen at their last finite state and reported.
  using StepSink = std::function<void(int step, double t, const double* states,
                                      int n, int count, std::uint64_t first)>;
  std::vector<PathResult> run_batch(std::uint64_t first, int count,
                                    const StepSink& sink) const;

  // Thread-parallel driver; results are indexed by path and independent of
  // the partitioning. The sink factory is invoked once per worker.
  std::vector<PathResult> run_paths(
      std::uint64_t first, int count, int threads,
      const std::function<StepSink(int worker)>& sink_factory) const;

 private:
  void drift_block(const double* states, double* out, int count,
                   std::vector<double>& work) const;

  SimConfig cfg_;
  Collocation grid_;
  int n_ = 0;
  int steps_ = 0;
  double h_ = 0.0;
  bool drift_zero_ = false;
  std::vector<double> decay_;     // e^{-h lam}
  std::vector<double> drift_w_;   // (1 - e^{-h lam}) / lam
  std::vector<double> noise_sd_;  // exact OU increment std dev
  std::vector<double> lam_alpha_;
  std::vector<double> lam_beta_;
};

struct CoupleReport {
  // per path: sup_t || P_{n1} X_{n2}(t) - X_{n1}(t) ||_H
  std::vector<double> sup_difference;
  // per path: sup_t || X_{n2}(t) ||_{2s} for the configured observation index
  std::vector<double> sup_norm_fine;
  double median_sup_difference = 0.0;
};

// Runs the same scenario at cutoffs n1 < n2 with identical noise on the
// shared modes and reports the resolution gap path by path.
CoupleReport couple_resolutions(const SimConfig& base, int n1, int n2,
                                int paths, double norm_exponent = 0.0);

// First grid time with ||a(t)||_{2 alpha} > level along a recorded path
// (kNeverStopped when the level is never exceeded); nondecreasing in level.
double stopping_time(const GalerkinPath& path, const spectral::Spectrum& spec,
                     double alpha, double level);

}  // namespace spde::galerkin
