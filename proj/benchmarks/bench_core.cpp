#include <benchmark/benchmark.h>

#include <random>

#include "spde/drift.hpp"
#include "spde/noise.hpp"
#include "spde/rng.hpp"
#include "spde/simulate.hpp"

using namespace spde;
using spectral::Boundary;

namespace {

galerkin::SimConfig heat_config(int n) {
  galerkin::SimConfig cfg;
  double L = 1.0;
  cfg.spec = spectral::build_spectrum(1, Boundary::Dirichlet, std::span(&L, 1), n);
  cfg.noise = noise::NoiseSpec::colored(0.3);
  cfg.drift.family = admissibility::Family::HeatPerturb;
  cfg.drift.f.sine_amp = 1.0;
  cfg.drift.f.clip = 0.5;
  cfg.x0.assign(n, 0.0);
  cfg.x0[0] = 1.0;
  cfg.T = 1.0;
  cfg.h = 1.0 / 64.0;
  cfg.seed = 1;
  return cfg;
}

}  // namespace

static void BM_PhiloxNormals(benchmark::State& state) {
  std::uint64_t i = 0;
  double acc = 0.0;
  for (auto _ : state) {
    auto z = rng::normal_pair(7, i++, 12, 3);
    acc += z[0] + z[1];
  }
  benchmark::DoNotOptimize(acc);
  state.SetItemsProcessed(2 * state.iterations());
}
BENCHMARK(BM_PhiloxNormals);

static void BM_DriftTransform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  galerkin::SimConfig cfg = heat_config(n);
  galerkin::Collocation grid(cfg.spec, 4);
  spectral::ModeVector a(n);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double& v : a) v = unif(rng);
  for (auto _ : state) {
    auto b = galerkin::drift_eval(cfg.drift, cfg.spec, a, grid);
    benchmark::DoNotOptimize(b.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_DriftTransform)->Arg(16)->Arg(32)->Arg(64);

static void BM_PathSteps(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  galerkin::SimConfig cfg = heat_config(n);
  galerkin::Simulator sim(cfg);
  std::uint64_t path = 0;
  for (auto _ : state) {
    state.PauseTiming();
    spectral::ModeVector a = cfg.x0;
    state.ResumeTiming();
    for (int s = 0; s < 64; ++s) sim.step_single(a, path, s);
    ++path;
    benchmark::DoNotOptimize(a.data());
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_PathSteps)->Arg(16)->Arg(32);

static void BM_BatchSteps(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  galerkin::SimConfig cfg = heat_config(n);
  cfg.h = 1.0 / 512.0;
  galerkin::Simulator sim(cfg);
  for (auto _ : state) {
    auto res = sim.run_batch(0, 64, {});
    benchmark::DoNotOptimize(res.data());
  }
  state.SetItemsProcessed(state.iterations() * 64 * sim.steps());
}
BENCHMARK(BM_BatchSteps)->Arg(32)->Arg(64);

static void BM_SmoothingSeries(benchmark::State& state) {
  double L = 1.0;
  auto spec =
      spectral::build_spectrum(1, Boundary::Dirichlet, std::span(&L, 1), 512);
  auto g = noise::NoiseSpec::colored(0.3);
  double t = 1e-3;
  for (auto _ : state) {
    auto v = noise::l4_integrand(spec, g, t, 0.55, 0.55);
    benchmark::DoNotOptimize(v.l4_norm4_partial);
  }
}
BENCHMARK(BM_SmoothingSeries);

BENCHMARK_MAIN();
