#include "spde/drift.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "spde/quadrature.hpp"

namespace spde::galerkin {

PointwiseF PointwiseF::derivative() const {
  if (sine_amp != 0.0 || clip)
    throw std::logic_error(
        "PointwiseF::derivative: only smooth polynomial F can be differentiated");
  PointwiseF d;
  if (poly.size() > 1) {
    d.poly.resize(poly.size() - 1);
    for (std::size_t i = 1; i < poly.size(); ++i)
      d.poly[i - 1] = static_cast<double>(i) * poly[i];
  }
  return d;
}

namespace {

double eigenfunction_1d(spectral::Boundary bc, int m, double L, double xi) {
  const double norm = std::sqrt(2.0 / L);
  if (bc == spectral::Boundary::Dirichlet) return norm * std::sin(M_PI * m * xi / L);
  if (m == 0) return 1.0 / std::sqrt(L);
  return norm * std::cos(M_PI * m * xi / L);
}

double eigenfunction_1d_dx(spectral::Boundary bc, int m, double L, double xi) {
  const double norm = std::sqrt(2.0 / L);
  const double w = M_PI * m / L;
  if (bc == spectral::Boundary::Dirichlet) return norm * w * std::cos(w * xi);
  if (m == 0) return 0.0;
  return -norm * w * std::sin(w * xi);
}

}  // namespace

Collocation::Collocation(const spectral::Spectrum& spec, int oversample) {
  if (oversample < 2)
    throw std::invalid_argument("Collocation: oversample must be >= 2");
  n_ = spec.cutoff;
  dim_ = spec.dimension;

  int m_max = 1;
  for (const auto& idx : spec.indices)
    for (int i = 0; i < dim_; ++i) m_max = std::max(m_max, idx[i]);
  // Gauss-Legendre nodes per dimension: q nodes integrate trig frequencies up
  // to 2q (in units of pi/L) at machine precision, so q = oversample * m_max
  // keeps all pairwise mode products exact and leaves spectrally small
  // aliasing for higher powers.
  const int q = oversample * m_max;
  const quad::Rule& rule = quad::gauss_legendre(q);

  total_points_ = 1;
  for (int i = 0; i < dim_; ++i) total_points_ *= q;

  basis_.resize(static_cast<std::size_t>(total_points_) * n_);
  basis_w_.resize(basis_.size());
  for (int i = 0; i < dim_; ++i) basis_dx_[i].resize(basis_.size());
  basis_lap_.resize(basis_.size());

  std::array<double, 3> x = {0.0, 0.0, 0.0};
  std::array<int, 3> j = {0, 0, 0};
  for (int p = 0; p < total_points_; ++p) {
    int rem = p;
    double cellw = 1.0;
    for (int i = dim_ - 1; i >= 0; --i) {
      j[i] = rem % q;
      rem /= q;
      x[i] = 0.5 * spec.lengths[i] * (rule.nodes[j[i]] + 1.0);
      cellw *= 0.5 * spec.lengths[i] * rule.weights[j[i]];
    }
    for (int k = 0; k < n_; ++k) {
      double v = 1.0;
      std::array<double, 3> fac = {1.0, 1.0, 1.0};
      for (int i = 0; i < dim_; ++i) {
        fac[i] = eigenfunction_1d(spec.bc, spec.indices[k][i], spec.lengths[i], x[i]);
        v *= fac[i];
      }
      std::size_t at = static_cast<std::size_t>(p) * n_ + k;
      basis_[at] = v;
      basis_w_[at] = v * cellw;
      basis_lap_[at] = -spec.base_eigenvalues[k] * v;
      for (int i = 0; i < dim_; ++i) {
        double dv = eigenfunction_1d_dx(spec.bc, spec.indices[k][i],
                                        spec.lengths[i], x[i]);
        for (int o = 0; o < dim_; ++o)
          if (o != i) dv *= fac[o];
        basis_dx_[i][at] = dv;
      }
    }
  }
}

namespace {

// V(Q x C) = M(Q x n, row-major) * A(n x C, col-major)
void gemm_synth(const std::vector<double>& M, int q, int n, const double* A,
                double* V, int count) {
  for (int c = 0; c < count; ++c) {
    const double* __restrict a = A + static_cast<std::size_t>(c) * n;
    double* __restrict v = V + static_cast<std::size_t>(c) * q;
    for (int p = 0; p < q; ++p) {
      const double* __restrict row = M.data() + static_cast<std::size_t>(p) * n;
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += row[k] * a[k];
      v[p] = s;
    }
  }
}

// A(n x C) += / = M^T(n x Q) * V(Q x C); M stored row-major Q x n
void gemm_analyze(const std::vector<double>& M, int q, int n, const double* V,
                  double* A, int count) {
  for (int c = 0; c < count; ++c) {
    const double* __restrict v = V + static_cast<std::size_t>(c) * q;
    double* __restrict a = A + static_cast<std::size_t>(c) * n;
    std::memset(a, 0, sizeof(double) * n);
    for (int p = 0; p < q; ++p) {
      const double* __restrict row = M.data() + static_cast<std::size_t>(p) * n;
      const double vp = v[p];
      for (int k = 0; k < n; ++k) a[k] += row[k] * vp;
    }
  }
}

}  // namespace

void Collocation::synth(const double* a, double* values) const {
  gemm_synth(basis_, total_points_, n_, a, values, 1);
}
void Collocation::analyze(const double* values, double* a) const {
  gemm_analyze(basis_w_, total_points_, n_, values, a, 1);
}
void Collocation::synth_dx(int axis, const double* a, double* values) const {
  gemm_synth(basis_dx_[axis], total_points_, n_, a, values, 1);
}
void Collocation::synth_lap(const double* a, double* values) const {
  gemm_synth(basis_lap_, total_points_, n_, a, values, 1);
}
void Collocation::synth_batch(const double* A, double* V, int count) const {
  gemm_synth(basis_, total_points_, n_, A, V, count);
}
void Collocation::analyze_batch(const double* V, double* A, int count) const {
  gemm_analyze(basis_w_, total_points_, n_, V, A, count);
}
void Collocation::synth_dx_batch(int axis, const double* A, double* V,
                                 int count) const {
  gemm_synth(basis_dx_[axis], total_points_, n_, A, V, count);
}
void Collocation::synth_lap_batch(const double* A, double* V, int count) const {
  gemm_synth(basis_lap_, total_points_, n_, A, V, count);
}

namespace {

using admissibility::Family;

void eval_into(const DriftSpec& drift, const spectral::Spectrum& spec,
               const Collocation& grid, const double* a, double* out,
               std::vector<double>& work) {
  const int n = spec.cutoff;
  const int q = grid.points();

  if (drift.diagonal_linear()) {
    const double c = drift.f.poly[1];
    for (int k = 0; k < n; ++k) out[k] = c * a[k];
    return;
  }

  switch (drift.family) {
    case Family::HeatPerturb:
    case Family::HeatPolynomial: {
      work.resize(q);
      grid.synth(a, work.data());
      for (int p = 0; p < q; ++p) work[p] = drift.f(work[p]);
      grid.analyze(work.data(), out);
      return;
    }
    case Family::DivergenceSub:
    case Family::DivergenceSuper: {
      work.resize(q);
      grid.synth(a, work.data());
      for (int p = 0; p < q; ++p) work[p] = drift.f(work[p]);
      grid.analyze(work.data(), out);
      for (int k = 0; k < n; ++k)
        out[k] *= std::pow(spec.eigenvalues[k], drift.beta);
      return;
    }
    case Family::NonDivergence: {
      work.resize(q);
      std::vector<double> frac(n);
      for (int k = 0; k < n; ++k)
        frac[k] = std::pow(spec.eigenvalues[k], drift.alpha) * a[k];
      grid.synth(frac.data(), work.data());
      for (int p = 0; p < q; ++p) work[p] = drift.f(work[p]);
      grid.analyze(work.data(), out);
      return;
    }
    case Family::Burgers: {
      if (spec.dimension != 1)
        throw std::invalid_argument("drift_eval: Burgers drift is one-dimensional");
      work.resize(2 * q);
      double* u = work.data();
      double* ux = work.data() + q;
      grid.synth(a, u);
      grid.synth_dx(0, a, ux);
      for (int p = 0; p < q; ++p) {
        double conv = drift.burgers_sign * u[p] * ux[p];
        double fpart = drift.f.is_zero()
                           ? 0.0
                           : drift.f(drift.burgers_wu * u[p] +
                                     drift.burgers_wux * ux[p]);
        u[p] = conv + fpart;
      }
      grid.analyze(u, out);
      return;
    }
    case Family::CahnHilliard: {
      // B = F1''(u)|grad u|^2 + F1'(u) lap u + F2, from dX + A_N^2 X dt =
      // (lap F1(X) + F2) dt + ... with lap F1(u) expanded by the chain rule.
      const int d = spec.dimension;
      work.resize(static_cast<std::size_t>(q) * 4);
      double* u = work.data();
      double* lap = u + q;
      double* acc = lap + q;  // |grad u|^2 accumulator, then result
      double* gx = acc + q;
      grid.synth(a, u);
      grid.synth_lap(a, lap);
      std::fill(acc, acc + q, 0.0);
      double gsum_w = drift.f2_wgrad;
      std::vector<double> gsum(gsum_w != 0.0 ? q : 0, 0.0);
      for (int i = 0; i < d; ++i) {
        grid.synth_dx(i, a, gx);
        for (int p = 0; p < q; ++p) acc[p] += gx[p] * gx[p];
        if (gsum_w != 0.0)
          for (int p = 0; p < q; ++p) gsum[p] += gx[p];
      }
      PointwiseF f1p = drift.f.derivative();
      PointwiseF f1pp = f1p.derivative();
      for (int p = 0; p < q; ++p) {
        double v = f1pp(u[p]) * acc[p] + f1p(u[p]) * lap[p];
        if (!drift.f2.is_zero())
          v += drift.f2(drift.f2_wu * u[p] +
                        (gsum_w != 0.0 ? gsum_w * gsum[p] : 0.0) +
                        drift.f2_wlap * lap[p]);
        acc[p] = v;
      }
      grid.analyze(acc, out);
      return;
    }
  }
  throw std::logic_error("drift_eval: unknown family");
}

}  // namespace

spectral::ModeVector drift_eval(const DriftSpec& drift,
                                const spectral::Spectrum& spec,
                                const spectral::ModeVector& a,
                                const Collocation& grid) {
  if (static_cast<int>(a.size()) != spec.cutoff)
    throw std::invalid_argument("drift_eval: state length differs from cutoff");
  spectral::ModeVector out(spec.cutoff);
  std::vector<double> work;
  eval_into(drift, spec, grid, a.data(), out.data(), work);
  return out;
}

spectral::ModeVector drift_eval(const DriftSpec& drift,
                                const spectral::Spectrum& spec,
                                const spectral::ModeVector& a, int oversample) {
  Collocation grid(spec, oversample);
  return drift_eval(drift, spec, a, grid);
}

spectral::ModeVector truncate_drift(const DriftSpec& drift, double N,
                                    const spectral::Spectrum& spec,
                                    const spectral::ModeVector& a,
                                    const Collocation& grid) {
  if (!(N > 0.0)) throw std::invalid_argument("truncate_drift: N must be positive");
  double norm = spectral::sobolev_norm(spec, drift.alpha, a);
  if (norm <= N) return drift_eval(drift, spec, a, grid);
  spectral::ModeVector scaled(a);
  double s = N / norm;
  for (double& v : scaled) v *= s;
  return drift_eval(drift, spec, scaled, grid);
}

}  // namespace spde::galerkin
