#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "spde/admissibility.hpp"
#include "spde/spectral.hpp"

namespace spde::galerkin {

// Branchless sine for the pointwise drift maps (|err| < 1e-9). The grid
// nonlinearity is applied a billion times in long comparisons and libm sin
// would dominate the whole simulation.
inline double fast_sin(double x) {
  constexpr double two_pi = 6.283185307179586476925287;
  constexpr double inv_two_pi = 0.15915494309189533576888;
  x -= two_pi * std::nearbyint(x * inv_two_pi);
  double y = std::fabs(x);
  y = std::min(y, M_PI - y);  // sin(x) = sin(pi - x) on the folded branch
  double y2 = y * y;
  double p = 1.60590438368216146e-10;
  p = p * y2 - 2.50521083854417187e-08;
  p = p * y2 + 2.75573192239198747e-06;
  p = p * y2 - 1.98412698412696163e-04;
  p = p * y2 + 8.33333333333332974e-03;
  p = p * y2 - 1.66666666666666657e-01;
  double s = y + y * y2 * p;
  return std::copysign(s, x);
}

// Scalar nonlinearity F(r) = poly(r) + sine_amp * sin(sine_freq * r), with an
// optional clamp of the output to [-clip, clip] for the bounded variants.
struct PointwiseF {
  std::vector<double> poly;  // poly[i] r^i
  double sine_amp = 0.0;
  double sine_freq = 1.0;
  std::optional<double> clip;

  double operator()(double r) const {
    double v = 0.0;
    for (std::size_t i = poly.size(); i-- > 0;) v = v * r + poly[i];
    if (sine_amp != 0.0) v += sine_amp * fast_sin(sine_freq * r);
    if (clip) {
      if (v > *clip) v = *clip;
      else if (v < -*clip) v = -*clip;
    }
    return v;
  }

  bool is_zero() const { return poly.empty() && sine_amp == 0.0; }
  PointwiseF derivative() const;

  static PointwiseF zero() { return {}; }
  static PointwiseF polynomial(std::vector<double> c) { return {std::move(c), 0.0, 1.0, {}}; }
  // classical double-well derivative r^3 - r
  static PointwiseF double_well() { return polynomial({0.0, -1.0, 0.0, 1.0}); }
};

// Drift family evaluated through the Galerkin projection P_n B P_n. The per-
// family mode coefficients are
//   heat (perturb/polynomial)   b_k = <F(u), e_k>
//   divergence (sub/super)      b_k = lambda_k^beta <F(u), e_k>
//   non-divergence              b_k = <F(A^alpha u), e_k>
//   burgers (d = 1)             b_k = sign <u u_x, e_k> + <F(w_u u + w_ux u_x), e_k>
//   cahn-hilliard               b_k = <F1''(u)|grad u|^2 + F1'(u) lap u
//                                      + F2(w.(u, sum_i d_i u, lap u)), e_k>
struct DriftSpec {
  admissibility::Family family = admissibility::Family::HeatPerturb;
  double alpha = 0.0;  // V_{2 alpha} metric of the truncation ball
  double beta = 0.0;   // divergence order
  PointwiseF f;
  double burgers_sign = 1.0;
  double burgers_wu = 1.0, burgers_wux = 0.0;
  PointwiseF f2;  // Cahn-Hilliard source
  double f2_wu = 1.0, f2_wgrad = 0.0, f2_wlap = 0.0;

  static DriftSpec none() {
    DriftSpec d;
    d.f = PointwiseF::zero();
    return d;
  }

  // A pure linear Nemytskii drift is mode-diagonal, b_k = c a_k, and is
  // evaluated without the grid so projection commutes with simulation
  // bitwise.
  bool diagonal_linear() const {
    return (family == admissibility::Family::HeatPerturb ||
            family == admissibility::Family::HeatPolynomial) &&
           f.poly.size() == 2 && f.poly[0] == 0.0 && f.sine_amp == 0.0 && !f.clip;
  }
};

// Tensor-product midpoint collocation grid matched to the eigenbasis. With
// `oversample` points per retained 1-d frequency the discrete sine/cosine
// system stays orthogonal and midpoint quadrature integrates products of
// basis functions up to cubic nonlinearities without aliasing.
class Collocation {
 public:
  Collocation(const spectral::Spectrum& spec, int oversample = 4);

  int points() const { return total_points_; }
  int modes() const { return n_; }

  // values[q] = sum_k a[k] e_k(x_q)
  void synth(const double* a, double* values) const;
  // a[k] = sum_q w_q values[q] e_k(x_q)
  void analyze(const double* values, double* a) const;
  // d/dx_axis and Laplacian synthesis (base operator, before any power)
  void synth_dx(int axis, const double* a, double* values) const;
  void synth_lap(const double* a, double* values) const;

  // column-major batches, leading dimension = modes() resp. points()
  void synth_batch(const double* A, double* V, int count) const;
  void analyze_batch(const double* V, double* A, int count) const;
  void synth_dx_batch(int axis, const double* A, double* V, int count) const;
  void synth_lap_batch(const double* A, double* V, int count) const;

 private:
  int n_ = 0;
  int dim_ = 1;
  int total_points_ = 0;
  // dense synthesis matrices, row-major points x modes
  std::vector<double> basis_;
  std::vector<double> basis_w_;  // quadrature-weighted transpose factors
  std::vector<double> basis_dx_[3];
  std::vector<double> basis_lap_;
};

// P_n-coefficients of the drift at state a (length = spectrum cutoff).
spectral::ModeVector drift_eval(const DriftSpec& drift,
                                const spectral::Spectrum& spec,
                                const spectral::ModeVector& a,
                                const Collocation& grid);

// Convenience overload building a matching grid on the fly.
spectral::ModeVector drift_eval(const DriftSpec& drift,
                                const spectral::Spectrum& spec,
                                const spectral::ModeVector& a,
                                int oversample = 4);

// B(Pi_N a), where Pi_N is the radial metric projection onto the closed
// V_{2 alpha}-ball of radius N.
spectral::ModeVector truncate_drift(const DriftSpec& drift, double N,
                                    const spectral::Spectrum& spec,
                                    const spectral::ModeVector& a,
                                    const Collocation& grid);

}  // namespace spde::galerkin
