#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace spde::spectral {

enum class Boundary { Dirichlet, NeumannZeroMean };

std::string to_string(Boundary bc);

// Truncated eigen-decomposition of the (power of the) Laplacian on an
// axis-aligned box. Eigenpairs are exact tensor products:
//
//   base eigenvalue  mu_m = sum_i (pi m_i / L_i)^2,   lambda = mu^power
//
// with sine modes (m_i >= 1) under Dirichlet conditions and zero-mean cosine
// modes (m_i >= 0, m != 0) under Neumann conditions, so every retained
// eigenvalue is strictly positive. `power` is 1 for the Laplacian itself and
// 2 for its square (Cahn-Hilliard); all mode-diagonal formulas downstream
// only see `eigenvalues`.
struct Spectrum {
  int dimension = 1;
  Boundary bc = Boundary::Dirichlet;
  std::array<double, 3> lengths = {1.0, 1.0, 1.0};
  int cutoff = 0;
  int power = 1;
  std::vector<double> eigenvalues;        // lambda_k, ascending
  std::vector<double> base_eigenvalues;   // mu_k = lambda_k^{1/power}
  std::vector<std::array<int, 3>> indices;  // multi-index per mode

  int size() const { return cutoff; }
};

// Enumerates modes shell by shell until the cutoff smallest eigenvalues are
// certified; ties are broken lexicographically on the multi-index so the mode
// ordering (and hence every seeded simulation) is reproducible.
Spectrum build_spectrum(int dimension, Boundary bc,
                        std::span<const double> lengths, int cutoff,
                        int power = 1);

using ModeVector = std::vector<double>;

ModeVector frac_power_apply(const Spectrum& spec, double s, const ModeVector& x);
ModeVector semigroup_apply(const Spectrum& spec, double t, const ModeVector& x);

// || A^s x ||  =  ( sum_k lambda_k^{2s} x_k^2 )^{1/2}
double sobolev_norm(const Spectrum& spec, double s, const ModeVector& x);

// Orthogonal projection onto the span of the first j modes, 1 <= j <= n.
ModeVector project(const ModeVector& x, int j);

// Value of the k-th eigenfunction at a point of the box (unit L^2 norm).
double basis_value(const Spectrum& spec, int k, std::span<const double> point);

// d/dx_i of the k-th eigenfunction at a point.
double basis_derivative(const Spectrum& spec, int k, int axis,
                        std::span<const double> point);

}  // namespace spde::spectral
