#include "spde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spde/stats.hpp"

namespace spde::spectral {

std::string to_string(Boundary bc) {
  return bc == Boundary::Dirichlet ? "dirichlet" : "neumann_zero_mean";
}

namespace {

struct Candidate {
  double base;
  std::array<int, 3> index;
};

bool lex_less(const std::array<int, 3>& a, const std::array<int, 3>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

void enumerate(int d, Boundary bc, const std::array<double, 3>& len, int m_max,
               std::vector<Candidate>& out) {
  out.clear();
  const int lo = bc == Boundary::Dirichlet ? 1 : 0;
  std::array<int, 3> m = {0, 0, 0};
  auto push = [&](const std::array<int, 3>& idx) {
    bool all_zero = true;
    double mu = 0.0;
    for (int i = 0; i < d; ++i) {
      if (idx[i] != 0) all_zero = false;
      double w = M_PI * idx[i] / len[i];
      mu += w * w;
    }
    if (all_zero) return;  // zero mode excluded for both boundary choices
    out.push_back({mu, idx});
  };
  if (d == 1) {
    for (m[0] = lo; m[0] <= m_max; ++m[0]) push(m);
  } else if (d == 2) {
    for (m[0] = lo; m[0] <= m_max; ++m[0])
      for (m[1] = lo; m[1] <= m_max; ++m[1]) push(m);
  } else {
    for (m[0] = lo; m[0] <= m_max; ++m[0])
      for (m[1] = lo; m[1] <= m_max; ++m[1])
        for (m[2] = lo; m[2] <= m_max; ++m[2]) push(m);
  }
}

}  // namespace

Spectrum build_spectrum(int dimension, Boundary bc,
                        std::span<const double> lengths, int cutoff,
                        int power) {
  if (dimension < 1 || dimension > 3)
    throw std::invalid_argument("build_spectrum: dimension must be 1, 2 or 3");
  if (cutoff < 1)
    throw std::invalid_argument("build_spectrum: cutoff must be >= 1");
  if (power != 1 && power != 2)
    throw std::invalid_argument("build_spectrum: power must be 1 or 2");
  if (static_cast<int>(lengths.size()) < dimension)
    throw std::invalid_argument("build_spectrum: missing side lengths");

  Spectrum spec;
  spec.dimension = dimension;
  spec.bc = bc;
  spec.cutoff = cutoff;
  spec.power = power;
  double max_len = 0.0;
  for (int i = 0; i < dimension; ++i) {
    if (!(lengths[i] > 0.0))
      throw std::invalid_argument("build_spectrum: side lengths must be positive");
    spec.lengths[i] = lengths[i];
    max_len = std::max(max_len, lengths[i]);
  }

  // Grow the index range until the cutoff-th smallest enumerated eigenvalue
  // is below every non-enumerated one (any missing index has some m_i =
  // m_max+1, hence base >= (pi (m_max+1) / max L)^2).
  std::vector<Candidate> cand;
  int m_max = std::max(cutoff, 2);
  for (;;) {
    enumerate(dimension, bc, spec.lengths, m_max, cand);
    double frontier = M_PI * (m_max + 1) / max_len;
    frontier *= frontier;
    if (static_cast<int>(cand.size()) >= cutoff) {
      std::nth_element(cand.begin(), cand.begin() + (cutoff - 1), cand.end(),
                       [](const Candidate& a, const Candidate& b) {
                         return a.base < b.base;
                       });
      if (cand[cutoff - 1].base < frontier) break;
    }
    m_max *= 2;
  }

  std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
    if (a.base != b.base) return a.base < b.base;
    return lex_less(a.index, b.index);
  });
  cand.resize(cutoff);

  spec.eigenvalues.reserve(cutoff);
  spec.base_eigenvalues.reserve(cutoff);
  spec.indices.reserve(cutoff);
  for (const Candidate& c : cand) {
    spec.base_eigenvalues.push_back(c.base);
    spec.eigenvalues.push_back(power == 1 ? c.base : c.base * c.base);
    spec.indices.push_back(c.index);
  }
  return spec;
}

namespace {

void require_size(const Spectrum& spec, const ModeVector& x, const char* op) {
  if (static_cast<int>(x.size()) != spec.cutoff)
    throw std::invalid_argument(std::string(op) +
                                ": mode vector length differs from cutoff");
}

}  // namespace

ModeVector frac_power_apply(const Spectrum& spec, double s, const ModeVector& x) {
  require_size(spec, x, "frac_power_apply");
  ModeVector y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    y[k] = std::pow(spec.eigenvalues[k], s) * x[k];
  return y;
}

ModeVector semigroup_apply(const Spectrum& spec, double t, const ModeVector& x) {
  require_size(spec, x, "semigroup_apply");
  if (t < 0.0) throw std::invalid_argument("semigroup_apply: negative time");
  ModeVector y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k)
    y[k] = std::exp(-t * spec.eigenvalues[k]) * x[k];
  return y;
}

double sobolev_norm(const Spectrum& spec, double s, const ModeVector& x) {
  require_size(spec, x, "sobolev_norm");
  stats::KahanSum sum;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double w = std::pow(spec.eigenvalues[k], 2.0 * s);
    sum.add(w * x[k] * x[k]);
  }
  return std::sqrt(sum.value());
}

ModeVector project(const ModeVector& x, int j) {
  if (j < 1 || j > static_cast<int>(x.size()))
    throw std::invalid_argument("project: index outside [1, n]");
  ModeVector y(x);
  std::fill(y.begin() + j, y.end(), 0.0);
  return y;
}

namespace {

double eigenfunction_1d(Boundary bc, int m, double L, double xi) {
  const double norm = std::sqrt(2.0 / L);
  if (bc == Boundary::Dirichlet) return norm * std::sin(M_PI * m * xi / L);
  if (m == 0) return 1.0 / std::sqrt(L);
  return norm * std::cos(M_PI * m * xi / L);
}

double eigenfunction_1d_dx(Boundary bc, int m, double L, double xi) {
  const double norm = std::sqrt(2.0 / L);
  const double w = M_PI * m / L;
  if (bc == Boundary::Dirichlet) return norm * w * std::cos(w * xi);
  if (m == 0) return 0.0;
  return -norm * w * std::sin(w * xi);
}

}  // namespace

double basis_value(const Spectrum& spec, int k, std::span<const double> point) {
  if (k < 0 || k >= spec.cutoff)
    throw std::invalid_argument("basis_value: mode index outside spectrum");
  double v = 1.0;
  for (int i = 0; i < spec.dimension; ++i)
    v *= eigenfunction_1d(spec.bc, spec.indices[k][i], spec.lengths[i], point[i]);
  return v;
}

double basis_derivative(const Spectrum& spec, int k, int axis,
                        std::span<const double> point) {
  if (k < 0 || k >= spec.cutoff)
    throw std::invalid_argument("basis_derivative: mode index outside spectrum");
  if (axis < 0 || axis >= spec.dimension)
    throw std::invalid_argument("basis_derivative: axis outside dimension");
  double v = 1.0;
  for (int i = 0; i < spec.dimension; ++i) {
    if (i == axis)
      v *= eigenfunction_1d_dx(spec.bc, spec.indices[k][i], spec.lengths[i], point[i]);
    else
      v *= eigenfunction_1d(spec.bc, spec.indices[k][i], spec.lengths[i], point[i]);
  }
  return v;
}

}  // namespace spde::spectral
