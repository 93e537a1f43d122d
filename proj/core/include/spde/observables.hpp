#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spde/spectral.hpp"

namespace spde::lawcmp {

// Bounded continuous functional of the mode state. `sup_bound` is a certified
// bound on |eval|, used for Laplace-transform tail estimates.
struct Observable {
  std::string name;
  double sup_bound = 1.0;
  std::function<double(const double* a, int n)> eval;

  double operator()(const spectral::ModeVector& a) const {
    return eval(a.data(), static_cast<int>(a.size()));
  }
};

Observable constant_one();
Observable clipped_polynomial(std::string name, int coordinate,
                              std::vector<double> coeffs, double clip);
Observable cosine_of_linear(std::string name, std::vector<double> weights);
Observable clipped_sobolev_norm(std::string name, const spectral::Spectrum& spec,
                                double s, double clip);

// The fixed 8-observable equality-testing catalog: three clipped polynomials
// of the leading coordinates, three cosines of linear functionals, two
// clipped Sobolev-norm functionals. All depend on the first min(n, 8) modes
// only, so catalogs taken at different cutoffs evaluate the same functional.
std::vector<Observable> standard_catalog(const spectral::Spectrum& spec);

}  // namespace spde::lawcmp
