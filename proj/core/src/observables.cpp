#include "spde/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spde::lawcmp {

Observable constant_one() {
  return {"one", 1.0, [](const double*, int) { return 1.0; }};
}

Observable clipped_polynomial(std::string name, int coordinate,
                              std::vector<double> coeffs, double clip) {
  if (coordinate < 0) throw std::invalid_argument("clipped_polynomial: bad coordinate");
  return {std::move(name), clip,
          [coordinate, coeffs = std::move(coeffs), clip](const double* a, int n) {
            double r = coordinate < n ? a[coordinate] : 0.0;
            double v = 0.0;
            for (std::size_t i = coeffs.size(); i-- > 0;) v = v * r + coeffs[i];
            return std::clamp(v, -clip, clip);
          }};
}

Observable cosine_of_linear(std::string name, std::vector<double> weights) {
  return {std::move(name), 1.0,
          [weights = std::move(weights)](const double* a, int n) {
            double s = 0.0;
            int m = std::min<int>(n, static_cast<int>(weights.size()));
            for (int k = 0; k < m; ++k) s += weights[k] * a[k];
            return std::cos(s);
          }};
}

Observable clipped_sobolev_norm(std::string name, const spectral::Spectrum& spec,
                                double s, double clip) {
  std::vector<double> w(spec.cutoff);
  for (int k = 0; k < spec.cutoff; ++k)
    w[k] = std::pow(spec.eigenvalues[k], 2.0 * s);
  return {std::move(name), clip,
          [w = std::move(w), clip](const double* a, int n) {
            double acc = 0.0;
            int m = std::min<int>(n, static_cast<int>(w.size()));
            for (int k = 0; k < m; ++k) acc += w[k] * a[k] * a[k];
            return std::min(std::sqrt(acc), clip);
          }};
}

std::vector<Observable> standard_catalog(const spectral::Spectrum& spec) {
  const int depth = std::min(spec.cutoff, 8);
  std::vector<Observable> cat;
  cat.push_back(clipped_polynomial("clip_a1", 0, {0.0, 1.0}, 2.0));
  cat.push_back(clipped_polynomial("clip_a2_sq", std::min(1, depth - 1),
                                   {0.0, 0.0, 1.0}, 2.0));
  cat.push_back(clipped_polynomial("clip_a3_cube", std::min(2, depth - 1),
                                   {0.0, 0.5, 0.0, 0.5}, 2.0));
  std::vector<double> w1(depth, 0.0), w2(depth, 0.0), w3(depth, 0.0);
  w1[0] = 1.0;
  for (int k = 0; k < depth; ++k) w2[k] = 1.0 / (1.0 + k);
  for (int k = 0; k < depth; ++k) w3[k] = (k % 2 ? -0.5 : 0.5);
  cat.push_back(cosine_of_linear("cos_a1", std::move(w1)));
  cat.push_back(cosine_of_linear("cos_decaying", std::move(w2)));
  cat.push_back(cosine_of_linear("cos_alternating", std::move(w3)));

  // Sobolev functionals restricted to the first `depth` modes so that the
  // functional is identical across cutoffs.
  spectral::Spectrum head = spec;
  head.cutoff = depth;
  head.eigenvalues.assign(spec.eigenvalues.begin(), spec.eigenvalues.begin() + depth);
  head.base_eigenvalues.assign(spec.base_eigenvalues.begin(),
                               spec.base_eigenvalues.begin() + depth);
  head.indices.assign(spec.indices.begin(), spec.indices.begin() + depth);
  cat.push_back(clipped_sobolev_norm("clip_norm_L2", head, 0.0, 3.0));
  cat.push_back(clipped_sobolev_norm("clip_norm_Hminus", head, -0.25, 3.0));
  return cat;
}

}  // namespace spde::lawcmp
