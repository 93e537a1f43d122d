#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/admissibility.hpp"
#include "spde/rational.hpp"
#include "spde/simulate.hpp"

namespace spde::config {

// Parse failure with position; unknown sections and keys are fatal so a typo
// can never silently change a parameter regime.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct CompareSettings {
  int cutoff_b = 0;            // 0 -> same as primary cutoff
  std::optional<Rational> h_b; // absent -> same as primary step
  std::uint64_t seed_b = 1;
  int paths = 0;               // 0 -> run.paths
  double level = 0.01;
  double lambda = 1.0;
};

struct KolmogorovSettings {
  int m = 1;
  double lambda = 1.0;
  double tol = 1e-4;
  int grid_points = 61;
  int gh_order = 48;
  double reg_c = 1.0;
  double reg_eps = 0.0;        // 0 -> unregularised solve
  double drift_bound = 0.0;
  std::string observable = "cos_a1";
  double t_lo = 1e-3, t_hi = 1e-1;
  int t_count = 9;
  double gamma = 0.0;
};

// Parsed scenario: equation family and exact parameters, spectral settings,
// noise, initial datum, run controls, output locations, and the optional
// subcommand sections.
struct ScenarioFile {
  admissibility::ScenarioParams params;

  int dimension = 1;
  spectral::Boundary bc = spectral::Boundary::Dirichlet;
  std::vector<Rational> lengths;  // exact, defaults to unit box
  int cutoff = 16;
  int power = 1;

  noise::Kind noise_kind = noise::Kind::Colored;
  std::optional<Rational> delta_prime;

  std::vector<double> f_coeffs;
  double f_sine_amp = 0.0;
  double f_sine_freq = 1.0;
  std::optional<double> f_clip;
  double burgers_sign = 1.0;
  std::vector<double> f2_coeffs;
  std::optional<double> f2_clip;

  std::string initial_preset = "e1";  // e1 | smooth-bump | rough-tail | coeffs
  Rational initial_s = Rational(1, 2);
  std::vector<double> initial_coeffs;

  Rational T = Rational(1);
  std::optional<Rational> h;   // default T/2048
  int paths = 10000;
  std::uint64_t seed = 0;
  std::optional<double> truncation;
  int oversample = 4;

  std::string out_dir;   // empty -> --out flag or SPDE_UNIQ_LAB_OUT
  std::string prefix = "run";

  std::optional<CompareSettings> compare;
  std::optional<KolmogorovSettings> kolmogorov;

  galerkin::DriftSpec drift_spec() const;
  galerkin::SimConfig sim_config() const;
  spectral::ModeVector initial_datum(const spectral::Spectrum& spec) const;
};

// Parses and validates a scenario. With enforce_admissibility (the default)
// an inadmissible parameter set is a semantic error naming the violated
// constraint; the CLI parses without enforcement and decides between the
// admissibility exit code and --override-admissibility itself.
ScenarioFile parse_scenario(const std::string& text,
                            bool enforce_admissibility = true);
std::string serialize(const ScenarioFile& s);

// FNV-1a over the canonical serialization.
std::uint64_t digest(const std::string& canonical_text);
std::string digest_hex(const ScenarioFile& s);

// Reproducibility sidecar: canonical scenario, digest, seed, versions and the
// mode ordering of the spectrum actually used.
std::string manifest_text(const ScenarioFile& s, const std::string& command,
                          const spectral::Spectrum& spec);

}  // namespace spde::config
