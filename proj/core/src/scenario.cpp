#include "spde/scenario.hpp"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace spde::config {

using admissibility::Family;

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
  bool consumed = false;
};

struct RawScenario {
  // section -> key -> entry
  std::map<std::string, std::map<std::string, RawEntry>> sections;
  std::map<std::string, int> section_lines;
};

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

RawScenario tokenize(const std::string& text) {
  RawScenario raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError(lineno, "malformed section header: " + line);
      section = strip(line.substr(1, line.size() - 2));
      if (section.empty()) throw ParseError(lineno, "empty section name");
      raw.section_lines.emplace(section, lineno);
      raw.sections[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(lineno, "expected key = value, got: " + line);
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    if (value.empty()) throw ParseError(lineno, "empty value for key '" + key + "'");
    if (section.empty())
      throw ParseError(lineno, "key '" + key + "' outside any [section]");
    auto [it, fresh] = raw.sections[section].emplace(key, RawEntry{value, lineno});
    if (!fresh)
      throw ParseError(lineno, "duplicate key '" + key + "' in [" + section + "]");
  }
  return raw;
}

class SectionReader {
 public:
  SectionReader(RawScenario& raw, const std::string& name)
      : raw_(raw), name_(name) {
    auto it = raw_.sections.find(name);
    entries_ = it == raw_.sections.end() ? nullptr : &it->second;
  }

  bool present() const { return entries_ != nullptr; }

  std::optional<std::string> get(const std::string& key) {
    if (!entries_) return std::nullopt;
    auto it = entries_->find(key);
    if (it == entries_->end()) return std::nullopt;
    it->second.consumed = true;
    last_line_ = it->second.line;
    return it->second.value;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v)
      throw ParseError(line(), "missing required key '" + key + "' in [" + name_ + "]");
    return *v;
  }

  int line() const {
    if (last_line_) return last_line_;
    auto it = raw_.section_lines.find(name_);
    return it == raw_.section_lines.end() ? 0 : it->second;
  }

  Rational rational(const std::string& key, const std::string& text) {
    try {
      return Rational::parse(text);
    } catch (const std::exception& e) {
      throw ParseError(line(), "key '" + key + "': " + e.what());
    }
  }

  double number(const std::string& key, const std::string& text) {
    try {
      std::size_t pos = 0;
      double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ParseError(line(), "key '" + key + "' is not a number: " + text);
    }
  }

  long long integer(const std::string& key, const std::string& text) {
    try {
      std::size_t pos = 0;
      long long v = std::stoll(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ParseError(line(), "key '" + key + "' is not an integer: " + text);
    }
  }

  bool boolean(const std::string& key, const std::string& text) {
    if (text == "true" || text == "yes") return true;
    if (text == "false" || text == "no") return false;
    throw ParseError(line(), "key '" + key + "' is not a boolean: " + text);
  }

  std::vector<double> number_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = strip(item);
      if (item.empty())
        throw ParseError(line(), "key '" + key + "': empty list element");
      out.push_back(number(key, item));
    }
    return out;
  }

  std::vector<Rational> rational_list(const std::string& key,
                                      const std::string& text) {
    std::vector<Rational> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = strip(item);
      if (item.empty())
        throw ParseError(line(), "key '" + key + "': empty list element");
      out.push_back(rational(key, item));
    }
    return out;
  }

 private:
  RawScenario& raw_;
  std::string name_;
  std::map<std::string, RawEntry>* entries_;
  int last_line_ = 0;
};

void reject_unconsumed(const RawScenario& raw,
                       const std::set<std::string>& known_sections) {
  for (const auto& [name, entries] : raw.sections) {
    if (!known_sections.count(name)) {
      int at = raw.section_lines.count(name) ? raw.section_lines.at(name) : 0;
      throw ParseError(at, "unknown section [" + name + "]");
    }
    for (const auto& [key, entry] : entries)
      if (!entry.consumed)
        throw ParseError(entry.line, "unknown key '" + key + "' in [" + name + "]");
  }
}

}  // namespace

ScenarioFile parse_scenario(const std::string& text, bool enforce_admissibility) {
  RawScenario raw = tokenize(text);
  ScenarioFile s;

  {
    SectionReader eq(raw, "equation");
    if (!eq.present()) throw ParseError(0, "missing [equation] section");
    std::string fam = eq.require("family");
    auto f = admissibility::family_from_string(fam);
    if (!f) throw ParseError(eq.line(), "unknown equation family: " + fam);
    s.params.family = *f;
    if (auto v = eq.get("p")) s.params.p = eq.rational("p", *v);
    if (auto v = eq.get("alpha")) s.params.alpha = eq.rational("alpha", *v);
    if (auto v = eq.get("beta")) s.params.beta = eq.rational("beta", *v);
    if (auto v = eq.get("delta")) s.params.delta = eq.rational("delta", *v);
    if (auto v = eq.get("gamma")) s.params.gamma = eq.rational("gamma", *v);
    if (auto v = eq.get("drift_bounded"))
      s.params.drift_bounded = eq.boolean("drift_bounded", *v);
    if (auto v = eq.get("f_coeffs")) s.f_coeffs = eq.number_list("f_coeffs", *v);
    if (auto v = eq.get("f_sine_amp")) s.f_sine_amp = eq.number("f_sine_amp", *v);
    if (auto v = eq.get("f_sine_freq")) s.f_sine_freq = eq.number("f_sine_freq", *v);
    if (auto v = eq.get("f_clip")) s.f_clip = eq.number("f_clip", *v);
    if (auto v = eq.get("burgers_sign")) {
      s.burgers_sign = eq.number("burgers_sign", *v);
      if (s.burgers_sign != 1.0 && s.burgers_sign != -1.0)
        throw ParseError(eq.line(), "burgers_sign must be 1 or -1");
    }
    if (auto v = eq.get("f2_coeffs")) s.f2_coeffs = eq.number_list("f2_coeffs", *v);
    if (auto v = eq.get("f2_clip")) s.f2_clip = eq.number("f2_clip", *v);
  }

  {
    SectionReader sp(raw, "spectral");
    if (!sp.present()) throw ParseError(0, "missing [spectral] section");
    s.dimension = static_cast<int>(sp.integer("dimension", sp.require("dimension")));
    s.params.d = s.dimension;
    if (auto v = sp.get("boundary")) {
      if (*v == "dirichlet") s.bc = spectral::Boundary::Dirichlet;
      else if (*v == "neumann") s.bc = spectral::Boundary::NeumannZeroMean;
      else throw ParseError(sp.line(), "boundary must be dirichlet or neumann");
    }
    if (auto v = sp.get("lengths")) s.lengths = sp.rational_list("lengths", *v);
    s.cutoff = static_cast<int>(sp.integer("cutoff", sp.require("cutoff")));
    if (s.cutoff < 1) throw ParseError(sp.line(), "cutoff must be >= 1");
    s.power = admissibility::operator_power(s.params.family);
    if (auto v = sp.get("power")) {
      int p = static_cast<int>(sp.integer("power", *v));
      if (p != s.power)
        throw ParseError(sp.line(), "power " + std::to_string(p) +
                                        " conflicts with the equation family");
    }
    if (s.params.family == Family::CahnHilliard &&
        s.bc != spectral::Boundary::NeumannZeroMean)
      throw ParseError(sp.line(), "cahn_hilliard requires neumann boundary");
  }

  {
    SectionReader no(raw, "noise");
    if (no.present()) {
      if (auto v = no.get("kind")) {
        if (*v == "colored") s.noise_kind = noise::Kind::Colored;
        else if (*v == "rough") s.noise_kind = noise::Kind::Rough;
        else throw ParseError(no.line(), "noise kind must be colored or rough");
      }
      if (auto v = no.get("delta_prime"))
        s.delta_prime = no.rational("delta_prime", *v);
    }
    if (s.noise_kind == noise::Kind::Rough && !s.params.gamma)
      throw ParseError(0, "rough noise needs [equation] gamma");
  }

  {
    SectionReader init(raw, "initial");
    if (init.present()) {
      if (auto v = init.get("preset")) {
        if (*v != "e1" && *v != "smooth-bump" && *v != "rough-tail" && *v != "coeffs")
          throw ParseError(init.line(), "unknown initial preset: " + *v);
        s.initial_preset = *v;
      }
      if (auto v = init.get("s")) s.initial_s = init.rational("s", *v);
      if (auto v = init.get("coefficients")) {
        s.initial_coeffs = init.number_list("coefficients", *v);
        s.initial_preset = "coeffs";
      }
      if (s.initial_preset == "coeffs" && s.initial_coeffs.empty())
        throw ParseError(init.line(), "preset coeffs needs [initial] coefficients");
    }
  }

  {
    SectionReader run(raw, "run");
    if (!run.present()) throw ParseError(0, "missing [run] section");
    s.T = run.rational("T", run.require("T"));
    if (!(s.T > Rational(0))) throw ParseError(run.line(), "T must be positive");
    if (auto v = run.get("h")) {
      s.h = run.rational("h", *v);
      if (!(*s.h > Rational(0))) throw ParseError(run.line(), "h must be positive");
    }
    if (auto v = run.get("paths")) {
      s.paths = static_cast<int>(run.integer("paths", *v));
      if (s.paths < 1) throw ParseError(run.line(), "paths must be >= 1");
    }
    if (auto v = run.get("seed"))
      s.seed = static_cast<std::uint64_t>(run.integer("seed", *v));
    if (auto v = run.get("truncation")) s.truncation = run.number("truncation", *v);
    if (auto v = run.get("oversample")) {
      s.oversample = static_cast<int>(run.integer("oversample", *v));
      if (s.oversample < 2) throw ParseError(run.line(), "oversample must be >= 2");
    }
  }

  {
    SectionReader out(raw, "outputs");
    if (out.present()) {
      if (auto v = out.get("directory")) s.out_dir = *v;
      if (auto v = out.get("prefix")) s.prefix = *v;
    }
  }

  {
    SectionReader cm(raw, "compare");
    if (cm.present()) {
      CompareSettings c;
      if (auto v = cm.get("cutoff_b"))
        c.cutoff_b = static_cast<int>(cm.integer("cutoff_b", *v));
      if (auto v = cm.get("h_b")) c.h_b = cm.rational("h_b", *v);
      if (auto v = cm.get("seed_b"))
        c.seed_b = static_cast<std::uint64_t>(cm.integer("seed_b", *v));
      if (auto v = cm.get("paths"))
        c.paths = static_cast<int>(cm.integer("paths", *v));
      if (auto v = cm.get("level")) c.level = cm.number("level", *v);
      if (auto v = cm.get("lambda")) c.lambda = cm.number("lambda", *v);
      s.compare = c;
    }
  }

  {
    SectionReader ko(raw, "kolmogorov");
    if (ko.present()) {
      KolmogorovSettings k;
      if (auto v = ko.get("m")) k.m = static_cast<int>(ko.integer("m", *v));
      if (auto v = ko.get("lambda")) k.lambda = ko.number("lambda", *v);
      if (auto v = ko.get("tol")) k.tol = ko.number("tol", *v);
      if (auto v = ko.get("grid_points"))
        k.grid_points = static_cast<int>(ko.integer("grid_points", *v));
      if (auto v = ko.get("gh_order"))
        k.gh_order = static_cast<int>(ko.integer("gh_order", *v));
      if (auto v = ko.get("reg_c")) k.reg_c = ko.number("reg_c", *v);
      if (auto v = ko.get("reg_eps")) k.reg_eps = ko.number("reg_eps", *v);
      if (auto v = ko.get("drift_bound")) k.drift_bound = ko.number("drift_bound", *v);
      if (auto v = ko.get("observable")) k.observable = *v;
      if (auto v = ko.get("t_lo")) k.t_lo = ko.number("t_lo", *v);
      if (auto v = ko.get("t_hi")) k.t_hi = ko.number("t_hi", *v);
      if (auto v = ko.get("t_count"))
        k.t_count = static_cast<int>(ko.integer("t_count", *v));
      if (auto v = ko.get("gamma")) k.gamma = ko.number("gamma", *v);
      s.kolmogorov = k;
    }
  }

  reject_unconsumed(raw, {"equation", "spectral", "noise", "initial", "run",
                          "outputs", "compare", "kolmogorov"});

  if (s.lengths.empty()) s.lengths.assign(s.dimension, Rational(1));
  if (static_cast<int>(s.lengths.size()) != s.dimension)
    throw ParseError(0, "lengths list does not match dimension");

  // semantic validation: the admissibility calculus both validates parameter
  // consistency and, when enforcement is on, turns an inadmissible regime
  // into an error naming the binding constraint.
  try {
    admissibility::Verdict v = admissibility::classify(s.params);
    if (enforce_admissibility && !v.admissible) {
      std::string detail;
      for (const auto& c : v.constraints)
        if (!c.holds) { detail = c.name + ": " + c.detail; break; }
      throw ParseError(0, "boundary excluded or inadmissible: " + detail);
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, std::string("semantic: ") + e.what());
  }
  return s;
}

galerkin::DriftSpec ScenarioFile::drift_spec() const {
  galerkin::DriftSpec d;
  d.family = params.family;
  d.alpha = params.alpha.to_double();
  d.beta = params.beta.to_double();
  d.f.poly = f_coeffs;
  d.f.sine_amp = f_sine_amp;
  d.f.sine_freq = f_sine_freq;
  d.f.clip = f_clip;
  d.burgers_sign = burgers_sign;
  d.f2.poly = f2_coeffs;
  d.f2.clip = f2_clip;
  if (params.family == Family::CahnHilliard && f_coeffs.empty())
    d.f = galerkin::PointwiseF::double_well();
  return d;
}

spectral::ModeVector ScenarioFile::initial_datum(
    const spectral::Spectrum& spec) const {
  spectral::ModeVector x(spec.cutoff, 0.0);
  if (initial_preset == "e1") {
    x[0] = 1.0;
  } else if (initial_preset == "smooth-bump") {
    for (int k = 0; k < spec.cutoff; ++k) x[k] = std::exp(-0.5 * k);
  } else if (initial_preset == "rough-tail") {
    // in V_{2s'} for every s' < s and in no stronger scale
    double sd = initial_s.to_double();
    for (int k = 0; k < spec.cutoff; ++k)
      x[k] = std::pow(spec.eigenvalues[k], -sd) / std::sqrt(k + 1.0);
  } else {
    for (int k = 0; k < spec.cutoff && k < static_cast<int>(initial_coeffs.size());
         ++k)
      x[k] = initial_coeffs[k];
  }
  return x;
}

galerkin::SimConfig ScenarioFile::sim_config() const {
  galerkin::SimConfig cfg;
  std::vector<double> len;
  for (const auto& l : lengths) len.push_back(l.to_double());
  cfg.spec = spectral::build_spectrum(dimension, bc, len, cutoff, power);
  cfg.noise.kind = noise_kind;
  cfg.noise.exponent = noise_kind == noise::Kind::Colored
                           ? params.delta.to_double()
                           : params.gamma.value_or(Rational(0)).to_double();
  if (delta_prime) cfg.noise.hs_shift = delta_prime->to_double();
  cfg.drift = drift_spec();
  cfg.x0 = initial_datum(cfg.spec);
  cfg.T = T.to_double();
  if (h) cfg.h = h->to_double();
  cfg.seed = seed;
  cfg.trunc_level = truncation;
  cfg.oversample = oversample;
  return cfg;
}

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void emit_list(std::ostringstream& os, const std::string& key,
               const std::vector<double>& vs) {
  if (vs.empty()) return;
  os << key << " = ";
  for (std::size_t i = 0; i < vs.size(); ++i)
    os << (i ? ", " : "") << fmt_double(vs[i]);
  os << "\n";
}

}  // namespace

std::string serialize(const ScenarioFile& s) {
  std::ostringstream os;
  os << "[equation]\n";
  os << "family = " << admissibility::to_string(s.params.family) << "\n";
  if (s.params.family == Family::HeatPolynomial)
    os << "p = " << s.params.p.str() << "\n";
  os << "alpha = " << s.params.alpha.str() << "\n";
  os << "beta = " << s.params.beta.str() << "\n";
  os << "delta = " << s.params.delta.str() << "\n";
  if (s.params.gamma) os << "gamma = " << s.params.gamma->str() << "\n";
  os << "drift_bounded = " << (s.params.drift_bounded ? "true" : "false") << "\n";
  emit_list(os, "f_coeffs", s.f_coeffs);
  if (s.f_sine_amp != 0.0) {
    os << "f_sine_amp = " << fmt_double(s.f_sine_amp) << "\n";
    os << "f_sine_freq = " << fmt_double(s.f_sine_freq) << "\n";
  }
  if (s.f_clip) os << "f_clip = " << fmt_double(*s.f_clip) << "\n";
  if (s.burgers_sign != 1.0) os << "burgers_sign = -1\n";
  emit_list(os, "f2_coeffs", s.f2_coeffs);
  if (s.f2_clip) os << "f2_clip = " << fmt_double(*s.f2_clip) << "\n";

  os << "\n[spectral]\n";
  os << "dimension = " << s.dimension << "\n";
  os << "boundary = "
     << (s.bc == spectral::Boundary::Dirichlet ? "dirichlet" : "neumann") << "\n";
  os << "lengths = ";
  for (std::size_t i = 0; i < s.lengths.size(); ++i)
    os << (i ? ", " : "") << s.lengths[i].str();
  os << "\n";
  os << "cutoff = " << s.cutoff << "\n";
  os << "power = " << s.power << "\n";

  os << "\n[noise]\n";
  os << "kind = " << noise::to_string(s.noise_kind) << "\n";
  if (s.delta_prime) os << "delta_prime = " << s.delta_prime->str() << "\n";

  os << "\n[initial]\n";
  os << "preset = " << s.initial_preset << "\n";
  if (s.initial_preset == "rough-tail") os << "s = " << s.initial_s.str() << "\n";
  emit_list(os, "coefficients", s.initial_coeffs);

  os << "\n[run]\n";
  os << "T = " << s.T.str() << "\n";
  if (s.h) os << "h = " << s.h->str() << "\n";
  os << "paths = " << s.paths << "\n";
  os << "seed = " << s.seed << "\n";
  if (s.truncation) os << "truncation = " << fmt_double(*s.truncation) << "\n";
  os << "oversample = " << s.oversample << "\n";

  if (!s.out_dir.empty() || s.prefix != "run") {
    os << "\n[outputs]\n";
    if (!s.out_dir.empty()) os << "directory = " << s.out_dir << "\n";
    if (s.prefix != "run") os << "prefix = " << s.prefix << "\n";
  }

  if (s.compare) {
    const auto& c = *s.compare;
    os << "\n[compare]\n";
    if (c.cutoff_b) os << "cutoff_b = " << c.cutoff_b << "\n";
    if (c.h_b) os << "h_b = " << c.h_b->str() << "\n";
    os << "seed_b = " << c.seed_b << "\n";
    if (c.paths) os << "paths = " << c.paths << "\n";
    os << "level = " << fmt_double(c.level) << "\n";
    os << "lambda = " << fmt_double(c.lambda) << "\n";
  }

  if (s.kolmogorov) {
    const auto& k = *s.kolmogorov;
    os << "\n[kolmogorov]\n";
    os << "m = " << k.m << "\n";
    os << "lambda = " << fmt_double(k.lambda) << "\n";
    os << "tol = " << fmt_double(k.tol) << "\n";
    os << "grid_points = " << k.grid_points << "\n";
    os << "gh_order = " << k.gh_order << "\n";
    os << "reg_c = " << fmt_double(k.reg_c) << "\n";
    os << "reg_eps = " << fmt_double(k.reg_eps) << "\n";
    os << "drift_bound = " << fmt_double(k.drift_bound) << "\n";
    os << "observable = " << k.observable << "\n";
    os << "t_lo = " << fmt_double(k.t_lo) << "\n";
    os << "t_hi = " << fmt_double(k.t_hi) << "\n";
    os << "t_count = " << k.t_count << "\n";
    os << "gamma = " << fmt_double(k.gamma) << "\n";
  }
  return os.str();
}

std::uint64_t digest(const std::string& canonical_text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical_text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string digest_hex(const ScenarioFile& s) {
  std::uint64_t h = digest(serialize(s));
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::string manifest_text(const ScenarioFile& s, const std::string& command,
                          const spectral::Spectrum& spec) {
  std::ostringstream os;
  os << "# spde-uniq-lab manifest: everything needed to reproduce the run\n";
  os << "# tool_version = 0.1.0\n";
  os << "# command = " << command << "\n";
  os << "# config_digest = fnv1a:" << digest_hex(s) << "\n";
  os << "# seed = " << s.seed << "\n";
  os << "# mode_ordering =";
  int shown = std::min(spec.cutoff, 8);
  for (int k = 0; k < shown; ++k) {
    os << " (";
    for (int i = 0; i < spec.dimension; ++i)
      os << (i ? "," : "") << spec.indices[k][i];
    os << ")";
  }
  if (spec.cutoff > shown) os << " ...";
  os << "\n";
  {
    std::ostringstream ev;
    ev.precision(17);
    for (double l : spec.eigenvalues) ev << l << ",";
    os << "# eigenvalue_digest = fnv1a:" << std::hex << digest(ev.str()) << std::dec
       << "\n";
  }
  os << "\n" << serialize(s);
  return os.str();
}

}  // namespace spde::config
