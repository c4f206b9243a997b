// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Scenario files: INI text with sections [run], [model], [noise], [jump] and
// [sim]. Parsing is strict (unknown keys are errors) and every problem is
// reported with its key path. `to_ini` writes the normalized form, which
// parses back to an equal Scenario.

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "levysir/error.hpp"
#include "levysir/estimators.hpp"
#include "levysir/levy_measure.hpp"
#include "levysir/parameters.hpp"
#include "levysir/sde.hpp"
#include "levysir/text.hpp"

namespace levysir {

enum class Output : unsigned { Thresholds = 1, Summary = 2, Histograms = 4, Trajectories = 8 };

inline constexpr std::array<std::pair<Output, std::string_view>, 4> kOutputNames = {{
    {Output::Thresholds, "thresholds"},
    {Output::Summary, "summary"},
    {Output::Histograms, "histograms"},
    {Output::Trajectories, "trajectories"},
}};

struct Scenario {
  std::string name;
  EpidemicParameters params;
  double mu2 = 0.0;  // as configured; params.alpha = mu2 - mu1
  NoiseSpec noise;
  State init;
  double x0 = 0.0;  // auxiliary process start, defaults to N(0)
  SimConfig sim;
  std::size_t n_paths = 1;
  unsigned outputs = static_cast<unsigned>(Output::Thresholds) |
                     static_cast<unsigned>(Output::Summary);
  double pexp = 1.0;
  double extinction_cutoff = 1e-4;
  std::size_t histogram_bins = 50;
  std::size_t trajectory_paths = 1;  // trajectories are written for path ids below this
  double ergodicity_t_end = 0.0;     // 0 disables the long-path comparison

  bool wants(Output o) const noexcept { return (outputs & static_cast<unsigned>(o)) != 0; }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

namespace pt = boost::property_tree;

inline const std::map<std::string, std::set<std::string>, std::less<>>& known_keys() {
  static const std::map<std::string, std::set<std::string>, std::less<>> keys = {
      {"run",
       {"name", "n_paths", "outputs", "pexp", "extinction_cutoff", "histogram_bins",
        "trajectory_paths", "ergodicity_t_end"}},
      {"model", {"A", "mu1", "mu2", "beta", "gamma"}},
      {"noise", {"sigma1", "sigma2"}},
      {"jump", {"kind", "mass", "eta", "marks", "density_table", "nodes"}},
      {"sim",
       {"S0", "I0", "R0", "X0", "t_end", "dt", "seed", "positivity_floor", "record_stride",
        "ceiling"}},
  };
  return keys;
}

/// Collects typed values from a parsed tree; errors accumulate instead of throwing.
class ConfigReader {
 public:
  explicit ConfigReader(const pt::ptree& root) : root_(root) {}

  std::vector<std::string>& errors() { return errors_; }

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    const auto sec = root_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    const auto value = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!value) return std::nullopt;
    return std::string(trim(*value));
  }

  bool has(const std::string& section, const std::string& key) {
    return raw(section, key).has_value();
  }

  std::optional<double> real(const std::string& section, const std::string& key,
                             std::optional<double> fallback) {
    const auto text = raw(section, key);
    if (!text) {
      if (!fallback) errors_.push_back(section + "." + key + ": required key is missing");
      return fallback;
    }
    const auto v = parse_double(*text);
    if (!v || !std::isfinite(*v)) {
      errors_.push_back(section + "." + key + ": expected a finite number, got '" + *text + "'");
      return std::nullopt;
    }
    return v;
  }

  template <class Int>
  std::optional<Int> integer(const std::string& section, const std::string& key,
                             std::optional<Int> fallback) {
    const auto text = raw(section, key);
    if (!text) {
      if (!fallback) errors_.push_back(section + "." + key + ": required key is missing");
      return fallback;
    }
    const auto v = parse_integer<Int>(*text);
    if (!v) {
      errors_.push_back(section + "." + key + ": expected a nonnegative integer, got '" + *text +
                        "'");
    }
    return v;
  }

  /// "a:b, c:d" pairs.
  std::optional<std::vector<std::pair<double, double>>> pairs(const std::string& section,
                                                              const std::string& key) {
    const auto text = raw(section, key);
    if (!text) {
      errors_.push_back(section + "." + key + ": required key is missing");
      return std::nullopt;
    }
    std::vector<std::pair<double, double>> out;
    std::string_view rest = *text;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      const auto colon = item.find(':');
      const auto a = colon == std::string_view::npos ? std::nullopt : parse_double(item.substr(0, colon));
      const auto b = colon == std::string_view::npos ? std::nullopt : parse_double(item.substr(colon + 1));
      if (!a || !b) {
        errors_.push_back(section + "." + key + ": malformed entry '" + std::string(item) +
                          "', expected eta:value");
        return std::nullopt;
      }
      out.emplace_back(*a, *b);
    }
    if (out.empty()) errors_.push_back(section + "." + key + ": list is empty");
    return out;
  }

  void check_layout() {
    for (const auto& [section, child] : root_) {
      if (child.empty()) {
        errors_.push_back(section + ": key outside of any section");
        continue;
      }
      const auto known = known_keys().find(section);
      if (known == known_keys().end()) {
        errors_.push_back(section + ": unknown section");
        continue;
      }
      for (const auto& [key, value] : child) {
        if (!known->second.contains(key)) errors_.push_back(section + "." + key + ": unknown key");
      }
    }
  }

 private:
  const pt::ptree& root_;
  std::vector<std::string> errors_;
};

inline std::string join_pairs(const std::vector<std::pair<double, double>>& xs) {
  std::string out;
  for (const auto& [a, b] : xs) {
    if (!out.empty()) out += ", ";
    out += format_double(a) + ":" + format_double(b);
  }
  return out;
}

inline std::optional<JumpMeasure> read_jump(ConfigReader& in) {
  auto& errors = in.errors();
  const std::string kind = in.raw("jump", "kind").value_or("none");
  auto forbid = [&](std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
      if (in.has("jump", key)) {
        errors.push_back(std::string("jump.") + key + ": not used by jump.kind = " + kind);
      }
    }
  };
  try {
    if (kind == "none") {
      forbid({"mass", "eta", "marks", "density_table", "nodes"});
      return JumpMeasure::none();
    }
    if (kind == "constant") {
      forbid({"marks", "density_table", "nodes"});
      const auto eta = in.real("jump", "eta", std::nullopt);
      const auto mass = in.real("jump", "mass", std::nullopt);
      if (!eta || !mass) return std::nullopt;
      return JumpMeasure::constant(*eta, *mass);
    }
    if (kind == "discrete") {
      forbid({"mass", "eta", "density_table", "nodes"});
      const auto marks = in.pairs("jump", "marks");
      if (!marks) return std::nullopt;
      std::vector<Atom> atoms;
      for (const auto& [eta, w] : *marks) atoms.push_back({eta, w});
      return JumpMeasure::discrete(std::move(atoms));
    }
    if (kind == "density") {
      forbid({"eta", "marks"});
      const auto table = in.pairs("jump", "density_table");
      const auto mass = in.real("jump", "mass", std::nullopt);
      const auto nodes =
          in.integer<std::size_t>("jump", "nodes", std::size_t{JumpMeasure::kDefaultNodes});
      if (!table || !mass || !nodes) return std::nullopt;
      std::vector<DensityPoint> points;
      for (const auto& [eta, f] : *table) points.push_back({eta, f});
      return JumpMeasure::density(std::move(points), *mass, *nodes);
    }
    errors.push_back("jump.kind: expected one of none, constant, discrete, density; got '" +
                     kind + "'");
  } catch (const Error& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    errors.push_back(msg.rfind("jump.", 0) == 0 ? msg : "jump: " + msg);
  }
  return std::nullopt;
}

inline std::optional<unsigned> read_outputs(ConfigReader& in) {
  const auto text = in.raw("run", "outputs");
  if (!text) return static_cast<unsigned>(Output::Thresholds) | static_cast<unsigned>(Output::Summary);
  unsigned mask = 0;
  std::string_view rest = *text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto it = std::find_if(kOutputNames.begin(), kOutputNames.end(),
                                 [&](const auto& o) { return o.second == item; });
    if (it == kOutputNames.end()) {
      in.errors().push_back("run.outputs: unknown artifact '" + std::string(item) +
                            "', expected thresholds, summary, histograms or trajectories");
      return std::nullopt;
    }
    mask |= static_cast<unsigned>(it->first);
  }
  return mask;
}

}  // namespace detail

struct ConfigResult {
  std::optional<Scenario> scenario;
  std::vector<std::string> errors;  // "key.path: message"

  bool ok() const noexcept { return scenario.has_value(); }
};

/// Parses and validates scenario text. Never throws for bad input.
inline ConfigResult parse_scenario(const std::string& text) {
  namespace pt = boost::property_tree;
  ConfigResult result;
  pt::ptree root;
  try {
    std::istringstream is(text);
    pt::read_ini(is, root);
  } catch (const pt::ini_parser_error& e) {
    result.errors.push_back("line " + std::to_string(e.line()) + ": " + e.message());
    return result;
  }

  detail::ConfigReader in(root);
  in.check_layout();
  auto& errors = in.errors();

  Scenario sc;
  if (auto name = in.raw("run", "name"); name && !name->empty()) {
    sc.name = *name;
    if (sc.name.find_first_of("/\\") != std::string::npos || sc.name == "." || sc.name == "..") {
      errors.push_back("run.name: must be usable as a directory name");
    }
  } else {
    errors.push_back("run.name: required key is missing");
  }
  const auto n_paths = in.integer<std::size_t>("run", "n_paths", std::size_t{1});
  const auto outputs = detail::read_outputs(in);
  const auto pexp = in.real("run", "pexp", 1.0);
  const auto cutoff = in.real("run", "extinction_cutoff", 1e-4);
  const auto bins = in.integer<std::size_t>("run", "histogram_bins", std::size_t{50});
  const auto traj = in.integer<std::size_t>("run", "trajectory_paths", std::size_t{1});
  const auto erg = in.real("run", "ergodicity_t_end", 0.0);

  const auto A = in.real("model", "A", std::nullopt);
  const auto mu1 = in.real("model", "mu1", std::nullopt);
  const auto mu2 = in.real("model", "mu2", std::nullopt);
  const auto beta = in.real("model", "beta", std::nullopt);
  const auto gamma = in.real("model", "gamma", std::nullopt);

  const auto sigma1 = in.real("noise", "sigma1", std::nullopt);
  const auto sigma2 = in.real("noise", "sigma2", std::nullopt);
  const auto jump = detail::read_jump(in);

  const auto s0 = in.real("sim", "S0", std::nullopt);
  const auto i0 = in.real("sim", "I0", std::nullopt);
  const auto r0 = in.real("sim", "R0", std::nullopt);
  const auto t_end = in.real("sim", "t_end", SimConfig{}.t_end);
  const auto dt = in.real("sim", "dt", SimConfig{}.dt);
  const auto seed = in.integer<std::uint64_t>("sim", "seed", SimConfig{}.seed);
  const auto floor = in.real("sim", "positivity_floor", SimConfig{}.positivity_floor);
  const auto ceiling = in.real("sim", "ceiling", SimConfig{}.ceiling);
  std::optional<std::size_t> stride_default;
  if (t_end && dt && *dt > 0.0 && *t_end > 0.0) {
    stride_default = SimConfig::default_stride(*t_end, *dt);
  } else {
    stride_default = std::size_t{1};
  }
  const auto stride = in.integer<std::size_t>("sim", "record_stride", stride_default);
  std::optional<double> x0_default;
  if (s0 && i0 && r0) x0_default = *s0 + *i0 + *r0;
  // Without a complete initial state the X0 default is moot; the S0/I0/R0 errors cover it.
  const auto x0 = in.real("sim", "X0", x0_default ? x0_default : std::optional<double>(1.0));

  if (n_paths) {
    sc.n_paths = *n_paths;
    if (sc.n_paths < 1) errors.push_back("run.n_paths: must be >= 1");
  }
  if (outputs) sc.outputs = *outputs;
  if (pexp) {
    sc.pexp = *pexp;
    if (!(sc.pexp >= 0.5)) errors.push_back("run.pexp: must be >= 0.5");
  }
  if (cutoff) {
    sc.extinction_cutoff = *cutoff;
    if (!(sc.extinction_cutoff > 0.0)) errors.push_back("run.extinction_cutoff: must be > 0");
  }
  if (bins) {
    sc.histogram_bins = *bins;
    if (sc.histogram_bins < 1) errors.push_back("run.histogram_bins: must be >= 1");
  }
  if (traj) sc.trajectory_paths = *traj;
  if (erg) sc.ergodicity_t_end = *erg;

  if (A && mu1 && mu2 && beta && gamma) {
    sc.mu2 = *mu2;
    sc.params = EpidemicParameters::from_mu2(*A, *mu1, *mu2, *beta, *gamma);
    for (auto& v : sc.params.violations()) errors.push_back(std::move(v));
  }
  if (sigma1) sc.noise.sigma1 = *sigma1;
  if (sigma2) sc.noise.sigma2 = *sigma2;
  for (auto& v : sc.noise.violations()) errors.push_back(std::move(v));
  if (jump) sc.noise.jump = *jump;

  if (s0 && i0 && r0) {
    sc.init = {*s0, *i0, *r0};
    if (!(*s0 > 0.0)) errors.push_back("sim.S0: must be > 0");
    if (!(*i0 > 0.0)) errors.push_back("sim.I0: must be > 0");
    if (!(*r0 >= 0.0)) errors.push_back("sim.R0: must be >= 0");
  }
  if (x0) {
    sc.x0 = *x0;
    if (!(sc.x0 > 0.0)) errors.push_back("sim.X0: must be > 0");
  }
  if (t_end) sc.sim.t_end = *t_end;
  if (dt) sc.sim.dt = *dt;
  if (seed) sc.sim.seed = *seed;
  if (floor) sc.sim.positivity_floor = *floor;
  if (ceiling) sc.sim.ceiling = *ceiling;
  if (stride) sc.sim.record_stride = *stride;
  for (auto& v : sc.sim.violations()) errors.push_back(std::move(v));

  if (sc.wants(Output::Histograms) && sc.n_paths < kMinHistogramSamples) {
    errors.push_back("run.outputs: histograms need run.n_paths >= " +
                     std::to_string(kMinHistogramSamples));
  }
  if (sc.ergodicity_t_end != 0.0 && !(sc.ergodicity_t_end >= 10.0 * sc.sim.t_end)) {
    errors.push_back("run.ergodicity_t_end: must be 0 (off) or >= 10 * sim.t_end");
  }

  // Moment and jump-integrability conditions on the noise, once it is complete.
  if (errors.empty()) {
    try {
      const auto a = check_assumptions(sc.noise.jump, sc.noise.sigma1, sc.params.mu1, sc.pexp);
      if (!a.a5_ok) {
        errors.push_back("noise: moment decay rate chi2(p = " + format_double(sc.pexp) +
                         ") = " + format_double(a.a5_chi2) + " must be > 0");
      }
    } catch (const Error& e) {
      errors.push_back(std::string("jump: ") + e.what());
    }
  }

  result.errors = std::move(errors);
  if (result.errors.empty()) result.scenario = std::move(sc);
  return result;
}

/// Parses or throws ConfigError carrying every message, one per line.
inline Scenario validate_config(const std::string& text) {
  auto result = parse_scenario(text);
  if (result.ok()) return std::move(*result.scenario);
  std::string msg = std::to_string(result.errors.size()) + " problem(s) in scenario";
  for (const auto& e : result.errors) msg += "\n  " + e;
  throw Error(ErrorCode::ConfigError, msg);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read '" + path + "'");
  return os.str();
}

/// Normalized text: every key present, canonical order, shortest round-trip numbers.
inline std::string to_ini(const Scenario& sc) {
  std::ostringstream os;
  auto kv = [&](std::string_view key, const std::string& value) {
    os << key << " = " << value << '\n';
  };
  auto num = [&](std::string_view key, double value) { kv(key, format_double(value)); };
  auto count = [&](std::string_view key, std::uint64_t value) { kv(key, std::to_string(value)); };

  std::string outputs;
  for (const auto& [flag, label] : kOutputNames) {
    if (!sc.wants(flag)) continue;
    if (!outputs.empty()) outputs += ", ";
    outputs += label;
  }

  os << "[run]\n";
  kv("name", sc.name);
  count("n_paths", sc.n_paths);
  kv("outputs", outputs);
  num("pexp", sc.pexp);
  num("extinction_cutoff", sc.extinction_cutoff);
  count("histogram_bins", sc.histogram_bins);
  count("trajectory_paths", sc.trajectory_paths);
  num("ergodicity_t_end", sc.ergodicity_t_end);

  os << "\n[model]\n";
  num("A", sc.params.A);
  num("mu1", sc.params.mu1);
  num("mu2", sc.mu2);
  num("beta", sc.params.beta);
  num("gamma", sc.params.gamma);

  os << "\n[noise]\n";
  num("sigma1", sc.noise.sigma1);
  num("sigma2", sc.noise.sigma2);

  os << "\n[jump]\n";
  const auto& jm = sc.noise.jump;
  switch (jm.kind()) {
    case MarkKind::None:
      kv("kind", "none");
      break;
    case MarkKind::Constant:
      kv("kind", "constant");
      num("mass", jm.total_mass());
      num("eta", jm.eta());
      break;
    case MarkKind::Discrete: {
      kv("kind", "discrete");
      std::vector<std::pair<double, double>> marks;
      for (const auto& a : jm.atoms()) marks.emplace_back(a.eta, a.weight);
      kv("marks", detail::join_pairs(marks));
      break;
    }
    case MarkKind::Density: {
      kv("kind", "density");
      num("mass", jm.total_mass());
      std::vector<std::pair<double, double>> table;
      for (const auto& d : jm.density_table()) table.emplace_back(d.eta, d.density);
      kv("density_table", detail::join_pairs(table));
      count("nodes", jm.nodes());
      break;
    }
  }

  os << "\n[sim]\n";
  num("S0", sc.init.s);
  num("I0", sc.init.i);
  num("R0", sc.init.r);
  num("X0", sc.x0);
  num("t_end", sc.sim.t_end);
  num("dt", sc.sim.dt);
  count("seed", sc.sim.seed);
  num("positivity_floor", sc.sim.positivity_floor);
  count("record_stride", sc.sim.record_stride);
  num("ceiling", sc.sim.ceiling);
  return os.str();
}

}  // namespace levysir
