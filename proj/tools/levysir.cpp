// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

// levysir: command-line runner for stochastic SIR scenarios with Levy jumps.
//
//   levysir run <config> [--seed N] [--workers N] [--output-dir DIR]
//   levysir validate <config>
//   levysir thresholds <config>
//   levysir presets list
//   levysir presets show <name>
//
// <config> is an INI file or the name of a built-in preset. LEVYSIR_OUTPUT_DIR
// and LEVYSIR_WORKERS supply defaults for --output-dir and --workers.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "levysir/presets.hpp"
#include "levysir/runner.hpp"

namespace {

using levysir::Error;
using levysir::ErrorCode;
using levysir::ExitCode;

int code(ExitCode c) { return static_cast<int>(c); }

/// A file path wins over a preset of the same name.
levysir::Scenario load(const std::string& source) {
  if (std::filesystem::is_regular_file(source)) {
    return levysir::validate_config(levysir::read_text_file(source));
  }
  if (auto preset = levysir::find_preset(source)) return *preset;
  throw Error(ErrorCode::ConfigError, "'" + source + "' is neither a readable file nor a preset");
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

unsigned default_workers() {
  if (auto v = env("LEVYSIR_WORKERS")) {
    const auto n = levysir::parse_integer<unsigned>(*v);
    if (!n || *n == 0) {
      throw Error(ErrorCode::ConfigError, "LEVYSIR_WORKERS must be a positive integer, got '" + *v + "'");
    }
    return *n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void print_thresholds(const levysir::Scenario& sc) {
  const auto record = levysir::threshold_record(levysir::scenario_thresholds(sc));
  std::cout << "scenario";
  for (const auto& [key, value] : record) std::cout << ',' << key;
  std::cout << '\n' << sc.name;
  for (const auto& [key, value] : record) std::cout << ',' << value;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic SIR with Levy jumps: thresholds, ensembles and diagnostics"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::string> output_dir;

  auto* run = app.add_subcommand("run", "Run a scenario and write its artifacts");
  run->add_option("config", config, "Scenario INI file or preset name")->required();
  run->add_option("--seed", seed, "Override sim.seed");
  run->add_option("--workers", workers, "Worker threads (default: LEVYSIR_WORKERS or all cores)")
      ->check(CLI::PositiveNumber);
  run->add_option("--output-dir", output_dir,
                  "Parent directory for results (default: LEVYSIR_OUTPUT_DIR or levysir-out)");

  auto* validate = app.add_subcommand("validate", "Check a scenario and print its normalized form");
  validate->add_option("config", config, "Scenario INI file or preset name")->required();

  auto* thresholds = app.add_subcommand("thresholds", "Print the threshold report as CSV");
  thresholds->add_option("config", config, "Scenario INI file or preset name")->required();

  auto* presets = app.add_subcommand("presets", "Built-in scenarios");
  presets->require_subcommand(1);
  auto* list = presets->add_subcommand("list", "List preset names");
  std::string preset_name;
  auto* show = presets->add_subcommand("show", "Print a preset in normalized INI form");
  show->add_option("name", preset_name, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int status = app.exit(e);
    return status == 0 ? 0 : code(ExitCode::Usage);
  }

  try {
    if (*list) {
      for (const auto& p : levysir::presets()) std::cout << p.name << '\t' << p.description << '\n';
      return 0;
    }
    if (*show) {
      auto sc = levysir::find_preset(preset_name);
      if (!sc) throw Error(ErrorCode::ConfigError, "unknown preset '" + preset_name + "'");
      std::cout << levysir::to_ini(*sc);
      return 0;
    }
    auto sc = load(config);
    if (*validate) {
      std::cout << levysir::to_ini(sc);
      return 0;
    }
    if (*thresholds) {
      print_thresholds(sc);
      return 0;
    }

    if (seed) sc.sim.seed = *seed;
    levysir::RunOptions opts;
    opts.workers = workers ? *workers : default_workers();
    opts.output_dir = output_dir ? *output_dir : env("LEVYSIR_OUTPUT_DIR").value_or("levysir-out");
    const auto result = levysir::run_scenario(sc, opts);
    const auto& ens = result.summary;
    std::cout << "scenario " << sc.name << ": " << ens.n_paths() << " paths to t = "
              << levysir::format_double(ens.t_end()) << ", classification "
              << levysir::to_string(result.report.classification) << '\n'
              << "  " << result.verdict.detail << (result.verdict.agree ? " (agrees)" : " (DISAGREES)")
              << '\n';
    if (result.ergodicity) {
      const auto& e = *result.ergodicity;
      std::cout << "  ergodicity: long-path mean " << levysir::format_double(e.long_average)
                << " vs snapshot mean " << levysir::format_double(e.ensemble_mean)
                << (e.pass ? " (pass)" : " (fail)") << '\n';
    }
    std::cout << "  results in " << result.directory.string() << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "levysir: " << e.what() << '\n';
    return code(levysir::exit_code_for(e.code()));
  } catch (const std::exception& e) {
    std::cerr << "levysir: " << e.what() << '\n';
    return code(ExitCode::Numerical);
  }
}
