// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Scenario runner: thresholds first, then the ensemble, then artifact files
// under <output_dir>/<scenario name>/. Requires linking OpenSSL::Crypto.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <boost/version.hpp>
#include <openssl/evp.h>

#include "levysir/ensemble.hpp"
#include "levysir/error.hpp"
#include "levysir/estimators.hpp"
#include "levysir/scenario.hpp"
#include "levysir/thresholds.hpp"
#include "levysir/version.hpp"

namespace levysir {

/// Process exit status of the CLI.
enum class ExitCode : int { Ok = 0, Usage = 1, Config = 2, Numerical = 3, Io = 4 };

inline ExitCode exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidMeasure:
      return ExitCode::Config;
    case ErrorCode::IoError:
      return ExitCode::Io;
    default:
      return ExitCode::Numerical;
  }
}

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::IoError, "SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[k]);
  }
  return os.str();
}

/// Comma-separated writer; every failure surfaces as IoError.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(ErrorCode::IoError, "cannot create '" + path.string() + "'");
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out_ << ',';
      out_ << cells[k];
    }
    out_ << '\n';
    if (!out_) throw Error(ErrorCode::IoError, "write failed on '" + path_.string() + "'");
  }

  void close() {
    out_.close();
    if (!out_) throw Error(ErrorCode::IoError, "cannot finish '" + path_.string() + "'");
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
}

inline const std::vector<std::string>& paths_header() {
  static const std::vector<std::string> header = {
      "path_id",     "time_avg_S",   "time_avg_I",  "time_avg_R",        "time_avg_X",
      "time_avg_X2", "lyapunov_I",   "lyapunov_truncated", "final_S",    "final_I",
      "final_R",     "final_X",      "floor_activations",  "jump_count"};
  return header;
}

inline std::vector<std::string> paths_row(const PathSummary& p) {
  return {std::to_string(p.path_id),
          format_double(p.time_avg_s),
          format_double(p.time_avg_i),
          format_double(p.time_avg_r),
          format_double(p.time_avg_x),
          format_double(p.time_avg_x2),
          format_double(p.lyapunov_i),
          p.lyapunov_truncated ? "true" : "false",
          format_double(p.final_state.s),
          format_double(p.final_state.i),
          format_double(p.final_state.r),
          format_double(p.final_x),
          std::to_string(p.floor_activations),
          std::to_string(p.jump_count)};
}

inline void write_thresholds(const std::filesystem::path& path, const Scenario& sc,
                             const ThresholdReport& report) {
  std::vector<std::string> header{"scenario"};
  std::vector<std::string> values{sc.name};
  for (auto& [key, value] : threshold_record(report)) {
    header.push_back(key);
    values.push_back(value);
  }
  CsvWriter csv(path, header);
  csv.row(values);
  csv.close();
}

inline void write_histogram(const std::filesystem::path& path, const Histogram& h) {
  CsvWriter csv(path, {"bin_left", "bin_right", "mass"});
  for (std::size_t k = 0; k < h.mass.size(); ++k) {
    csv.row({format_double(h.bin_left(k)), format_double(h.bin_right(k)), format_double(h.mass[k])});
  }
  csv.close();
}

inline void write_trajectory(const std::filesystem::path& dir, std::uint64_t id,
                             const Trajectory& traj) {
  CsvWriter csv(dir / ("trajectory_" + std::to_string(id) + ".csv"), {"t", "S", "I", "R", "X"});
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto& s = traj.states[k];
    csv.row({format_double(traj.times[k]), format_double(s.s), format_double(s.i),
             format_double(s.r), format_double(traj.aux[k])});
  }
  csv.close();
  CsvWriter jumps(dir / ("jumps_" + std::to_string(id) + ".csv"), {"t", "eta"});
  for (const auto& e : traj.jump_events) jumps.row({format_double(e.t), format_double(e.eta)});
  jumps.close();
}

struct RunOptions {
  unsigned workers = 1;
  std::filesystem::path output_dir = "levysir-out";
};

struct RunResult {
  std::filesystem::path directory;
  ThresholdReport report;
  EnsembleSummary summary;
  std::optional<MomentBoundResult> moment_bound;
  std::optional<ErgodicityResult> ergodicity;
  PersistenceVerdict verdict;
};

/// Threshold report of a scenario at its configured moment exponent.
inline ThresholdReport scenario_thresholds(const Scenario& sc) {
  return classify(sc.params, sc.noise, sc.pexp);
}

/**
 * Runs a validated scenario and writes its artifacts. Throws Error:
 * NumericalBlowup (with path id) when a path diverges, IoError when the
 * output directory cannot be written.
 */
inline RunResult run_scenario(const Scenario& sc, const RunOptions& opts) {
  namespace fs = std::filesystem;
  RunResult result;
  result.directory = opts.output_dir / sc.name;
  std::error_code ec;
  fs::create_directories(result.directory, ec);
  if (ec) {
    throw Error(ErrorCode::IoError,
                "cannot create '" + result.directory.string() + "': " + ec.message());
  }
  const auto& dir = result.directory;
  const std::string config = to_ini(sc);
  write_text(dir / "config.ini", config);

  result.report = scenario_thresholds(sc);
  if (sc.wants(Output::Thresholds)) write_thresholds(dir / "thresholds.csv", sc, result.report);

  EnsembleOptions eo;
  eo.n_paths = sc.n_paths;
  eo.workers = opts.workers;
  eo.pexp = sc.pexp;
  eo.extinction_cutoff = sc.extinction_cutoff;
  eo.keep_trajectories = sc.wants(Output::Trajectories) ? sc.trajectory_paths : 0;
  auto ensemble = run_ensemble(sc.params, sc.noise, sc.init, sc.x0, sc.sim, eo);
  result.summary = std::move(ensemble.summary);
  const auto& ens = result.summary;
  result.verdict = persistence_verdict(ens, result.report);

  if (result.report.chi2 > 0.0) {
    result.moment_bound = moment_bound_check(ens, sc.params, sc.noise, sc.pexp, sc.init.total());
  }
  if (sc.ergodicity_t_end > 0.0) {
    SimConfig long_cfg = sc.sim;
    long_cfg.t_end = sc.ergodicity_t_end;
    long_cfg.record_stride = SimConfig::default_stride(long_cfg.t_end, long_cfg.dt);
    // Path id n_paths: a stream no ensemble member uses.
    const auto long_path = integrate_sir_jump(sc.params, sc.noise, sc.init, long_cfg, sc.n_paths);
    result.ergodicity = ergodicity_check(long_path, ens, Component::I);
  }

  if (sc.wants(Output::Summary)) {
    CsvWriter paths(dir / "paths.csv", paths_header());
    for (const auto& p : ens.paths) paths.row(paths_row(p));
    paths.close();

    CsvWriter moments(dir / "moments.csv", {"t", "moment_mean", "moment_se", "bound"});
    const double c1 = result.moment_bound ? result.moment_bound->chi1 : 0.0;
    const double c2 = result.moment_bound ? result.moment_bound->chi2 : 0.0;
    const double start = std::pow(sc.init.total(), 2.0 * sc.pexp);
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
      const auto m = ens.moment(k);
      const double bound = result.moment_bound
                               ? start * std::exp(-sc.pexp * c2 * ens.times[k]) + 2.0 * c1 / c2
                               : std::numeric_limits<double>::quiet_NaN();
      moments.row({format_double(ens.times[k]), format_double(m.mean), format_double(m.se),
                   format_double(bound)});
    }
    moments.close();

    CsvWriter summary(dir / "summary.csv", {"metric", "value"});
    auto put = [&](const std::string& key, const std::string& value) { summary.row({key, value}); };
    auto put_estimate = [&](const std::string& key, const Estimate& e) {
      put(key + "_mean", format_double(e.mean));
      put(key + "_se", format_double(e.se));
    };
    put("n_paths", std::to_string(ens.n_paths()));
    put("t_end", format_double(ens.t_end()));
    put("classification", std::string(to_string(result.report.classification)));
    put_estimate("time_avg_I", ens.time_avg_i());
    put_estimate("lyapunov_I", ens.lyapunov_i());
    put_estimate("final_S", ens.final_component(Component::S));
    put_estimate("final_I", ens.final_component(Component::I));
    put_estimate("final_R", ens.final_component(Component::R));
    put("extinct_fraction", format_double(ens.extinct_fraction()));
    put("theory_agrees", result.verdict.agree ? "true" : "false");
    if (result.moment_bound) {
      put("moment_bound_ok", result.moment_bound->ok ? "true" : "false");
      put("moment_bound_worst_margin", format_double(result.moment_bound->worst_margin));
    }
    summary.close();
  }

  if (sc.wants(Output::Histograms)) {
    const auto states = ens.final_states();
    const auto h = stationary_histogram(states, sc.histogram_bins);
    write_histogram(dir / "histogram_S.csv", h.s);
    write_histogram(dir / "histogram_I.csv", h.i);
    write_histogram(dir / "histogram_R.csv", h.r);
  }

  if (sc.wants(Output::Trajectories)) {
    for (std::size_t k = 0; k < ensemble.trajectories.size(); ++k) {
      write_trajectory(dir, k, ensemble.trajectories[k]);
    }
    const auto ode = integrate_deterministic(sc.params, sc.init, sc.sim);
    CsvWriter det(dir / "deterministic.csv", {"t", "S", "I", "R"});
    for (std::size_t k = 0; k < ode.times.size(); k += sc.sim.record_stride) {
      const auto& s = ode.states[k];
      det.row({format_double(ode.times[k]), format_double(s.s), format_double(s.i),
               format_double(s.r)});
    }
    det.close();
  }

  if (result.ergodicity) {
    const auto& e = *result.ergodicity;
    CsvWriter csv(dir / "ergodicity.csv",
                  {"component", "long_t_end", "long_average", "long_se", "snapshot_t",
                   "ensemble_mean", "ensemble_se", "discrepancy", "tolerance", "pass"});
    csv.row({"I", format_double(sc.ergodicity_t_end), format_double(e.long_average),
             format_double(e.long_se), format_double(ens.t_end()), format_double(e.ensemble_mean),
             format_double(e.ensemble_se), format_double(e.discrepancy),
             format_double(e.tolerance), e.pass ? "true" : "false"});
    csv.close();
  }

  std::ostringstream manifest;
  manifest << "scenario = " << sc.name << '\n'
           << "config_sha256 = " << sha256_hex(config) << '\n'
           << "seed = " << sc.sim.seed << '\n'
           << "workers = " << opts.workers << '\n'
           << "n_paths = " << sc.n_paths << '\n'
           << "levysir_version = " << kVersion << '\n'
           << "boost_version = " << BOOST_LIB_VERSION << '\n'
           << "compiler = " << compiler_id() << '\n';
  write_text(dir / "manifest.txt", manifest.str());
  return result;
}

}  // namespace levysir
