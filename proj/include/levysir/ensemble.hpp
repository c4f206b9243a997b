// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

#include "levysir/estimators.hpp"
#include "levysir/sde.hpp"

namespace levysir {

struct EnsembleOptions {
  std::size_t n_paths = 1;
  unsigned workers = 1;
  double pexp = 1.0;
  double extinction_cutoff = 1e-4;
  std::size_t keep_trajectories = 0;  // full trajectories for path ids below this
};

struct EnsembleResult {
  EnsembleSummary summary;
  std::vector<Trajectory> trajectories;  // ascending path id
};

namespace detail {

struct TeeObserver {
  PathReducer& reducer;
  TrajectoryRecorder& recorder;
  void on_record(double t, const State& s, double x) {
    reducer.on_record(t, s, x);
    recorder.on_record(t, s, x);
  }
  void on_jump(double t, double eta) { recorder.on_jump(t, eta); }
  void on_floor(double t, bool infected) { reducer.on_floor(t, infected); }
};

}  // namespace detail

/**
 * Integrates paths 0..n_paths-1 of the coupled (SIR, X) system with X(0) = x0.
 * Path k always draws from stream (cfg.seed, k); paths are split into fixed
 * contiguous blocks, one per worker, and partial summaries are merged in
 * block order. Per-path results therefore do not depend on `workers`.
 */
inline EnsembleResult run_ensemble(const EpidemicParameters& p, const NoiseSpec& n, State init,
                                   double x0, const SimConfig& cfg, const EnsembleOptions& opts) {
  if (opts.n_paths < 1) throw Error(ErrorCode::InvalidArgument, "n_paths must be >= 1");
  const std::size_t workers =
      std::clamp<std::size_t>(opts.workers, 1, std::max<std::size_t>(1, opts.n_paths));

  struct Partial {
    EnsembleSummary summary;
    std::vector<Trajectory> trajectories;
    std::exception_ptr error;
  };
  std::vector<Partial> partials(workers);
  std::atomic<bool> abort{false};

  auto work = [&](std::size_t w) {
    Partial& part = partials[w];
    part.summary.pexp = opts.pexp;
    part.summary.extinction_cutoff = opts.extinction_cutoff;
    const std::size_t begin = w * opts.n_paths / workers;
    const std::size_t end = (w + 1) * opts.n_paths / workers;
    try {
      for (std::size_t k = begin; k < end && !abort.load(std::memory_order_relaxed); ++k) {
        PoissonDriver driver(n.jump, cfg.seed, k);
        PathReducer reducer(k, part.summary);
        if (k < opts.keep_trajectories) {
          TrajectoryRecorder recorder(true, true);
          detail::TeeObserver tee{reducer, recorder};
          const auto diag = simulate_path(p, n, Systems::Both, init, x0, cfg, driver, tee, k);
          reducer.finish(diag);
          part.trajectories.push_back(recorder.finish(diag));
        } else {
          const auto diag = simulate_path(p, n, Systems::Both, init, x0, cfg, driver, reducer, k);
          reducer.finish(diag);
        }
      }
    } catch (...) {
      part.error = std::current_exception();
      abort = true;
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  EnsembleResult result;
  result.summary.pexp = opts.pexp;
  result.summary.extinction_cutoff = opts.extinction_cutoff;
  for (auto& part : partials) {
    if (part.error) std::rethrow_exception(part.error);
  }
  for (auto& part : partials) {
    result.summary.merge(part.summary);
    for (auto& t : part.trajectories) result.trajectories.push_back(std::move(t));
  }
  return result;
}

}  // namespace levysir
