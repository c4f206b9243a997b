// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "levysir/error.hpp"
#include "levysir/parameters.hpp"
#include "levysir/sde.hpp"
#include "levysir/thresholds.hpp"

namespace levysir {

enum class Component { S, I, R, N, X };

constexpr std::string_view to_string(Component c) {
  switch (c) {
    case Component::S: return "S";
    case Component::I: return "I";
    case Component::R: return "R";
    case Component::N: return "N";
    case Component::X: return "X";
  }
  return "?";
}

inline double component_of(const State& s, double x, Component c) {
  switch (c) {
    case Component::S: return s.s;
    case Component::I: return s.i;
    case Component::R: return s.r;
    case Component::N: return s.total();
    case Component::X: return x;
  }
  return 0.0;
}

/// Running trapezoidal integral of a sampled function.
class TrapezoidAccumulator {
 public:
  void add(double t, double v) {
    if (count_ == 0) {
      first_t_ = t;
    } else {
      integral_ += 0.5 * (t - last_t_) * (v + last_v_);
    }
    last_t_ = t;
    last_v_ = v;
    ++count_;
  }

  std::size_t count() const noexcept { return count_; }
  double integral() const noexcept { return integral_; }
  double span() const noexcept { return last_t_ - first_t_; }
  double average() const { return integral_ / span(); }

 private:
  double integral_ = 0.0;
  double first_t_ = 0.0;
  double last_t_ = 0.0;
  double last_v_ = 0.0;
  std::size_t count_ = 0;
};

namespace detail {

inline void require_component(const Trajectory& traj, Component c) {
  if (c == Component::X ? !traj.has_aux() : !traj.has_states()) {
    throw Error(ErrorCode::InvalidArgument,
                "trajectory does not carry component " + std::string(to_string(c)));
  }
}

inline double value_at(const Trajectory& traj, std::size_t k, Component c) {
  if (c == Component::X) return traj.aux[k];
  return component_of(traj.states[k], 0.0, c);
}

}  // namespace detail

/// (1/T) int_0^T component(t)^power dt by the trapezoidal rule on the recorded grid.
inline double time_average(const Trajectory& traj, Component c, int power = 1) {
  if (traj.times.size() < 2) {
    throw Error(ErrorCode::EmptyTrajectory, "time average needs at least two recorded points");
  }
  if (power < 1) throw Error(ErrorCode::InvalidArgument, "power must be >= 1");
  detail::require_component(traj, c);
  TrapezoidAccumulator acc;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    acc.add(traj.times[k], std::pow(detail::value_at(traj, k, c), power));
  }
  return acc.average();
}

struct LyapunovEstimate {
  double value = 0.0;
  double horizon = 0.0;
  bool floor_truncated = false;
};

/// ln(I(T)/I(0))/T. If the infected compartment hit the positivity floor, T is
/// the last recorded instant before the first hit and the estimate is flagged.
inline LyapunovEstimate lyapunov_exponent(const Trajectory& traj) {
  if (traj.times.size() < 2 || !traj.has_states()) {
    throw Error(ErrorCode::EmptyTrajectory, "Lyapunov estimate needs a recorded SIR path");
  }
  const double i0 = traj.states.front().i;
  if (!(i0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "I(0) must be > 0");

  std::size_t last = traj.times.size() - 1;
  LyapunovEstimate est;
  if (traj.first_floor_time_i) {
    est.floor_truncated = true;
    while (last > 0 && traj.times[last] >= *traj.first_floor_time_i) --last;
  }
  est.horizon = traj.times[last] - traj.times.front();
  est.value = est.horizon > 0.0 ? std::log(traj.states[last].i / i0) / est.horizon : 0.0;
  return est;
}

/// Mean with standard error; `low`/`high` are mean -/+ 3 SE.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  double low() const { return mean - 3.0 * se; }
  double high() const { return mean + 3.0 * se; }
};

inline Estimate estimate(std::span<const double> xs) {
  Estimate e;
  e.n = xs.size();
  if (xs.empty()) return e;
  double sum = 0.0;
  for (double x : xs) sum += x;
  e.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return e;
}

struct PathSummary {
  std::uint64_t path_id = 0;
  double time_avg_s = 0.0;
  double time_avg_i = 0.0;
  double time_avg_r = 0.0;
  double time_avg_x = 0.0;
  double time_avg_x2 = 0.0;
  double lyapunov_i = 0.0;
  bool lyapunov_truncated = false;
  State final_state;
  double final_x = 0.0;
  std::size_t floor_activations = 0;
  std::size_t jump_count = 0;

  friend bool operator==(const PathSummary&, const PathSummary&) = default;
};

/**
 * Per-path reductions plus per-recorded-time sums of N^{2p}. Partial
 * summaries over disjoint path sets merge associatively (sums are re-added in
 * merge order, so results are identical up to floating-point reassociation).
 */
struct EnsembleSummary {
  double pexp = 1.0;
  double extinction_cutoff = 1e-4;
  std::vector<PathSummary> paths;  // ascending path_id
  std::vector<double> times;
  std::vector<double> moment_sum;    // sum over paths of N(t)^{2p}
  std::vector<double> moment_sumsq;  // sum over paths of N(t)^{4p}

  std::size_t n_paths() const noexcept { return paths.size(); }
  double t_end() const { return times.empty() ? 0.0 : times.back(); }

  void merge(const EnsembleSummary& other) {
    if (paths.empty() && times.empty()) {
      *this = other;
      return;
    }
    if (other.paths.empty()) return;
    if (other.times.size() != times.size() || other.pexp != pexp) {
      throw Error(ErrorCode::InvalidArgument, "cannot merge summaries on different grids");
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
      moment_sum[k] += other.moment_sum[k];
      moment_sumsq[k] += other.moment_sumsq[k];
    }
    paths.insert(paths.end(), other.paths.begin(), other.paths.end());
    std::sort(paths.begin(), paths.end(),
              [](const PathSummary& a, const PathSummary& b) { return a.path_id < b.path_id; });
  }

  template <class Projection>
  Estimate over_paths(Projection proj) const {
    std::vector<double> xs;
    xs.reserve(paths.size());
    for (const auto& p : paths) xs.push_back(proj(p));
    return estimate(xs);
  }

  Estimate time_avg_i() const {
    return over_paths([](const PathSummary& p) { return p.time_avg_i; });
  }
  Estimate lyapunov_i() const {
    return over_paths([](const PathSummary& p) { return p.lyapunov_i; });
  }
  Estimate final_component(Component c) const {
    return over_paths([c](const PathSummary& p) { return component_of(p.final_state, p.final_x, c); });
  }

  double extinct_fraction() const {
    if (paths.empty()) return 0.0;
    std::size_t extinct = 0;
    for (const auto& p : paths) extinct += p.final_state.i < extinction_cutoff ? 1 : 0;
    return static_cast<double>(extinct) / static_cast<double>(paths.size());
  }

  /// Ensemble estimate of E[N(t_k)^{2p}].
  Estimate moment(std::size_t k) const {
    Estimate e;
    e.n = paths.size();
    if (paths.empty()) return e;
    const double n = static_cast<double>(paths.size());
    e.mean = moment_sum[k] / n;
    if (paths.size() > 1) {
      const double var = std::max(0.0, (moment_sumsq[k] - n * e.mean * e.mean) / (n - 1.0));
      e.se = std::sqrt(var / n);
    }
    return e;
  }

  std::vector<State> final_states() const {
    std::vector<State> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(p.final_state);
    return out;
  }
};

/// Streaming observer computing one PathSummary and adding its N^{2p} samples
/// into a partial EnsembleSummary.
class PathReducer {
 public:
  PathReducer(std::uint64_t path_id, EnsembleSummary& partial) : partial_(partial) {
    summary_.path_id = path_id;
  }

  void on_record(double t, const State& s, double x) {
    if (index_ == 0) {
      i0_ = s.i;
    }
    if (partial_.times.size() <= index_) {
      partial_.times.push_back(t);
      partial_.moment_sum.push_back(0.0);
      partial_.moment_sumsq.push_back(0.0);
    }
    const double m = partial_.pexp == 1.0 ? s.total() * s.total()
                                          : std::pow(s.total(), 2.0 * partial_.pexp);
    partial_.moment_sum[index_] += m;
    partial_.moment_sumsq[index_] += m * m;
    s_.add(t, s.s);
    i_.add(t, s.i);
    r_.add(t, s.r);
    x_.add(t, x);
    x2_.add(t, x * x);
    if (!floor_hit_) {
      last_t_ = t;
      last_i_ = s.i;
    }
    summary_.final_state = s;
    summary_.final_x = x;
    ++index_;
  }

  void on_jump(double, double) {}

  void on_floor(double, bool infected) {
    if (infected) floor_hit_ = true;
  }

  void finish(const PathDiagnostics& diag) {
    summary_.time_avg_s = s_.average();
    summary_.time_avg_i = i_.average();
    summary_.time_avg_r = r_.average();
    summary_.time_avg_x = x_.average();
    summary_.time_avg_x2 = x2_.average();
    summary_.lyapunov_truncated = floor_hit_;
    summary_.lyapunov_i = last_t_ > 0.0 ? std::log(last_i_ / i0_) / last_t_ : 0.0;
    summary_.floor_activations = diag.floor_activations;
    summary_.jump_count = diag.jump_count;
    partial_.paths.push_back(summary_);
  }

 private:
  EnsembleSummary& partial_;
  PathSummary summary_;
  TrapezoidAccumulator s_, i_, r_, x_, x2_;
  std::size_t index_ = 0;
  double i0_ = 0.0;
  double last_t_ = 0.0;
  double last_i_ = 0.0;
  bool floor_hit_ = false;
};

struct MomentBoundResult {
  bool ok = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  double worst_time = 0.0;
  double chi1 = 0.0;
  double chi2 = 0.0;
};

/// Checks E[N(t)^{2p}] <= N(0)^{2p} exp(-p chi2 t) + 2 chi1/chi2 (+ 3 SE) at
/// every recorded time. The margin is bound + 3 SE - estimate.
inline MomentBoundResult moment_bound_check(const EnsembleSummary& ens,
                                            const EpidemicParameters& p, const NoiseSpec& n,
                                            double pexp, double n0) {
  if (ens.pexp != pexp) {
    throw Error(ErrorCode::InvalidArgument, "ensemble moments were collected at a different p");
  }
  if (ens.n_paths() == 0 || ens.times.empty()) {
    throw Error(ErrorCode::TooFewSamples, "empty ensemble");
  }
  MomentBoundResult out;
  out.chi2 = chi2(p.mu1, n.sigma1, n.jump, pexp);
  if (!(out.chi2 > 0.0)) {
    throw Error(ErrorCode::AssumptionViolated,
                "moment bound requires chi2 > 0, got " + format_double(out.chi2));
  }
  out.chi1 = chi1_chi2(p, n, pexp).chi1;
  const double floor_term = 2.0 * out.chi1 / out.chi2;
  const double start = std::pow(n0, 2.0 * pexp);
  for (std::size_t k = 0; k < ens.times.size(); ++k) {
    const double t = ens.times[k];
    const double bound = start * std::exp(-pexp * out.chi2 * t) + floor_term;
    const auto est = ens.moment(k);
    const double margin = bound + 3.0 * est.se - est.mean;
    if (margin < out.worst_margin) {
      out.worst_margin = margin;
      out.worst_time = t;
    }
  }
  out.ok = out.worst_margin >= 0.0;
  return out;
}

struct Histogram {
  double lo = 0.0;
  double width = 0.0;
  std::vector<double> mass;
  double mean = 0.0;
  double variance = 0.0;

  double bin_left(std::size_t k) const { return lo + static_cast<double>(k) * width; }
  double bin_right(std::size_t k) const { return lo + static_cast<double>(k + 1) * width; }
  double total_mass() const {
    double m = 0.0;
    for (double v : mass) m += v;
    return m;
  }
  /// Mass of bins lying entirely below `x`.
  double mass_below(double x) const {
    double m = 0.0;
    for (std::size_t k = 0; k < mass.size(); ++k) {
      if (bin_right(k) <= x) m += mass[k];
    }
    return m;
  }
};

/// Equal-width histogram over the observed range. A degenerate range is
/// widened to unit width around the common value.
inline Histogram histogram(std::span<const double> xs, std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bins must be >= 1");
  if (xs.empty()) throw Error(ErrorCode::TooFewSamples, "histogram of no samples");
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  Histogram h;
  h.lo = *mn;
  double hi = *mx;
  if (!(hi > h.lo)) {
    h.lo -= 0.5;
    hi += 0.5;
  }
  h.width = (hi - h.lo) / static_cast<double>(bins);
  h.mass.assign(bins, 0.0);
  const double share = 1.0 / static_cast<double>(xs.size());
  std::vector<std::size_t> counts(bins, 0);
  for (double x : xs) {
    auto k = static_cast<std::size_t>((x - h.lo) / h.width);
    ++counts[std::min(k, bins - 1)];
  }
  for (std::size_t k = 0; k < bins; ++k) h.mass[k] = static_cast<double>(counts[k]) * share;
  const auto e = estimate(xs);
  h.mean = e.mean;
  double ss = 0.0;
  for (double x : xs) ss += (x - h.mean) * (x - h.mean);
  h.variance = ss / static_cast<double>(xs.size());
  return h;
}

struct StationaryHistograms {
  Histogram s, i, r;
};

inline constexpr std::size_t kMinHistogramSamples = 100;

inline StationaryHistograms stationary_histogram(std::span<const State> states, std::size_t bins) {
  if (states.size() < kMinHistogramSamples) {
    throw Error(ErrorCode::TooFewSamples, "stationary histogram needs at least " +
                                              std::to_string(kMinHistogramSamples) + " states");
  }
  std::vector<double> s, i, r;
  s.reserve(states.size());
  i.reserve(states.size());
  r.reserve(states.size());
  for (const auto& x : states) {
    s.push_back(x.s);
    i.push_back(x.i);
    r.push_back(x.r);
  }
  return {histogram(s, bins), histogram(i, bins), histogram(r, bins)};
}

struct ErgodicityResult {
  double long_average = 0.0;
  double long_se = 0.0;
  double ensemble_mean = 0.0;
  double ensemble_se = 0.0;
  double discrepancy = 0.0;
  double tolerance = 0.0;  // 3 combined SE
  bool pass = false;
};

/**
 * Compares the time average of `c` over the second half of one long path with
 * the ensemble mean at the snapshot time t_end of `ens`. The long path's SE
 * comes from `batches` batch means over that half.
 */
inline ErgodicityResult ergodicity_check(const Trajectory& long_path, const EnsembleSummary& ens,
                                         Component c, std::size_t batches = 20) {
  if (long_path.times.size() < 2) throw Error(ErrorCode::EmptyTrajectory, "long path is empty");
  detail::require_component(long_path, c);
  if (ens.n_paths() < 2) throw Error(ErrorCode::TooFewSamples, "ensemble needs >= 2 paths");
  if (long_path.t_end() < 10.0 * ens.t_end()) {
    throw Error(ErrorCode::InvalidArgument, "long path must span >= 10x the snapshot time");
  }
  const double half = 0.5 * long_path.t_end();
  const auto first = static_cast<std::size_t>(
      std::lower_bound(long_path.times.begin(), long_path.times.end(), half) -
      long_path.times.begin());
  const std::size_t points = long_path.times.size() - first;
  if (batches < 2 || points < 2 * batches + 1) {
    throw Error(ErrorCode::TooFewSamples, "long path has too few records for batch means");
  }

  std::vector<double> batch_means;
  TrapezoidAccumulator whole;
  const std::size_t intervals = points - 1;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t from = first + b * intervals / batches;
    const std::size_t to = first + (b + 1) * intervals / batches;
    TrapezoidAccumulator acc;
    for (std::size_t k = from; k <= to; ++k) {
      acc.add(long_path.times[k], detail::value_at(long_path, k, c));
    }
    batch_means.push_back(acc.average());
  }
  for (std::size_t k = first; k < long_path.times.size(); ++k) {
    whole.add(long_path.times[k], detail::value_at(long_path, k, c));
  }

  ErgodicityResult out;
  out.long_average = whole.average();
  out.long_se = estimate(batch_means).se;
  const auto snap = ens.final_component(c);
  out.ensemble_mean = snap.mean;
  out.ensemble_se = snap.se;
  out.discrepancy = std::abs(out.long_average - out.ensemble_mean);
  out.tolerance = 3.0 * std::hypot(out.long_se, out.ensemble_se);
  out.pass = out.discrepancy <= out.tolerance;
  return out;
}

struct PersistenceVerdict {
  Classification theory = Classification::Indeterminate;
  Estimate time_avg_i;
  double bound = std::numeric_limits<double>::quiet_NaN();
  double extinct_fraction = 0.0;
  bool agree = false;
  std::string detail;
};

/// Confronts the threshold classification with the ensemble. Persistent: mean
/// time-average of I must reach the lower bound within 3 SE. Extinct: at least
/// `extinct_share` of the paths must end below the extinction cutoff.
inline PersistenceVerdict persistence_verdict(const EnsembleSummary& ens,
                                              const ThresholdReport& report,
                                              double extinct_share = 0.95) {
  PersistenceVerdict v;
  v.theory = report.classification;
  v.time_avg_i = ens.time_avg_i();
  v.bound = report.persistence_lower_bound;
  v.extinct_fraction = ens.extinct_fraction();
  switch (report.classification) {
    case Classification::Persistent:
      v.agree = v.time_avg_i.mean >= v.bound - 3.0 * v.time_avg_i.se;
      v.detail = "mean time-average of I " + format_double(v.time_avg_i.mean) +
                 " vs lower bound " + format_double(v.bound);
      break;
    case Classification::Extinct:
      v.agree = v.extinct_fraction >= extinct_share;
      v.detail = "extinct fraction " + format_double(v.extinct_fraction) + " vs required " +
                 format_double(extinct_share);
      break;
    case Classification::Indeterminate:
      v.agree = true;
      v.detail = report.conflict ? "conflicting sufficient conditions; no claim to check"
                                 : "no sufficient condition holds; no claim to check";
      break;
  }
  return v;
}

}  // namespace levysir
