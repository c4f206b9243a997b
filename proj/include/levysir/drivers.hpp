// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Noise drivers: they cut a time step into sub-steps at jump epochs and supply
// the Brownian increments for each sub-step. Drivers never look at the state,
// so two integrations fed by equal drivers see identical noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include "levysir/error.hpp"
#include "levysir/levy_measure.hpp"
#include "levysir/rng.hpp"

namespace levysir {

/// One sub-step ending at `t`. When `jump` is set the mark `eta` acts at `t`,
/// after the continuous increment.
struct Segment {
  double t = 0.0;
  double h = 0.0;
  double dw1 = 0.0;
  double dw2 = 0.0;
  bool jump = false;
  double eta = 0.0;
};

struct JumpEvent {
  double t = 0.0;
  double eta = 0.0;
  friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

/// Draws marks eta according to nu / nu(Z).
class MarkSampler {
 public:
  explicit MarkSampler(const JumpMeasure& jm) : atoms_(jm.atoms().begin(), jm.atoms().end()) {
    if (atoms_.size() > 1) {
      std::vector<double> w;
      w.reserve(atoms_.size());
      for (const auto& a : atoms_) w.push_back(a.weight);
      pick_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    }
  }

  double operator()(Engine& rng) {
    if (atoms_.size() == 1) return atoms_.front().eta;
    return atoms_[pick_(rng)].eta;
  }

 private:
  std::vector<Atom> atoms_;
  std::discrete_distribution<std::size_t> pick_;
};

/// Live Brownian + compound Poisson driver for one path. Each channel has its
/// own stream, so adding or removing a channel's consumer never shifts another.
class PoissonDriver {
 public:
  PoissonDriver(const JumpMeasure& jm, std::uint64_t seed, std::uint64_t path_id)
      : w1_(rng_stream(seed, path_id, Channel::Brownian1)),
        w2_(rng_stream(seed, path_id, Channel::Brownian2)),
        times_(rng_stream(seed, path_id, Channel::JumpTimes)),
        marks_rng_(rng_stream(seed, path_id, Channel::JumpMarks)),
        marks_(jm),
        rate_(jm.total_mass()) {
    if (rate_ > 0.0) {
      wait_ = std::exponential_distribution<double>(rate_);
      next_event_ = wait_(times_);
    }
  }

  template <class Emit>
  void segments(double t0, double t1, Emit&& emit) {
    double cur = t0;
    while (next_event_ < t1) {
      const double at = std::max(next_event_, cur);
      const double h = at - cur;
      const double rh = std::sqrt(h);
      Segment seg{at, h, rh * n1_(w1_), rh * n2_(w2_), true, marks_(marks_rng_)};
      emit(seg);
      cur = at;
      next_event_ += wait_(times_);
    }
    const double h = t1 - cur;
    const double rh = std::sqrt(h);
    Segment seg{t1, h, rh * n1_(w1_), rh * n2_(w2_), false, 0.0};
    emit(seg);
  }

 private:
  Engine w1_, w2_, times_, marks_rng_;
  std::normal_distribution<double> n1_, n2_;
  std::exponential_distribution<double> wait_;
  MarkSampler marks_;
  double rate_;
  double next_event_ = std::numeric_limits<double>::infinity();
};

/**
 * Driver replaying a pre-sampled noise path: Brownian values W1, W2 on a
 * knot set that contains every jump epoch. Any integration grid whose points
 * are knots (e.g. multiples of a coarser dt when the knots were built on a
 * finer one) gets increments W(b) - W(a), so runs at different step sizes
 * share one realisation of the noise.
 */
class ReplayDriver {
 public:
  ReplayDriver(std::vector<double> knots, std::vector<double> w1, std::vector<double> w2,
               std::vector<JumpEvent> events)
      : knots_(std::move(knots)), w1_(std::move(w1)), w2_(std::move(w2)), events_(std::move(events)) {
    if (knots_.empty() || w1_.size() != knots_.size() || w2_.size() != knots_.size()) {
      throw Error(ErrorCode::InvalidArgument, "replay driver: knot and path sizes differ");
    }
    for (std::size_t k = 1; k < knots_.size(); ++k) {
      if (!(knots_[k] > knots_[k - 1])) {
        throw Error(ErrorCode::InvalidArgument, "replay driver: knots must increase");
      }
    }
  }

  /// Noise-free driver on the grid k*dt that fires the given marks at their times.
  static ReplayDriver scripted(double t_end, double dt, std::vector<JumpEvent> events) {
    auto knots = grid_with_events(t_end, dt, events);
    std::vector<double> zeros(knots.size(), 0.0);
    return ReplayDriver(std::move(knots), zeros, zeros, std::move(events));
  }

  /// Samples a full noise path on the grid k*fine_dt plus the jump epochs,
  /// drawing from the same channels as PoissonDriver(jm, seed, path_id).
  static ReplayDriver sample(const JumpMeasure& jm, std::uint64_t seed, std::uint64_t path_id,
                             double t_end, double fine_dt) {
    std::vector<JumpEvent> events;
    if (jm.total_mass() > 0.0) {
      auto times = rng_stream(seed, path_id, Channel::JumpTimes);
      auto marks_rng = rng_stream(seed, path_id, Channel::JumpMarks);
      std::exponential_distribution<double> wait(jm.total_mass());
      MarkSampler marks(jm);
      for (double t = wait(times); t < t_end; t += wait(times)) {
        events.push_back({t, marks(marks_rng)});
      }
    }
    auto knots = grid_with_events(t_end, fine_dt, events);
    auto e1 = rng_stream(seed, path_id, Channel::Brownian1);
    auto e2 = rng_stream(seed, path_id, Channel::Brownian2);
    std::normal_distribution<double> n1, n2;
    std::vector<double> w1(knots.size(), 0.0), w2(knots.size(), 0.0);
    for (std::size_t k = 1; k < knots.size(); ++k) {
      const double rh = std::sqrt(knots[k] - knots[k - 1]);
      w1[k] = w1[k - 1] + rh * n1(e1);
      w2[k] = w2[k - 1] + rh * n2(e2);
    }
    return ReplayDriver(std::move(knots), std::move(w1), std::move(w2), std::move(events));
  }

  const std::vector<JumpEvent>& events() const noexcept { return events_; }

  template <class Emit>
  void segments(double t0, double t1, Emit&& emit) {
    std::size_t a = knot_index(t0);
    const std::size_t b = knot_index(t1);
    while (next_ < events_.size() && events_[next_].t < t1 - tolerance(t1)) {
      const std::size_t e = knot_index(events_[next_].t);
      Segment seg{knots_[e], knots_[e] - knots_[a], w1_[e] - w1_[a], w2_[e] - w2_[a], true,
                  events_[next_].eta};
      emit(seg);
      a = e;
      ++next_;
    }
    Segment seg{t1, knots_[b] - knots_[a], w1_[b] - w1_[a], w2_[b] - w2_[a], false, 0.0};
    emit(seg);
  }

 private:
  static double tolerance(double t) { return 1e-9 * std::max(1.0, std::abs(t)); }

  static std::vector<double> grid_with_events(double t_end, double dt,
                                              const std::vector<JumpEvent>& events) {
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    std::vector<double> knots;
    knots.reserve(steps + 1 + events.size());
    for (std::size_t k = 0; k <= steps; ++k) {
      knots.push_back(std::min(static_cast<double>(k) * dt, t_end));
    }
    for (const auto& e : events) knots.push_back(e.t);
    std::sort(knots.begin(), knots.end());
    std::vector<double> unique;
    unique.reserve(knots.size());
    for (double t : knots) {
      if (unique.empty() || t - unique.back() > tolerance(t)) unique.push_back(t);
    }
    return unique;
  }

  std::size_t knot_index(double t) const {
    const double tol = tolerance(t);
    auto it = std::lower_bound(knots_.begin(), knots_.end(), t - tol);
    if (it == knots_.end() || *it > t + tol) {
      throw Error(ErrorCode::InvalidArgument, "replay driver: time is not a knot of the noise path");
    }
    return static_cast<std::size_t>(it - knots_.begin());
  }

  std::vector<double> knots_, w1_, w2_;
  std::vector<JumpEvent> events_;
  std::size_t next_ = 0;
};

}  // namespace levysir
