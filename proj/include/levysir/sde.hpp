// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levysir/drivers.hpp"
#include "levysir/error.hpp"
#include "levysir/levy_measure.hpp"
#include "levysir/parameters.hpp"
#include "levysir/text.hpp"

namespace levysir {

struct State {
  double s = 0.0;
  double i = 0.0;
  double r = 0.0;

  double total() const noexcept { return s + i + r; }
  friend bool operator==(const State&, const State&) = default;
};

/// Equilibrium of the deterministic model: endemic when R0 > 1, disease-free otherwise.
inline State deterministic_equilibrium(const EpidemicParameters& p) {
  const double s_free = p.A / p.mu1;
  const double s_star = (p.mu2() + p.gamma) / p.beta;
  if (s_star >= s_free) return {s_free, 0.0, 0.0};
  const double i_star = (p.A - p.mu1 * s_star) / (p.beta * s_star);
  return {s_star, i_star, p.gamma * i_star / p.mu1};
}

struct SimConfig {
  static constexpr std::size_t kMaxRecordedPoints = 100000;

  double t_end = 100.0;
  double dt = 1e-2;
  std::uint64_t seed = 1;
  double positivity_floor = 1e-12;
  std::size_t record_stride = 1;
  double ceiling = 1e12;

  std::size_t steps() const {
    return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  }
  double time_at(std::size_t k) const { return std::min(static_cast<double>(k) * dt, t_end); }

  /// Smallest stride keeping a path at or below kMaxRecordedPoints records.
  static std::size_t default_stride(double t_end, double dt) {
    const auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    return std::max<std::size_t>(1, (n + kMaxRecordedPoints - 2) / (kMaxRecordedPoints - 1));
  }

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (!std::isfinite(dt) || !(dt > 0.0)) out.push_back("sim.dt: must be > 0");
    if (!std::isfinite(t_end) || !(t_end >= dt)) out.push_back("sim.t_end: must be >= sim.dt");
    if (!std::isfinite(positivity_floor) || positivity_floor < 0.0) {
      out.push_back("sim.positivity_floor: must be >= 0");
    }
    if (record_stride < 1) out.push_back("sim.record_stride: must be >= 1");
    if (!(ceiling > 0.0)) out.push_back("sim.ceiling: must be > 0");
    return out;
  }

  void validate() const {
    const auto v = violations();
    if (!v.empty()) throw Error(ErrorCode::InvalidArgument, v.front());
  }

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;  // empty for auxiliary-only runs
  std::vector<double> aux;    // X(t); empty unless the auxiliary process was integrated
  std::vector<JumpEvent> jump_events;
  std::size_t floor_activations = 0;
  std::optional<double> first_floor_time;    // any component
  std::optional<double> first_floor_time_i;  // infected compartment only

  bool has_states() const noexcept { return !states.empty(); }
  bool has_aux() const noexcept { return !aux.empty(); }
  double t_end() const { return times.empty() ? 0.0 : times.back(); }
};

enum class Systems { Sir, Aux, Both };

struct PathDiagnostics {
  std::size_t floor_activations = 0;
  std::size_t jump_count = 0;
  std::optional<double> first_floor_time;
  std::optional<double> first_floor_time_i;
};

namespace detail {

struct FloorGuard {
  double floor;
  PathDiagnostics* diag;

  /// Replaces a non-positive update by the floor value.
  bool apply(double& v, double t) const {
    if (v > 0.0 || std::isnan(v)) return false;
    v = floor;
    ++diag->floor_activations;
    if (!diag->first_floor_time) diag->first_floor_time = t;
    return true;
  }
};

inline void check_finite(double v, double ceiling, const char* what, double t,
                         std::uint64_t path_id) {
  if (!std::isfinite(v) || v > ceiling) {
    throw Error(ErrorCode::NumericalBlowup,
                std::string(what) + " = " + format_double(v) + " at t = " + format_double(t),
                path_id);
  }
}

}  // namespace detail

/**
 * Integrates the jump-diffusion SIR system and/or the auxiliary scalar process
 * on the grid of `cfg`.
 *
 * Between jump epochs each sub-step is an Euler-Maruyama step; the compensator
 * -x * int(eta) dnu is part of the drift. At a jump epoch every compartment
 * (and X) is multiplied by 1 + eta. The observer receives
 * `on_record(t, state, x)` at t = 0 and every `record_stride` steps (always at
 * t_end), `on_jump(t, eta)` at each applied jump and, if it has one,
 * `on_floor(t, infected)` whenever the positivity floor replaces a value.
 */
template <class Driver, class Observer>
PathDiagnostics simulate_path(const EpidemicParameters& p, const NoiseSpec& n, Systems which,
                              State init, double x0, const SimConfig& cfg, Driver& driver,
                              Observer& observer, std::uint64_t path_id = 0) {
  p.validate();
  n.validate();
  cfg.validate();
  const bool sir = which != Systems::Aux;
  const bool aux = which != Systems::Sir;
  if (sir && !(init.s > 0.0 && init.i > 0.0 && init.r >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "initial state must have S > 0, I > 0, R >= 0");
  }
  if (aux && !(x0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "initial X must be > 0");

  const double m1 = mean_mark(n.jump);
  const double mu2g = p.mu2() + p.gamma;
  const double s1 = n.sigma1;
  const double s2 = n.sigma2;

  PathDiagnostics diag;
  detail::FloorGuard guard{cfg.positivity_floor, &diag};
  State x = init;
  double y = x0;

  auto floored = [&](double& v, double t, bool infected) {
    if (!guard.apply(v, t)) return;
    if (infected && !diag.first_floor_time_i) diag.first_floor_time_i = t;
    if constexpr (requires { observer.on_floor(t, infected); }) observer.on_floor(t, infected);
  };

  auto advance = [&](const Segment& seg) {
    if (seg.h > 0.0) {
      if (sir) {
        const double infection = p.beta * x.s * x.i;
        const double trans_noise = s2 * x.s * x.i * seg.dw2;
        State next{
            x.s + (p.A - p.mu1 * x.s - infection - m1 * x.s) * seg.h + s1 * x.s * seg.dw1 -
                trans_noise,
            x.i + (infection - mu2g * x.i - m1 * x.i) * seg.h + s1 * x.i * seg.dw1 + trans_noise,
            x.r + (p.gamma * x.i - p.mu1 * x.r - m1 * x.r) * seg.h + s1 * x.r * seg.dw1};
        floored(next.s, seg.t, false);
        floored(next.i, seg.t, true);
        floored(next.r, seg.t, false);
        x = next;
      }
      if (aux) {
        y = y + (p.A - p.mu1 * y - m1 * y) * seg.h + s1 * y * seg.dw1;
        floored(y, seg.t, false);
      }
    }
    if (seg.jump) {
      const double factor = 1.0 + seg.eta;
      x.s *= factor;
      x.i *= factor;
      x.r *= factor;
      y *= factor;
      ++diag.jump_count;
      observer.on_jump(seg.t, seg.eta);
    }
  };

  observer.on_record(0.0, x, y);
  const std::size_t steps = cfg.steps();
  for (std::size_t k = 0; k < steps; ++k) {
    const double t1 = cfg.time_at(k + 1);
    driver.segments(cfg.time_at(k), t1, advance);
    if (sir) {
      detail::check_finite(x.s, cfg.ceiling, "S", t1, path_id);
      detail::check_finite(x.i, cfg.ceiling, "I", t1, path_id);
      detail::check_finite(x.r, cfg.ceiling, "R", t1, path_id);
    }
    if (aux) detail::check_finite(y, cfg.ceiling, "X", t1, path_id);
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == steps) observer.on_record(t1, x, y);
  }
  return diag;
}

/// Observer materialising a Trajectory.
class TrajectoryRecorder {
 public:
  TrajectoryRecorder(bool keep_states, bool keep_aux) : states_(keep_states), aux_(keep_aux) {}

  void on_record(double t, const State& s, double x) {
    traj_.times.push_back(t);
    if (states_) traj_.states.push_back(s);
    if (aux_) traj_.aux.push_back(x);
  }
  void on_jump(double t, double eta) { traj_.jump_events.push_back({t, eta}); }

  Trajectory finish(const PathDiagnostics& diag) {
    traj_.floor_activations = diag.floor_activations;
    traj_.first_floor_time = diag.first_floor_time;
    traj_.first_floor_time_i = diag.first_floor_time_i;
    return std::move(traj_);
  }

 private:
  bool states_, aux_;
  Trajectory traj_;
};

template <class Driver>
Trajectory integrate(const EpidemicParameters& p, const NoiseSpec& n, Systems which, State init,
                     double x0, const SimConfig& cfg, Driver& driver, std::uint64_t path_id = 0) {
  TrajectoryRecorder rec(which != Systems::Aux, which != Systems::Sir);
  const auto diag = simulate_path(p, n, which, init, x0, cfg, driver, rec, path_id);
  return rec.finish(diag);
}

/// One path of the jump-diffusion SIR system; noise from stream (cfg.seed, path_id).
inline Trajectory integrate_sir_jump(const EpidemicParameters& p, const NoiseSpec& n, State init,
                                     const SimConfig& cfg, std::uint64_t path_id = 0) {
  PoissonDriver driver(n.jump, cfg.seed, path_id);
  return integrate(p, n, Systems::Sir, init, 0.0, cfg, driver, path_id);
}

/// The auxiliary scalar process X. With the same (seed, path_id) as an SIR run
/// it sees the same W1 increments and jump epochs.
inline Trajectory integrate_aux(const EpidemicParameters& p, const NoiseSpec& n, double x0,
                                const SimConfig& cfg, std::uint64_t path_id = 0) {
  PoissonDriver driver(n.jump, cfg.seed, path_id);
  return integrate(p, n, Systems::Aux, State{}, x0, cfg, driver, path_id);
}

/// SIR and X advanced together under one driver.
inline Trajectory integrate_coupled(const EpidemicParameters& p, const NoiseSpec& n, State init,
                                    double x0, const SimConfig& cfg, std::uint64_t path_id = 0) {
  PoissonDriver driver(n.jump, cfg.seed, path_id);
  return integrate(p, n, Systems::Both, init, x0, cfg, driver, path_id);
}

/// Classical RK4 on the noise-free model; no randomness consumed.
inline Trajectory integrate_deterministic(const EpidemicParameters& p, State init,
                                          const SimConfig& cfg) {
  p.validate();
  cfg.validate();
  if (!(init.s >= 0.0 && init.i >= 0.0 && init.r >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "initial state must be nonnegative");
  }
  const double mu2g = p.mu2() + p.gamma;
  auto rhs = [&](const State& x) {
    const double infection = p.beta * x.s * x.i;
    return State{p.A - p.mu1 * x.s - infection, infection - mu2g * x.i,
                 p.gamma * x.i - p.mu1 * x.r};
  };
  auto axpy = [](const State& x, double h, const State& k) {
    return State{x.s + h * k.s, x.i + h * k.i, x.r + h * k.r};
  };

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(init);
  State x = init;
  const std::size_t steps = cfg.steps();
  for (std::size_t k = 0; k < steps; ++k) {
    const double t1 = cfg.time_at(k + 1);
    const double h = t1 - cfg.time_at(k);
    const State k1 = rhs(x);
    const State k2 = rhs(axpy(x, 0.5 * h, k1));
    const State k3 = rhs(axpy(x, 0.5 * h, k2));
    const State k4 = rhs(axpy(x, h, k3));
    x.s += h / 6.0 * (k1.s + 2.0 * k2.s + 2.0 * k3.s + k4.s);
    x.i += h / 6.0 * (k1.i + 2.0 * k2.i + 2.0 * k3.i + k4.i);
    x.r += h / 6.0 * (k1.r + 2.0 * k2.r + 2.0 * k3.r + k4.r);
    for (double* v : {&x.s, &x.i, &x.r}) {
      if (*v < -cfg.positivity_floor || !std::isfinite(*v)) {
        throw Error(ErrorCode::StepSizeTooLarge,
                    "component " + format_double(*v) + " at t = " + format_double(t1));
      }
      *v = std::max(*v, 0.0);
    }
    if ((k + 1) % cfg.record_stride == 0 || k + 1 == steps) {
      traj.times.push_back(t1);
      traj.states.push_back(x);
    }
  }
  return traj;
}

}  // namespace levysir
