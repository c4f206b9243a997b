// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "levysir/scenario.hpp"

namespace levysir {

struct Preset {
  std::string_view name;
  std::string_view description;
  Scenario (*make)();
};

namespace detail {

inline Scenario base_scenario(std::string name) {
  Scenario sc;
  sc.name = std::move(name);
  sc.params = baseline_parameters();
  sc.mu2 = 0.09;
  sc.init = {0.4, 0.3, 0.1};
  sc.x0 = 0.8;  // N(0)
  sc.sim.dt = 1e-2;
  sc.sim.seed = 1;
  return sc;
}

inline unsigned all_outputs() {
  unsigned mask = 0;
  for (const auto& [flag, label] : kOutputNames) mask |= static_cast<unsigned>(flag);
  return mask;
}

inline Scenario example1() {
  auto sc = base_scenario("example1");
  sc.noise = {0.03, 0.02, JumpMeasure::constant(0.05, 1.0)};
  sc.sim.t_end = 300.0;
  sc.sim.record_stride = SimConfig::default_stride(sc.sim.t_end, sc.sim.dt);
  sc.n_paths = 15000;
  sc.outputs = all_outputs();
  sc.trajectory_paths = 3;
  // Long enough that the long-path average is at least as precise as the
  // 2000-path snapshot mean.
  sc.ergodicity_t_end = 1.5e6;
  return sc;
}

inline Scenario example2a() {
  auto sc = base_scenario("example2a");
  sc.noise = {0.2, 0.3, JumpMeasure::constant(0.05, 1.0)};
  sc.sim.t_end = 500.0;
  sc.sim.record_stride = SimConfig::default_stride(sc.sim.t_end, sc.sim.dt);
  sc.n_paths = 200;
  sc.outputs = all_outputs();
  sc.trajectory_paths = 3;
  return sc;
}

inline Scenario example2b() {
  auto sc = base_scenario("example2b");
  sc.params = EpidemicParameters::from_mu2(0.09, 0.05, 0.43, 0.145, 0.01);
  sc.mu2 = 0.43;
  sc.noise = {0.01, 0.02, JumpMeasure::constant(0.05, 1.0)};
  sc.sim.t_end = 1000.0;
  sc.sim.record_stride = SimConfig::default_stride(sc.sim.t_end, sc.sim.dt);
  sc.n_paths = 200;
  sc.outputs = all_outputs();
  sc.trajectory_paths = 3;
  return sc;
}

inline Scenario deterministic() {
  auto sc = base_scenario("deterministic");
  sc.noise = {0.0, 0.0, JumpMeasure::none()};
  sc.sim.t_end = 300.0;
  sc.sim.record_stride = SimConfig::default_stride(sc.sim.t_end, sc.sim.dt);
  sc.n_paths = 1;
  sc.outputs = static_cast<unsigned>(Output::Thresholds) | static_cast<unsigned>(Output::Summary) |
               static_cast<unsigned>(Output::Trajectories);
  return sc;
}

}  // namespace detail

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = {
      {"example1", "baseline rates, sigma1=0.03, sigma2=0.02, eta=0.05, rate 1: persistent",
       &detail::example1},
      {"example2a", "sigma1=0.2, sigma2=0.3: extinction through the transmission-noise condition",
       &detail::example2a},
      {"example2b", "sigma1=0.01, sigma2=0.02, mu2=0.43, beta=0.145: extinction, R0s-hat < 1",
       &detail::example2b},
      {"deterministic", "baseline rates without noise; one path equal to the ODE solution",
       &detail::deterministic},
  };
  return all;
}

inline std::optional<Scenario> find_preset(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p.make();
  }
  return std::nullopt;
}

}  // namespace levysir
