// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "levysir/estimators.hpp"
#include "levysir/sde.hpp"
#include "support/property.hpp"

namespace levysir {
namespace {

const State kInit{0.4, 0.3, 0.1};

NoiseSpec example1_noise() { return {0.03, 0.02, JumpMeasure::constant(0.05, 1.0)}; }

SimConfig config(double t_end, double dt, std::uint64_t seed = 7) {
  SimConfig cfg;
  cfg.t_end = t_end;
  cfg.dt = dt;
  cfg.seed = seed;
  return cfg;
}

double max_abs_diff(const Trajectory& a, const Trajectory& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    worst = std::max({worst, std::abs(a.states[k].s - b.states[k].s),
                      std::abs(a.states[k].i - b.states[k].i),
                      std::abs(a.states[k].r - b.states[k].r)});
  }
  return worst;
}

TEST(Integrator, SameSeedIsBitIdentical) {
  const auto cfg = config(50.0, 0.01);
  const auto a = integrate_sir_jump(baseline_parameters(), example1_noise(), kInit, cfg, 3);
  const auto b = integrate_sir_jump(baseline_parameters(), example1_noise(), kInit, cfg, 3);
  ASSERT_EQ(a.times.size(), b.times.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    EXPECT_EQ(a.states[k].s, b.states[k].s);
    EXPECT_EQ(a.states[k].i, b.states[k].i);
    EXPECT_EQ(a.states[k].r, b.states[k].r);
  }
  EXPECT_EQ(a.jump_events, b.jump_events);
}

TEST(Integrator, PathIdsGiveDifferentNoise) {
  const auto cfg = config(20.0, 0.01);
  const auto a = integrate_sir_jump(baseline_parameters(), example1_noise(), kInit, cfg, 0);
  const auto b = integrate_sir_jump(baseline_parameters(), example1_noise(), kInit, cfg, 1);
  EXPECT_NE(a.states.back().i, b.states.back().i);
}

TEST(Integrator, RecordsAtStrideAndEnd) {
  auto cfg = config(1.05, 0.01);
  cfg.record_stride = 10;
  const auto t = integrate_sir_jump(baseline_parameters(), example1_noise(), kInit, cfg);
  ASSERT_EQ(t.times.size(), 12u);  // 0, 0.1, ..., 1.0, 1.05
  EXPECT_DOUBLE_EQ(t.times[1], 0.1);
  EXPECT_DOUBLE_EQ(t.times.back(), 1.05);
}

TEST(Integrator, NoiseFreeRunTracksRungeKutta) {
  const auto p = baseline_parameters();
  for (double dt : {0.02, 0.01, 0.005}) {
    const auto cfg = config(300.0, dt);
    const auto em = integrate_sir_jump(p, NoiseSpec{}, kInit, cfg);
    const auto rk = integrate_deterministic(p, kInit, cfg);
    ASSERT_EQ(em.states.size(), rk.states.size());
    EXPECT_LE(max_abs_diff(em, rk), 10.0 * dt) << "dt = " << dt;
    EXPECT_TRUE(em.jump_events.empty());
  }
}

TEST(Integrator, NoiseFreeErrorIsFirstOrder) {
  const auto p = baseline_parameters();
  const auto rk = integrate_deterministic(p, kInit, config(50.0, 0.001));
  auto err = [&](double dt) {
    auto cfg = config(50.0, dt);
    cfg.record_stride = static_cast<std::size_t>(std::lround(1.0 / dt));
    const auto em = integrate_sir_jump(p, NoiseSpec{}, kInit, cfg);
    const State ref = rk.states.back();
    const State got = em.states.back();
    return std::abs(got.s - ref.s) + std::abs(got.i - ref.i) + std::abs(got.r - ref.r);
  };
  const double ratio = err(0.02) / err(0.01);
  EXPECT_GT(ratio, 1.7);
  EXPECT_LT(ratio, 2.3);
}

TEST(Integrator, RungeKuttaEquilibriumIsFixed) {
  const auto p = baseline_parameters();
  const State eq = deterministic_equilibrium(p);
  const auto rk = integrate_deterministic(p, eq, config(100.0, 0.01));
  EXPECT_NEAR(rk.states.back().s, eq.s, 1e-12);
  EXPECT_NEAR(rk.states.back().i, eq.i, 1e-12);
  EXPECT_NEAR(rk.states.back().r, eq.r, 1e-12);
}

TEST(Integrator, RungeKuttaRejectsUnstableStep) {
  try {
    (void)integrate_deterministic(baseline_parameters(), kInit, config(500.0, 100.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepSizeTooLarge);
  }
}

TEST(Integrator, ScriptedJumpMatchesHandEuler) {
  // X with no Brownian noise and one forced jump of +50% at t = 0.5.
  const auto p = baseline_parameters();
  const NoiseSpec n{0.0, 0.0, JumpMeasure::constant(0.5, 0.2)};
  const auto cfg = config(1.0, 0.1);
  auto driver = ReplayDriver::scripted(1.0, 0.1, {{0.5, 0.5}});
  const auto t = integrate(p, n, Systems::Aux, State{}, 2.0, cfg, driver);

  const double m1 = 0.5 * 0.2;  // compensator
  double x = 2.0;
  for (int k = 0; k < 10; ++k) {
    // An epoch on a grid point opens the step that starts there.
    if (k == 5) x *= 1.5;
    x += (p.A - p.mu1 * x - m1 * x) * 0.1;
    EXPECT_NEAR(t.aux[k + 1], x, 1e-14) << "step " << k;
  }
  ASSERT_EQ(t.jump_events.size(), 1u);
  EXPECT_DOUBLE_EQ(t.jump_events[0].t, 0.5);
}

TEST(Integrator, JumpBetweenGridPointsSplitsTheStep) {
  const auto p = baseline_parameters();
  const NoiseSpec n{0.0, 0.0, JumpMeasure::constant(-0.2, 1.0)};
  auto driver = ReplayDriver::scripted(0.1, 0.1, {{0.04, -0.2}});
  const auto t = integrate(p, n, Systems::Aux, State{}, 1.0, config(0.1, 0.1), driver);
  const double m1 = -0.2;
  double x = 1.0;
  x += (p.A - (p.mu1 + m1) * x) * 0.04;
  x *= 0.8;
  x += (p.A - (p.mu1 + m1) * x) * 0.06;
  EXPECT_NEAR(t.aux.back(), x, 1e-15);
}

TEST(Integrator, ReplayedNoiseReproducesLiveDriver) {
  const auto p = baseline_parameters();
  const auto n = example1_noise();
  const auto cfg = config(30.0, 0.01, 5);
  const auto live = integrate_coupled(p, n, kInit, 0.8, cfg, 9);
  auto replay = ReplayDriver::sample(n.jump, 5, 9, 30.0, 0.01);
  const auto again = integrate(p, n, Systems::Both, kInit, 0.8, cfg, replay, 9);
  EXPECT_EQ(live.jump_events, again.jump_events);
  ASSERT_EQ(live.states.size(), again.states.size());
  for (std::size_t k = 0; k < live.states.size(); ++k) {
    EXPECT_NEAR(live.states[k].i, again.states[k].i, 1e-10);
    EXPECT_NEAR(live.aux[k], again.aux[k], 1e-10);
  }
}

TEST(Integrator, AuxiliaryWithoutNoiseRelaxesToRecruitmentOverMortality) {
  const auto p = baseline_parameters();
  const auto t = integrate_aux(p, NoiseSpec{}, 0.1, config(400.0, 0.01));
  EXPECT_NEAR(t.aux.back(), p.A / p.mu1, 1e-6);
}

TEST(Integrator, AuxiliaryTimeAverageNearMean) {
  // Single long path: (1/t) int X approaches A / mu1 = 1.8.
  const auto t = integrate_aux(baseline_parameters(), example1_noise(), 1.8, config(3000.0, 0.01, 2));
  EXPECT_NEAR(time_average(t, Component::X), 1.8, 0.09);
}

TEST(Integrator, BlowupReportsPathId) {
  auto cfg = config(10.0, 0.01);
  cfg.ceiling = 0.5;
  try {
    (void)integrate_sir_jump(baseline_parameters(), example1_noise(), kInit, cfg, 42);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NumericalBlowup);
    ASSERT_TRUE(e.path_id().has_value());
    EXPECT_EQ(*e.path_id(), 42u);
  }
}

TEST(Integrator, RejectsInvalidInputs) {
  const auto p = baseline_parameters();
  EXPECT_THROW((void)integrate_sir_jump(p, example1_noise(), {0.4, 0.0, 0.1}, config(1, 0.01)), Error);
  EXPECT_THROW((void)integrate_aux(p, example1_noise(), -1.0, config(1, 0.01)), Error);
  EXPECT_THROW((void)integrate_sir_jump(p, example1_noise(), kInit, config(1, 0.0)), Error);
  auto bad = p;
  bad.alpha = -0.01;
  EXPECT_THROW((void)integrate_sir_jump(bad, example1_noise(), kInit, config(1, 0.01)), Error);
}

TEST(Integrator, FloorActivatesUnderViolentNoiseAndIsReported) {
  const NoiseSpec n{0.0, 12.0, JumpMeasure::none()};
  auto cfg = config(50.0, 0.05, 3);
  std::size_t hits = 0;
  for (std::uint64_t id = 0; id < 20 && hits == 0; ++id) {
    const auto t = integrate_sir_jump(baseline_parameters(), n, kInit, cfg, id);
    hits = t.floor_activations;
    if (hits) {
      EXPECT_TRUE(t.first_floor_time.has_value());
      for (const auto& s : t.states) {
        EXPECT_GT(s.s, 0.0);
        EXPECT_GT(s.i, 0.0);
      }
      if (t.first_floor_time_i) {
        const auto ly = lyapunov_exponent(t);
        EXPECT_TRUE(ly.floor_truncated);
        EXPECT_LT(ly.horizon, *t.first_floor_time_i);
        EXPECT_GE(ly.horizon, *t.first_floor_time_i - cfg.dt);
      }
    }
  }
  EXPECT_GT(hits, 0u);
}

TEST(IntegratorProperty, StatesStayPositiveWithoutFloor) {
  testing::for_all(40, 31, [](testing::Gen& g, std::size_t k) {
    const auto p = g.params();
    const auto n = g.noise(0.1);
    const auto t = integrate_sir_jump(p, n, {g.uniform(0.1, 1), g.uniform(0.01, 1), g.uniform(0, 1)},
                                      config(50.0, 0.01, g.u64()), k);
    EXPECT_EQ(t.floor_activations, 0u);
    for (const auto& s : t.states) {
      ASSERT_GT(s.s, 0.0);
      ASSERT_GT(s.i, 0.0);
      ASSERT_GT(s.r, 0.0);
    }
  });
}

TEST(IntegratorProperty, TotalPopulationNeverExceedsAuxiliary) {
  testing::for_all(60, 32, [](testing::Gen& g, std::size_t k) {
    const auto p = g.params();
    const auto n = g.noise(0.3);
    const State init{g.uniform(0.1, 1), g.uniform(0.01, 1), g.uniform(0, 1)};
    const double x0 = init.total() + g.uniform(0.0, 0.5);
    const auto t = integrate_coupled(p, n, init, x0, config(60.0, 0.01, g.u64()), k);
    for (std::size_t j = 0; j < t.states.size(); ++j) {
      ASSERT_LE(t.states[j].total(), t.aux[j] + 1e-9) << "t = " << t.times[j];
    }
  });
}

TEST(IntegratorProperty, JumpCountMatchesRate) {
  // Events on [0, T] are Poisson(lambda T); pooled over paths the count is
  // within 4 standard deviations.
  testing::for_all(5, 33, [](testing::Gen& g, std::size_t) {
    const double lam = g.uniform(0.2, 3.0);
    const NoiseSpec n{0.0, 0.0, JumpMeasure::constant(g.uniform(-0.3, 0.3), lam)};
    const auto cfg = config(200.0, 0.05, g.u64());
    std::size_t events = 0;
    for (std::uint64_t id = 0; id < 10; ++id) {
      events += integrate_aux(baseline_parameters(), n, 1.0, cfg, id).jump_events.size();
    }
    const double mean = lam * 200.0 * 10.0;
    EXPECT_NEAR(static_cast<double>(events), mean, 4.0 * std::sqrt(mean));
  });
}

}  // namespace
}  // namespace levysir
