// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "levysir/error.hpp"
#include "levysir/levy_measure.hpp"

namespace levysir {

/// Deterministic rates of the SIR model. mu2 = mu1 + alpha is the mortality of
/// infected individuals; it is derived, never stored independently.
struct EpidemicParameters {
  double A = 0.0;      // recruitment
  double mu1 = 0.0;    // natural mortality
  double alpha = 0.0;  // disease-induced mortality
  double beta = 0.0;   // transmission
  double gamma = 0.0;  // recovery

  double mu2() const noexcept { return mu1 + alpha; }

  /// Builds from the general mortality mu2 instead of alpha.
  static EpidemicParameters from_mu2(double A, double mu1, double mu2, double beta,
                                     double gamma) {
    return {A, mu1, mu2 - mu1, beta, gamma};
  }

  /// Violations as "key: message" strings; empty when valid.
  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    auto positive = [&](double v, const char* key) {
      if (!std::isfinite(v) || !(v > 0.0)) out.push_back(std::string(key) + ": must be > 0");
    };
    positive(A, "model.A");
    positive(mu1, "model.mu1");
    positive(beta, "model.beta");
    positive(gamma, "model.gamma");
    if (!std::isfinite(alpha) || !(alpha > 0.0)) {
      out.push_back("model.mu2: mu2 must equal mu1 + alpha with alpha > 0");
    }
    return out;
  }

  void validate() const {
    const auto v = violations();
    if (!v.empty()) throw Error(ErrorCode::InvalidArgument, v.front());
  }

  friend bool operator==(const EpidemicParameters&, const EpidemicParameters&) = default;
};

/// Baseline rates shared by the bundled presets (R0 = 1.08).
inline EpidemicParameters baseline_parameters() {
  return EpidemicParameters::from_mu2(0.09, 0.05, 0.09, 0.06, 0.01);
}

/// White-noise intensities on the mortality (sigma1) and transmission (sigma2)
/// channels plus the jump measure acting on the mortality channel.
struct NoiseSpec {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  JumpMeasure jump;

  std::vector<std::string> violations() const {
    std::vector<std::string> out;
    if (!std::isfinite(sigma1) || sigma1 < 0.0) out.push_back("noise.sigma1: must be >= 0");
    if (!std::isfinite(sigma2) || sigma2 < 0.0) out.push_back("noise.sigma2: must be >= 0");
    return out;
  }

  void validate() const {
    const auto v = violations();
    if (!v.empty()) throw Error(ErrorCode::InvalidArgument, v.front());
  }

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

}  // namespace levysir
