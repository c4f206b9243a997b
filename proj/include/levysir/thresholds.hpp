// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "levysir/error.hpp"
#include "levysir/levy_measure.hpp"
#include "levysir/parameters.hpp"
#include "levysir/text.hpp"

namespace levysir {

enum class Classification { Persistent, Extinct, Indeterminate };

constexpr std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::Persistent: return "Persistent";
    case Classification::Extinct: return "Extinct";
    case Classification::Indeterminate: return "Indeterminate";
  }
  return "Unknown";
}

/// R0 = beta A / (mu1 (mu2 + gamma)).
inline double r0_deterministic(const EpidemicParameters& p) {
  return p.beta * p.A / (p.mu1 * (p.mu2() + p.gamma));
}

/// chi3 = 2 mu1 - sigma1^2 - int ((1+eta)^2 - 1 - eta) dnu. May be <= 0; callers
/// that divide by it check the sign.
inline double chi3(const EpidemicParameters& p, const NoiseSpec& n) {
  return 2.0 * p.mu1 - n.sigma1 * n.sigma1 - levy_moment(n.jump, 1.0);
}

struct MomentConstants {
  double chi1 = 0.0;
  double chi2 = 0.0;
};

/// chi2(p) and chi1 = sup_{x>0} {A x^{2p-1} - chi2/2 x^{2p}}.
///
/// For p > 1/2 the supremum sits at x* = (2p-1) A / (p chi2). At p = 1/2 the
/// supremand is affine and decreasing, so the supremum is the limit A at 0+.
inline MomentConstants chi1_chi2(const EpidemicParameters& p, const NoiseSpec& n, double pexp) {
  if (!(pexp >= 0.5)) throw Error(ErrorCode::InvalidArgument, "moment exponent p must be >= 1/2");
  MomentConstants out;
  out.chi2 = chi2(p.mu1, n.sigma1, n.jump, pexp);
  if (!(out.chi2 > 0.0)) {
    throw Error(ErrorCode::NonpositiveChi2,
                "chi2 = " + format_double(out.chi2) + " <= 0 at p = " + format_double(pexp));
  }
  if (pexp == 0.5) {
    out.chi1 = p.A;
    return out;
  }
  const double x = (2.0 * pexp - 1.0) * p.A / (pexp * out.chi2);
  out.chi1 = p.A * std::pow(x, 2.0 * pexp - 1.0) - 0.5 * out.chi2 * std::pow(x, 2.0 * pexp);
  return out;
}

/// mu2 + gamma + sigma1^2 / 2, the common denominator of both stochastic thresholds.
inline double removal_rate(const EpidemicParameters& p, const NoiseSpec& n) {
  return p.mu2() + p.gamma + 0.5 * n.sigma1 * n.sigma1;
}

/// Persistence threshold.
inline double r0s(const EpidemicParameters& p, const NoiseSpec& n) {
  const double c3 = chi3(p, n);
  if (!(c3 > 0.0)) {
    throw Error(ErrorCode::NonpositiveChi3, "chi3 = " + format_double(c3) + " <= 0");
  }
  const double s2 = n.sigma2 * n.sigma2;
  const double numerator =
      p.beta * p.A / p.mu1 - p.A * p.A * s2 / (p.mu1 * c3) - jump_penalty(n.jump);
  return numerator / removal_rate(p, n);
}

/// Extinction threshold used by the first extinction condition.
inline double r0s_hat(const EpidemicParameters& p, const NoiseSpec& n) {
  const double s2 = n.sigma2 * n.sigma2;
  const double numerator = p.beta * p.A / p.mu1 - s2 * p.A * p.A / (2.0 * p.mu1 * p.mu1) -
                           jump_penalty(n.jump);
  return numerator / removal_rate(p, n);
}

struct ThresholdReport {
  double pexp = 1.0;
  double r0_det = 0.0;
  double r0s = std::numeric_limits<double>::quiet_NaN();
  bool r0s_available = false;  // false when chi3 <= 0
  double r0s_hat = 0.0;
  double chi1 = std::numeric_limits<double>::quiet_NaN();
  double chi2 = 0.0;
  double chi3 = 0.0;
  double ell = 0.0;
  double penalty = 0.0;
  double a5_p_max = std::numeric_limits<double>::quiet_NaN();
  double persistence_lower_bound = std::numeric_limits<double>::quiet_NaN();
  double extinction_bound_cond2 = std::numeric_limits<double>::quiet_NaN();
  double cond1_margin = 0.0;         // sigma2^2 - mu1 beta / A
  double cond1_sigma1_margin = 0.0;  // sigma1^2 - mu1 beta / A, the mortality-noise variant
  bool cond1_ok = false;
  bool cond2_ok = false;
  bool conflict = false;
  Classification classification = Classification::Indeterminate;
};

/// Candidate exponents scanned for the largest p with chi2(p) > 0.
inline constexpr std::array<double, 5> kMomentExponents = {0.5, 0.75, 1.0, 1.5, 2.0};

inline ThresholdReport classify(const EpidemicParameters& p, const NoiseSpec& n,
                                double pexp = 1.0) {
  ThresholdReport r;
  r.pexp = pexp;
  r.r0_det = r0_deterministic(p);
  r.chi3 = chi3(p, n);
  r.ell = levy_moment(n.jump, pexp);
  r.penalty = jump_penalty(n.jump);
  r.chi2 = chi2(p.mu1, n.sigma1, n.jump, pexp);
  if (r.chi2 > 0.0) r.chi1 = chi1_chi2(p, n, pexp).chi1;
  for (double candidate : kMomentExponents) {
    if (chi2(p.mu1, n.sigma1, n.jump, candidate) > 0.0) r.a5_p_max = candidate;
  }

  const double removal = removal_rate(p, n);
  if (r.chi3 > 0.0) {
    r.r0s_available = true;
    r.r0s = r0s(p, n);
    r.persistence_lower_bound =
        p.mu1 / (p.beta * (p.mu2() + p.gamma)) * removal * (r.r0s - 1.0);
  }
  r.r0s_hat = r0s_hat(p, n);

  const double s2 = n.sigma2 * n.sigma2;
  const double critical = p.mu1 * p.beta / p.A;
  r.cond1_margin = s2 - critical;
  r.cond1_sigma1_margin = n.sigma1 * n.sigma1 - critical;
  r.cond1_ok = r.r0s_hat < 1.0 && s2 <= critical;
  if (n.sigma2 > 0.0) {
    r.extinction_bound_cond2 = p.beta * p.beta / (2.0 * s2) - removal - r.penalty;
    r.cond2_ok = r.extinction_bound_cond2 < 0.0;
  }

  const bool persistent = r.r0s_available && r.r0s > 1.0;
  const bool extinct = r.cond1_ok || r.cond2_ok;
  if (persistent && extinct) {
    r.conflict = true;
    r.classification = Classification::Indeterminate;
  } else if (persistent) {
    r.classification = Classification::Persistent;
  } else if (extinct) {
    r.classification = Classification::Extinct;
  }
  return r;
}

/// Flat key/value view in a fixed column order (one CSV row per scenario).
inline std::vector<std::pair<std::string, std::string>> threshold_record(
    const ThresholdReport& r) {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  return {
      {"pexp", format_double(r.pexp)},
      {"r0_det", format_double(r.r0_det)},
      {"r0s", format_double(r.r0s)},
      {"r0s_available", b(r.r0s_available)},
      {"r0s_hat", format_double(r.r0s_hat)},
      {"chi1", format_double(r.chi1)},
      {"chi2", format_double(r.chi2)},
      {"chi3", format_double(r.chi3)},
      {"ell", format_double(r.ell)},
      {"penalty", format_double(r.penalty)},
      {"a5_p_max", format_double(r.a5_p_max)},
      {"persistence_lower_bound", format_double(r.persistence_lower_bound)},
      {"extinction_bound_cond2", format_double(r.extinction_bound_cond2)},
      {"cond1_margin", format_double(r.cond1_margin)},
      {"cond1_sigma1_margin", format_double(r.cond1_sigma1_margin)},
      {"cond1_ok", b(r.cond1_ok)},
      {"cond2_ok", b(r.cond2_ok)},
      {"conflict", b(r.conflict)},
      {"classification", std::string(to_string(r.classification))},
  };
}

}  // namespace levysir
