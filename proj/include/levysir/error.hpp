// Copyright 2026 The levysir Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace levysir {

enum class ErrorCode {
  InvalidArgument,
  InvalidMeasure,
  NonFiniteIntegrand,
  NonpositiveChi2,
  NonpositiveChi3,
  AssumptionViolated,
  StepSizeTooLarge,
  NumericalBlowup,
  EmptyTrajectory,
  TooFewSamples,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidMeasure: return "InvalidMeasure";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::NonpositiveChi2: return "NonpositiveChi2";
    case ErrorCode::NonpositiveChi3: return "NonpositiveChi3";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::StepSizeTooLarge: return "StepSizeTooLarge";
    case ErrorCode::NumericalBlowup: return "NumericalBlowup";
    case ErrorCode::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Error(ErrorCode code, const std::string& what, std::uint64_t path_id)
      : std::runtime_error(std::string(to_string(code)) + ": " + what +
                           " (path_id " + std::to_string(path_id) + ")"),
        code_(code),
        path_id_(path_id) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::uint64_t> path_id() const noexcept { return path_id_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> path_id_;
};

}  // namespace levysir
