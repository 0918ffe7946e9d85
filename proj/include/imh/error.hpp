// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace imh {

enum class ErrorCode {
  // Model errors: the input does not describe a valid or usable chain.
  InvalidModel,
  PointOutsideSupport,
  ZeroProposalDensity,
  UnboundedWeight,
  ThetaOutOfRange,
  DeltaOutOfRange,
  ModeUndefined,
  ZeroWeightState,
  NotStationary,
  ZeroDensityAtStart,
  // Numerical errors: the input is fine but a computation did not succeed.
  QuadratureFailure,
  BudgetExhausted,
  DegenerateFit,
  DegeneratePerturbation,
  SandwichViolated,
  ResidualNegative,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for codes that describe a bad model rather than a failed computation.
bool is_model_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace imh
