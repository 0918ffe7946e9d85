// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include "imh/error.hpp"

namespace imh {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::PointOutsideSupport: return "PointOutsideSupport";
    case ErrorCode::ZeroProposalDensity: return "ZeroProposalDensity";
    case ErrorCode::UnboundedWeight: return "UnboundedWeight";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::DeltaOutOfRange: return "DeltaOutOfRange";
    case ErrorCode::ModeUndefined: return "ModeUndefined";
    case ErrorCode::ZeroWeightState: return "ZeroWeightState";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::ZeroDensityAtStart: return "ZeroDensityAtStart";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::DegeneratePerturbation: return "DegeneratePerturbation";
    case ErrorCode::SandwichViolated: return "SandwichViolated";
    case ErrorCode::ResidualNegative: return "ResidualNegative";
  }
  return "Unknown";
}

bool is_model_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidModel:
    case ErrorCode::PointOutsideSupport:
    case ErrorCode::ZeroProposalDensity:
    case ErrorCode::UnboundedWeight:
    case ErrorCode::ThetaOutOfRange:
    case ErrorCode::DeltaOutOfRange:
    case ErrorCode::ModeUndefined:
    case ErrorCode::ZeroWeightState:
    case ErrorCode::NotStationary:
    case ErrorCode::ZeroDensityAtStart:
      return true;
    default:
      return false;
  }
}

}  // namespace imh
