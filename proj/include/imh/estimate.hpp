// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <cmath>

namespace imh {

/// Monte Carlo estimate with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;

  /// |value - truth| measured in standard errors (infinite when the error
  /// is zero and the values differ).
  double z_score(double truth) const {
    const double d = std::abs(value - truth);
    if (d == 0.0) return 0.0;
    return std_error > 0.0 ? d / std_error : INFINITY;
  }
};

}  // namespace imh
