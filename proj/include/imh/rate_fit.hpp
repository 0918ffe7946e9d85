// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <span>

namespace imh {

struct RateFit {
  double rate = 0.0;   // exp(slope); 0 when the distance vanishes
  double slope = 0.0;  // least-squares slope of log distance against time
  int window_begin = 0;
  int window_end = 0;
  int points = 0;
  bool vanished = false;  // distance identically zero after the first step
};

/// Fits log d(t) = a + b t by least squares over the tail window [T/2, T],
/// where log_tv[i] holds log d(t0 + i) and T is the last time. Entries equal
/// to -infinity are exact zeros. If zeros appear before T the window is
/// moved to [L/2, L] with L the last time carrying a positive value. Throws
/// DegenerateFit when fewer than three positive points remain.
RateFit fit_tail_rate(std::span<const double> log_tv, int t0 = 0);

}  // namespace imh
