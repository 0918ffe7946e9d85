// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include "imh/rate_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "imh/error.hpp"

namespace imh {

RateFit fit_tail_rate(std::span<const double> log_tv, int t0) {
  RateFit fit;
  const int count = static_cast<int>(log_tv.size());
  if (count == 0) {
    throw Error(ErrorCode::DegenerateFit, "no distances to fit");
  }

  int last_positive = -1;
  for (int i = 0; i < count; ++i) {
    if (std::isfinite(log_tv[i])) {
      last_positive = i;
    } else {
      break;
    }
  }

  bool all_zero_after_first = true;
  for (int i = 0; i < count; ++i) {
    if (t0 + i >= 1 && std::isfinite(log_tv[i])) {
      all_zero_after_first = false;
      break;
    }
  }
  if (all_zero_after_first) {
    fit.vanished = true;
    fit.rate = 0.0;
    fit.slope = -std::numeric_limits<double>::infinity();
    return fit;
  }

  const int t_last = t0 + last_positive;
  const int t_first = std::max(t0, t_last / 2);
  fit.window_begin = t_first;
  fit.window_end = t_last;
  fit.points = t_last - t_first + 1;
  if (fit.points < 3) {
    throw Error(ErrorCode::DegenerateFit,
                "only " + std::to_string(fit.points) +
                    " positive distances in the tail window ending at t=" +
                    std::to_string(t_last));
  }

  // Centered sums for numerical stability.
  double t_mean = 0.0, y_mean = 0.0;
  for (int t = t_first; t <= t_last; ++t) {
    t_mean += t;
    y_mean += log_tv[t - t0];
  }
  t_mean /= fit.points;
  y_mean /= fit.points;
  double sxy = 0.0, sxx = 0.0;
  for (int t = t_first; t <= t_last; ++t) {
    const double dt = t - t_mean;
    sxy += dt * (log_tv[t - t0] - y_mean);
    sxx += dt * dt;
  }
  fit.slope = sxy / sxx;
  fit.rate = std::exp(fit.slope);
  return fit;
}

}  // namespace imh
