// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace imh {

/// How infinite endpoints are mapped onto a finite parameter interval.
enum class TailMap {
  /// x = a + t/(1-t) on [0,1) (mirrored for -infinity).
  Rational,
};

struct QuadratureConfig {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  TailMap tail_map = TailMap::Rational;

  /// Throws InvalidModel when tolerances are not positive or the
  /// subdivision budget is below 10.
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  int subdivisions = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (10/21 point) integration of f over [a, b].
/// Either endpoint may be infinite. Optional interior breakpoints (kinks,
/// discontinuities) are used as initial subdivision points. The result
/// reports convergence rather than throwing.
QuadResult integrate(const Integrand& f, double a, double b,
                     const QuadratureConfig& cfg = {},
                     std::span<const double> breakpoints = {});

/// Like integrate() but throws Error(QuadratureFailure) when the requested
/// tolerance is not reached.
double integrate_or_throw(const Integrand& f, double a, double b,
                          const QuadratureConfig& cfg = {},
                          std::span<const double> breakpoints = {});

/// Single application of the 21-point Kronrod rule on a finite interval.
double kronrod21(const Integrand& f, double a, double b);

/// Smallest point b >= a (resp. largest b <= a when `upper` is false) such
/// that the mass of `density` beyond b is at most `tail_mass`. The search
/// runs on an infinite side of the support; the tail integrals themselves
/// are computed with integrate().
double tail_quantile(const Integrand& density, double a, bool upper,
                     double tail_mass, const QuadratureConfig& cfg = {});

}  // namespace imh
