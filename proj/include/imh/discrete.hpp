// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "imh/measures.hpp"
#include "imh/rate_fit.hpp"

namespace imh {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct TransitionMatrix {
  Matrix entries;

  std::size_t n() const { return static_cast<std::size_t>(entries.rows()); }

  /// Builds from nested rows and checks that the matrix is square,
  /// nonnegative and row-stochastic within 1e-12.
  static TransitionMatrix from_rows(const std::vector<std::vector<double>>& rows);
  void validate() const;
};

/// IMH kernel in canonical state order. A move proposed from a zero-weight
/// state is accepted whenever the proposed state has positive weight.
TransitionMatrix build_kernel(const DiscreteModel& model);

/// P - 1 p^T: upper triangular with the nontrivial eigenvalues on its
/// diagonal (last diagonal entry 0).
Matrix kernel_upper_part(const DiscreteModel& model);

struct SpectralDecomposition {
  /// eigenvalues[0] = 1, then lambda_1 >= ... >= lambda_{n-1}.
  std::vector<double> eigenvalues;
  /// Column k-1 holds v_k, k = 1..n-1.
  Matrix eigenvectors;
  /// Column k-1 holds f_k = v_k / ||v_k||_pi (unit norm in L2(pi)).
  Matrix normalized;
};

SpectralDecomposition liu_spectrum(const DiscreteModel& model);

struct RankOneResult {
  std::vector<double> eigenvalues;
  std::optional<Matrix> eigenvectors;
  bool degenerate = false;
};

/// Spectrum of B = A + u_n u^T, where the columns of `eigvecs` are
/// eigenvectors of A for `eigvals` and the last column is u_n. The
/// eigenvalues are lambda_1..lambda_{n-1}, lambda_n + u^T u_n. For j < n the
/// eigenvector is u_j - c_j u_n with c_j = u^T u_j / (lambda_n + u^T u_n -
/// lambda_j); u_n itself is kept. With want_vectors, a vanishing denominator
/// at nonzero numerator throws DegeneratePerturbation.
RankOneResult rank_one_eigen(const std::vector<double>& eigvals, const Matrix& eigvecs,
                             const Vector& u, bool want_vectors = false);

struct TvTrajectory {
  /// per_state(x, t) = ||P^t(x, .) - pi||_TV; may underflow to 0.
  Matrix per_state;
  /// log of per_state without underflow; -inf for exact zeros.
  Matrix log_per_state;
  std::vector<double> d_max;
  int horizon = 0;
};

/// Exact TV trajectories for t = 0..T. Each row of P^t - 1 pi^T is iterated
/// on its own, re-projected onto zero row sum and rescaled every step, so
/// log_per_state keeps full relative precision for any horizon.
TvTrajectory exact_tv(const TransitionMatrix& P, const std::vector<double>& pi, int T);
TvTrajectory exact_tv(const DiscreteModel& model, int T);

/// Unscaled deviation rows P^t(x, .) - pi for t = 0..T.
std::vector<Vector> deviation_rows(const TransitionMatrix& P,
                                   const std::vector<double>& pi, std::size_t x, int T);

struct DiscreteBounds {
  std::vector<double> lower;  // (1 - pi_1)(1 - 1/w*)^t
  std::vector<double> upper;  // (1 - 1/w*)^t
  std::vector<double> d_max;
  bool inside = true;
};

/// Envelope pair and d_max for t = 0..T. Throws SandwichViolated when
/// d_max leaves the envelopes by more than 1e-12.
DiscreteBounds rate_bounds_discrete(const DiscreteModel& model, int T);

struct PerPointDiscrete {
  std::vector<RateFit> fits;      // per canonical state
  double theoretical = 0.0;       // 1 - 1/w*
  /// Spectral lower-bound chain, available when every weight is positive.
  bool chain_checked = false;
  bool chain_holds = true;
  std::vector<double> c_pi;       // |f_1(x)| per canonical state
  double worst_chain_gap = 0.0;   // most negative slack seen in the chain
};

/// Smallest T >= floor for which every mode below lambda_1 has decayed by
/// `contamination` relative to lambda_1 over half the horizon, so a fit on
/// [T/2, T] sees a single exponential. Capped at `cap`.
int resolving_horizon(const DiscreteModel& model, int floor = 20, double contamination = 1e-8,
                      int cap = 1000000);

/// Requires T >= 20.
PerPointDiscrete per_point_rate_discrete(const DiscreteModel& model, int T);

/// ||P^t(x,.)/pi - 1||_{2,pi} for a deviation row e = P^t(x,.) - pi.
double l2_pi_deviation(const Vector& e, const std::vector<double>& pi);
/// max_y |P^t(x,y)/pi_y - 1|.
double linf_deviation(const Vector& e, const std::vector<double>& pi);

}  // namespace imh
