// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "imh/discrete.hpp"
#include "imh/estimate.hpp"
#include "imh/measures.hpp"
#include "imh/rng.hpp"

namespace imh {

template <class State>
struct ChainRun {
  std::vector<State> states;
  std::vector<bool> accepted;  // accepted[i]: move from states[i] to states[i+1]
  std::uint64_t seed = 0;
  std::string model_id;

  double acceptance_rate() const {
    if (accepted.empty()) return 0.0;
    std::size_t k = 0;
    for (bool a : accepted) k += a;
    return static_cast<double>(k) / static_cast<double>(accepted.size());
  }
};

/// Conditional proposal q(x, .) on the real line.
struct ProposalKernel {
  std::function<double(double, Rng&)> sample;
  std::function<double(double, double)> log_density;  // log q(from, to)
};

/// Metropolis-Hastings with acceptance min(1, q(x',x) pi(x') / (q(x,x') pi(x))).
ChainRun<double> run_mh(const std::function<double(double)>& log_target,
                        const ProposalKernel& proposal, double x0, int steps,
                        std::uint64_t seed, std::string model_id = "mh");

/// Discrete IMH in canonical state order.
ChainRun<std::size_t> run_imh(const DiscreteModel& model, std::size_t x0, int steps,
                              std::uint64_t seed);
ChainRun<Point> run_imh(const GeneralModel& model, const Point& x0, int steps,
                        std::uint64_t seed);

template <class State>
struct CouplingRun {
  /// First n with Phi_n = Phi~_n (0 if the chains start together).
  int meeting_time = 0;
  /// Step of the first common draw from pi (coin with head probability 1/w*).
  int coalescence_time = 0;
  std::vector<std::pair<State, State>> pre_meeting;
  std::uint64_t seed = 0;
};

/// q_res(x, .) = (P(x, .) - pi / w*) / (1 - 1/w*) for every canonical state.
/// Throws ResidualNegative when an entry drops below -1e-14.
Matrix residual_kernel(const DiscreteModel& model);

/// Coupling of the chain from x0 with a stationary copy: at each step a coin
/// with head probability 1/w* moves both chains to one common draw from pi;
/// otherwise each moves independently by its residual kernel.
CouplingRun<std::size_t> run_coupling(const DiscreteModel& model, std::size_t x0,
                                      std::uint64_t seed);

/// Continuous models: only the coalescence time is simulated (geometric with
/// success probability 1/w*); residual trajectories are not drawn.
CouplingRun<Point> run_coupling(const GeneralModel& model, double wstar, const Point& x0,
                                std::uint64_t seed);

struct MeetingTimeStats {
  std::vector<int> times;           // per replica
  std::vector<double> tail;         // tail[n] = fraction with T >= n
  std::vector<double> tail_stderr;  // binomial standard errors
  double mean = 0.0;
};

/// Replica i uses stream i of the master seed.
MeetingTimeStats coupling_replicas(const DiscreteModel& model, std::size_t x0,
                                   int replicas, std::uint64_t seed, int max_n = 30);

/// Empirical TV between the law of X_t and pi from `replicas` independent
/// chains started at x0, with a bootstrap standard error (200 resamples).
Estimate empirical_tv(const TransitionMatrix& P, const std::vector<double>& pi,
                      std::size_t x0, int t, int replicas, std::uint64_t seed);
Estimate empirical_tv(const DiscreteModel& model, std::size_t x0, int t, int replicas,
                      std::uint64_t seed);

/// Draws an index from a probability vector by inversion.
std::size_t sample_index(const std::vector<double>& probs, Rng& rng);

}  // namespace imh
