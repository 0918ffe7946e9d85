// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include "imh/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "imh/error.hpp"

namespace imh {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t sample_row(const Matrix& M, std::size_t row, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  const auto n = M.cols();
  for (Eigen::Index j = 0; j < n; ++j) {
    acc += M(static_cast<Eigen::Index>(row), j);
    if (u < acc) return static_cast<std::size_t>(j);
  }
  // Round-off: fall back to the last state with positive mass.
  for (Eigen::Index j = n; j-- > 0;) {
    if (M(static_cast<Eigen::Index>(row), j) > 0.0) return static_cast<std::size_t>(j);
  }
  return 0;
}

double half_l1(const std::vector<double>& counts, double total, const std::vector<double>& pi) {
  double s = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) s += std::abs(counts[j] / total - pi[j]);
  return 0.5 * s;
}

}  // namespace

std::size_t sample_index(const std::vector<double>& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    acc += probs[j];
    if (u < acc) return j;
  }
  for (std::size_t j = probs.size(); j-- > 0;) {
    if (probs[j] > 0.0) return j;
  }
  return 0;
}

ChainRun<double> run_mh(const std::function<double(double)>& log_target,
                        const ProposalKernel& proposal, double x0, int steps,
                        std::uint64_t seed, std::string model_id) {
  if (steps < 1) throw Error(ErrorCode::InvalidModel, "steps must be at least 1");
  double lp = log_target(x0);
  if (lp == kNegInf || std::isnan(lp)) {
    throw Error(ErrorCode::ZeroDensityAtStart, "target density is zero at the start point");
  }
  Rng rng(seed);
  ChainRun<double> run;
  run.seed = seed;
  run.model_id = std::move(model_id);
  run.states.reserve(steps + 1);
  run.accepted.reserve(steps);
  run.states.push_back(x0);
  double x = x0;
  for (int i = 0; i < steps; ++i) {
    const double y = proposal.sample(x, rng);
    const double ly = log_target(y);
    bool accept = false;
    if (ly != kNegInf && !std::isnan(ly)) {
      const double log_a = ly + proposal.log_density(y, x) - lp - proposal.log_density(x, y);
      accept = log_a >= 0.0 || rng.uniform() < std::exp(log_a);
    }
    if (accept) {
      x = y;
      lp = ly;
    }
    run.accepted.push_back(accept);
    run.states.push_back(x);
  }
  return run;
}

ChainRun<std::size_t> run_imh(const DiscreteModel& model, std::size_t x0, int steps,
                              std::uint64_t seed) {
  if (steps < 1) throw Error(ErrorCode::InvalidModel, "steps must be at least 1");
  if (x0 >= model.size()) throw Error(ErrorCode::PointOutsideSupport, "start state out of range");
  const auto& w = model.weight();
  Rng rng(seed);
  ChainRun<std::size_t> run;
  run.seed = seed;
  run.model_id = "discrete";
  run.states.push_back(x0);
  std::size_t x = x0;
  for (int i = 0; i < steps; ++i) {
    const std::size_t y = sample_index(model.proposal(), rng);
    bool accept;
    if (w[x] == 0.0) {
      accept = w[y] > 0.0;
    } else {
      const double ratio = w[y] / w[x];
      accept = ratio >= 1.0 || rng.uniform() < ratio;
    }
    if (accept) x = y;
    run.accepted.push_back(accept);
    run.states.push_back(x);
  }
  return run;
}

ChainRun<Point> run_imh(const GeneralModel& model, const Point& x0, int steps,
                        std::uint64_t seed) {
  if (steps < 1) throw Error(ErrorCode::InvalidModel, "steps must be at least 1");
  double lw = log_weight_at(model, x0);
  if (model.target_log_density(x0) == kNegInf) {
    throw Error(ErrorCode::ZeroDensityAtStart, "target density is zero at the start point");
  }
  Rng rng(seed);
  ChainRun<Point> run;
  run.seed = seed;
  run.model_id = model.name;
  run.states.push_back(x0);
  Point x = x0;
  for (int i = 0; i < steps; ++i) {
    Point y = model.proposal_sampler(rng);
    const double lt = model.target_log_density(y);
    bool accept = false;
    if (lt != kNegInf) {
      const double ly = lt - model.proposal_log_density(y);
      accept = ly >= lw || rng.uniform() < std::exp(ly - lw);
      if (accept) {
        x = std::move(y);
        lw = ly;
      }
    }
    run.accepted.push_back(accept);
    run.states.push_back(x);
  }
  return run;
}

Matrix residual_kernel(const DiscreteModel& model) {
  const TransitionMatrix P = build_kernel(model);
  const double ws = model.weight().front();
  const auto n = static_cast<Eigen::Index>(model.size());
  Eigen::Map<const Eigen::RowVectorXd> pi(model.target().data(), n);
  if (ws == 1.0) return P.entries;  // pi = p: the residual is never used
  Matrix q = (P.entries - Vector::Ones(n) * pi / ws) / (1.0 - 1.0 / ws);
  const double worst = q.minCoeff();
  if (worst < -1e-14) {
    throw Error(ErrorCode::ResidualNegative,
                "residual kernel has entry " + std::to_string(worst));
  }
  return q.cwiseMax(0.0);
}

CouplingRun<std::size_t> run_coupling(const DiscreteModel& model, std::size_t x0,
                                      std::uint64_t seed) {
  if (x0 >= model.size()) throw Error(ErrorCode::PointOutsideSupport, "start state out of range");
  const Matrix q = residual_kernel(model);
  const double head = 1.0 / model.weight().front();
  Rng rng(seed);
  CouplingRun<std::size_t> run;
  run.seed = seed;
  std::size_t x = x0;
  std::size_t y = sample_index(model.target(), rng);
  int n = 0;
  run.meeting_time = -1;
  while (true) {
    if (x == y && run.meeting_time < 0) run.meeting_time = n;
    if (run.meeting_time >= 0 && run.coalescence_time > 0) break;
    if (run.meeting_time < 0) run.pre_meeting.emplace_back(x, y);
    ++n;
    if (rng.uniform() < head) {
      x = y = sample_index(model.target(), rng);
      if (run.coalescence_time == 0) run.coalescence_time = n;
    } else if (x == y) {
      x = y = sample_row(q, x, rng);
    } else {
      x = sample_row(q, x, rng);
      y = sample_row(q, y, rng);
    }
    if (n > 100000000) {
      throw Error(ErrorCode::BudgetExhausted, "coupling did not coalesce in 1e8 steps");
    }
  }
  return run;
}

CouplingRun<Point> run_coupling(const GeneralModel& model, double wstar, const Point& x0,
                                std::uint64_t seed) {
  if (!(wstar >= 1.0) || !std::isfinite(wstar)) {
    throw Error(ErrorCode::UnboundedWeight, "coupling needs a finite w* >= 1");
  }
  if (!model.support.contains(x0)) {
    throw Error(ErrorCode::PointOutsideSupport, "start point outside the support");
  }
  Rng rng(seed);
  CouplingRun<Point> run;
  run.seed = seed;
  int n = 1;
  while (rng.uniform() >= 1.0 / wstar) ++n;
  run.coalescence_time = n;
  run.meeting_time = n;
  return run;
}

MeetingTimeStats coupling_replicas(const DiscreteModel& model, std::size_t x0, int replicas,
                                   std::uint64_t seed, int max_n) {
  if (replicas < 1) throw Error(ErrorCode::InvalidModel, "replicas must be positive");
  MeetingTimeStats st;
  st.times.resize(replicas);
  for (int r = 0; r < replicas; ++r) {
    st.times[r] = run_coupling(model, x0, stream_seed(seed, r)).meeting_time;
  }
  st.tail.assign(max_n + 1, 0.0);
  st.tail_stderr.assign(max_n + 1, 0.0);
  double sum = 0.0;
  for (int t : st.times) {
    sum += t;
    for (int n = 0; n <= std::min(t, max_n); ++n) st.tail[n] += 1.0;
  }
  st.mean = sum / replicas;
  for (int n = 0; n <= max_n; ++n) {
    st.tail[n] /= replicas;
    st.tail_stderr[n] = std::sqrt(st.tail[n] * (1.0 - st.tail[n]) / replicas);
  }
  return st;
}

Estimate empirical_tv(const TransitionMatrix& P, const std::vector<double>& pi,
                      std::size_t x0, int t, int replicas, std::uint64_t seed) {
  if (x0 >= P.n()) throw Error(ErrorCode::PointOutsideSupport, "start state out of range");
  if (t < 0 || replicas < 1) throw Error(ErrorCode::InvalidModel, "need t >= 0 and replicas >= 1");
  std::vector<std::size_t> ends(replicas);
  for (int r = 0; r < replicas; ++r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    std::size_t x = x0;
    for (int s = 0; s < t; ++s) x = sample_row(P.entries, x, rng);
    ends[r] = x;
  }
  std::vector<double> counts(pi.size(), 0.0);
  for (std::size_t e : ends) counts[e] += 1.0;
  Estimate est;
  est.value = half_l1(counts, replicas, pi);

  constexpr int kBoot = 200;
  Rng boot(seed, 0xb0075742ULL);
  double s = 0.0, s2 = 0.0;
  for (int b = 0; b < kBoot; ++b) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (int r = 0; r < replicas; ++r) {
      counts[ends[static_cast<std::size_t>(boot.uniform() * replicas)]] += 1.0;
    }
    const double v = half_l1(counts, replicas, pi);
    s += v;
    s2 += v * v;
  }
  const double mean = s / kBoot;
  est.std_error = std::sqrt(std::max(0.0, (s2 / kBoot - mean * mean) * kBoot / (kBoot - 1)));
  return est;
}

Estimate empirical_tv(const DiscreteModel& model, std::size_t x0, int t, int replicas,
                      std::uint64_t seed) {
  return empirical_tv(build_kernel(model), model.target(), x0, t, replicas, seed);
}

}  // namespace imh
