// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imh/estimate.hpp"
#include "imh/measures.hpp"
#include "imh/quadrature.hpp"
#include "imh/rate_fit.hpp"

namespace imh {

using IntervalList = std::vector<std::pair<double, double>>;

/// Sub-level sets C(v) = {y : w(y) <= v} of a 1-D model. With a monotone
/// hint C(v) is a single interval found by bisection; without one, level
/// crossings are bracketed on a 10001-node scan of the search window and
/// the sign beyond the window is taken from the window edge.
class LevelSets {
 public:
  explicit LevelSets(const GeneralModel& model);

  const GeneralModel& model() const { return model_; }
  double log_weight(double y) const;

  /// Points where w crosses level v (sorted).
  std::vector<double> crossings(double v) const;
  IntervalList sublevel(double v) const;
  /// Smallest weight seen on the search window (edges for monotone models).
  double weight_floor() const { return w_floor_; }

  struct Masses {
    double pi_tilde;
    double p_tilde;
    double lambda;
  };
  /// Direct quadrature of pi(C(v)), p(C(v)) and
  /// lambda(v) = integral over C(v) of p(y)(1 - w(y)/v).
  Masses masses(double v, const QuadratureConfig& cfg) const;

 private:
  double bisect(double lo, double hi, double log_v) const;

  GeneralModel model_;
  Monotone monotone_ = Monotone::None;
  double a_ = 0.0, b_ = 0.0;
  double w_floor_ = 0.0;
  std::vector<double> grid_, grid_lw_;
};

/// Cached pair (pi_tilde, p_tilde) with lambda(w) on a log-spaced grid over
/// [w_lo, w*], w_lo = max(inf w, 1e-12 w*). lambda is a cubic Hermite
/// interpolant in s = log v using the exact slope d lambda / ds =
/// pi_tilde(v)/v; pi_tilde uses monotone (Fritsch-Carlson) cubics. Queries
/// below w_lo are clamped to w_lo.
class WeightCdfPair {
 public:
  WeightCdfPair(const GeneralModel& model, const WeightSummary& summary,
                const QuadratureConfig& cfg = {}, int nodes = 4097);

  double wstar() const { return wstar_; }
  double w_lo() const { return w_lo_; }
  const LevelSets& levels() const { return *levels_; }
  const GeneralModel& model() const { return levels_->model(); }

  double pi_tilde(double w) const;
  double p_tilde(double w) const;
  double lambda(double w) const;
  LevelSets::Masses direct(double w) const { return levels_->masses(w, cfg_); }

  const std::vector<double>& node_w() const { return node_w_; }
  const std::vector<double>& node_pi() const { return node_pi_; }
  const std::vector<double>& node_p() const { return node_p_; }
  const std::vector<double>& node_lambda() const { return node_lambda_; }

  /// T_n(w) - 1 from cached cumulative tables (one table per n, built on
  /// first use). For w >= w* this is -(1 - 1/w)^n.
  double t_n_minus_one(int n, double w) const;

 private:
  std::size_t cell_of(double s) const;
  const std::vector<double>& head_table(int n) const;
  double head_integrand(int n, double s) const;

  std::shared_ptr<const LevelSets> levels_;
  QuadratureConfig cfg_;
  double wstar_ = 1.0, w_lo_ = 1.0, lambda_star_ = 0.0;
  double s0_ = 0.0, h_ = 0.0;
  std::vector<double> node_w_, node_pi_, node_p_, node_lambda_, node_slope_, node_pi_slope_;

  mutable std::mutex table_mutex_;
  mutable std::map<int, std::vector<double>> tables_;
};

WeightCdfPair make_weight_cdf_pair(const GeneralModel& model, const QuadratureConfig& cfg = {});

double lambda_fn(const WeightCdfPair& pair, double w);

/// T_n(w) = integral from w to infinity of n lambda(v)^(n-1) / v^2.
double t_n(const WeightCdfPair& pair, int n, double w);

/// Verification route: adaptive quadrature of the full T_n integral (with a
/// breakpoint at w*). With direct_lambda, lambda below w* is recomputed by
/// quadrature at every node instead of read from the cache.
double t_n_direct(const WeightCdfPair& pair, int n, double w,
                  const QuadratureConfig& cfg = {}, bool direct_lambda = false);

/// R(x) = lambda(w(x)) by sub-level-set quadrature (1-D models).
double rejection_probability(const GeneralModel& model, double x,
                             const QuadratureConfig& cfg = {});

struct McWeightCdf {
  Estimate pi_tilde;
  Estimate p_tilde;
  Estimate lambda;
};

/// Monte Carlo pair at level w from proposal draws (any support).
McWeightCdf weight_cdf_mc(const GeneralModel& model, double w, int draws,
                          std::uint64_t seed);
Estimate rejection_probability_mc(const GeneralModel& model, const Point& x, int draws,
                                  std::uint64_t seed);

/// P^n(x, [a, b]) for a 1-D model.
double n_step_kernel(const WeightCdfPair& pair, int n, double x, double a, double b,
                     const QuadratureConfig& cfg = {});

/// ||P^n(x, .) - pi||_TV computed as the integral of (1 - T_n)^+ pi.
double tv_at_point_general(const WeightCdfPair& pair, int n, double x,
                           const QuadratureConfig& cfg = {});
/// Same distance through (atom + integral |T_n - 1| pi) / 2.
double tv_at_point_general_split(const WeightCdfPair& pair, int n, double x,
                                 const QuadratureConfig& cfg = {});

enum class SpeedKind { ExactEquality, RateOnly, NotGeometric, DiscreteSandwich };
std::string to_string(SpeedKind k);

struct StepsToEps {
  double epsilon = 0.0;
  double steps = 0.0;        // fractional, log eps / log rate
  long long steps_ceil = 0;  // smallest integer n with rate^n <= eps
};

struct PerPointRow {
  double x = 0.0;
  double rejection = 0.0;  // R(x)
  double fitted_rate = 0.0;
  double upper = 0.0;      // 1 - 1/w*
};

struct RateReport {
  std::string model_name;
  double wstar = 1.0;
  bool attained = true;
  bool boundary_warning = false;
  WstarMethod method = WstarMethod::AnalyticHint;
  std::optional<Point> argmax;
  std::optional<double> exact_rate;
  SpeedKind speed_kind = SpeedKind::ExactEquality;
  double rate_slack = 0.0;  // epsilon of the rate-only lower envelope
  double pi1 = 0.0;         // discrete: target mass of the top state
  std::vector<StepsToEps> steps;
  std::vector<PerPointRow> per_point;
  std::string note;

  StepsToEps steps_to_eps(double eps) const;
  double upper(int n) const;
  double lower(int n) const;
};

struct RateReportOptions {
  std::vector<double> epsilons{0.01};
  double rate_slack = 0.01;
  WstarOptions wstar;
};

RateReport rate_report(const GeneralModel& model, const RateReportOptions& opt = {});
RateReport rate_report(const DiscreteModel& model, const RateReportOptions& opt = {});

struct PerPointGeneral {
  PerPointRow row;
  RateFit fit;
  std::vector<double> tv;  // tv[n-1] for n = 1..n_max
};

PerPointGeneral per_point_rate_general(const WeightCdfPair& pair, double x, int n_max,
                                       const QuadratureConfig& cfg = {});

}  // namespace imh
