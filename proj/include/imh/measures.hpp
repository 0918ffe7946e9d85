// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imh/rng.hpp"

namespace imh {

using Point = std::vector<double>;

/// Finite-state IMH instance, stored in canonical order (weights
/// non-increasing, ties in input order). States with zero target and zero
/// proposal mass are dropped; original positions are kept in user_index().
class DiscreteModel {
 public:
  DiscreteModel(std::vector<double> target, std::vector<double> proposal);

  std::size_t size() const { return target_.size(); }
  const std::vector<double>& target() const { return target_; }
  const std::vector<double>& proposal() const { return proposal_; }
  const std::vector<double>& weight() const { return weight_; }

  /// Input position of canonical state i.
  const std::vector<std::size_t>& user_index() const { return user_index_; }
  std::size_t user_size() const { return user_size_; }
  /// Canonical position of input state u, or size() if u was dropped.
  std::size_t canonical_of(std::size_t u) const;

  bool has_zero_weight() const { return weight_.back() == 0.0; }
  /// Smallest positive target mass.
  double pi_min() const;

 private:
  std::vector<double> target_;
  std::vector<double> proposal_;
  std::vector<double> weight_;
  std::vector<std::size_t> user_index_;
  std::size_t user_size_ = 0;
};

struct Support {
  enum class Kind { Interval, Simplex, Product };

  Kind kind = Kind::Interval;
  std::vector<std::pair<double, double>> bounds;  // Interval and Product
  int simplex_k = 0;

  static Support interval(double a, double b);
  static Support simplex(int k);
  static Support product(std::vector<std::pair<double, double>> bounds);

  /// Length of a point vector (K coordinates for the simplex).
  int dimension() const;
  bool contains(std::span<const double> x) const;
  void validate() const;
};

enum class Monotone { Increasing, Decreasing, None };

struct StructureHints {
  std::optional<Monotone> weight_monotone;
  std::optional<Point> known_argmax;
  std::optional<double> known_wstar;
  std::optional<bool> wstar_attained;
};

using LogDensity = std::function<double(std::span<const double>)>;
using Sampler = std::function<Point(Rng&)>;

/// Continuous IMH instance. Densities are given on the log scale; on the
/// simplex they are densities of the first K-1 coordinates.
struct GeneralModel {
  std::string name;
  Support support;
  LogDensity target_log_density;
  LogDensity proposal_log_density;
  Sampler proposal_sampler;
  Sampler target_sampler;  // optional; needed only for coupling draws
  StructureHints hints;

  double target_density(std::span<const double> x) const;
  double proposal_density(std::span<const double> x) const;
  bool is_one_dimensional() const {
    return support.kind == Support::Kind::Interval;
  }

  /// Structural checks plus hint consistency (w(known_argmax) must equal
  /// known_wstar within 1e-9 when both are given).
  void validate() const;
};

enum class WstarMethod { AnalyticHint, GridRefine, MonteCarloSup };

std::string to_string(WstarMethod m);
std::string to_string(Monotone m);

struct WeightSummary {
  double wstar = 1.0;
  std::optional<Point> argmax;
  bool attained = true;
  WstarMethod method = WstarMethod::AnalyticHint;
  /// Set when the maximum sits on a truncation boundary of the search
  /// region, so attainment could not be decided.
  bool boundary_warning = false;
};

/// w_i for canonical state i.
double weight_at(const DiscreteModel& model, std::size_t state);
double weight_at(const GeneralModel& model, std::span<const double> x);
double weight_at(const GeneralModel& model, double x);
double log_weight_at(const GeneralModel& model, std::span<const double> x);

struct WstarOptions {
  /// Grid nodes for 1-D scans; random simplex draws for simplex supports.
  int budget = 0;  // 0 selects 10001 (1-D) or 200000 (simplex)
  double unbounded_threshold = 1e8;
  double refine_tol = 1e-10;
  std::uint64_t seed = 0x5eed;
};

WeightSummary compute_wstar(const GeneralModel& model, const WstarOptions& opt = {});

/// Argmax is reported as a user (input) index.
WeightSummary wstar_discrete(const DiscreteModel& model);

/// Finite search window for a 1-D model: infinite ends are cut where the
/// proposal puts at most 1e-10 mass beyond them.
std::pair<double, double> search_window(const GeneralModel& model);

}  // namespace imh
