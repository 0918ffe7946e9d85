// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include "imh/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "imh/error.hpp"
#include "imh/quadrature.hpp"

namespace imh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSumTol = 1e-12;

void check_probability_vector(const std::vector<double>& v, const char* what) {
  double sum = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorCode::InvalidModel,
                  std::string(what) + " has a negative or non-finite entry");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kSumTol) {
    throw Error(ErrorCode::InvalidModel,
                std::string(what) + " sums to " + std::to_string(sum) +
                    ", not 1 within 1e-12");
  }
}

// Golden-section search for a maximum of f on [l, r].
std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double l, double r, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = r - g * (r - l);
  double d = l + g * (r - l);
  double fc = f(c), fd = f(d);
  while (r - l > tol) {
    if (fc >= fd) {
      r = d;
      d = c;
      fd = fc;
      c = r - g * (r - l);
      fc = f(c);
    } else {
      l = c;
      c = d;
      fc = fd;
      d = l + g * (r - l);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

double unbounded_log_threshold(const WstarOptions& opt) {
  return std::log(opt.unbounded_threshold);
}

[[noreturn]] void throw_unbounded(double w) {
  throw Error(ErrorCode::UnboundedWeight,
              "weight reaches " + std::to_string(w) +
                  "; sup pi/p is infinite, so the chain is not geometrically ergodic");
}

// Safe log-weight for search loops: outside-support and zero-target points
// contribute -infinity, zero proposal density at positive target is an error.
double search_log_weight(const GeneralModel& model, std::span<const double> x) {
  const double lt = model.target_log_density(x);
  if (lt == -kInf || std::isnan(lt)) return -kInf;
  const double lp = model.proposal_log_density(x);
  if (lp == -kInf) {
    throw Error(ErrorCode::ZeroProposalDensity,
                "proposal density vanishes where the target is positive");
  }
  return lt - lp;
}

WeightSummary wstar_interval(const GeneralModel& model, const WstarOptions& opt) {
  const int nodes = opt.budget > 0 ? opt.budget : 10001;
  const auto [a, b] = model.support.bounds.front();
  const auto [lo, hi] = search_window(model);
  auto lw = [&](double x) {
    const double p[1] = {x};
    return search_log_weight(model, p);
  };
  const double log_cap = unbounded_log_threshold(opt);

  std::vector<double> grid(nodes), vals(nodes);
  int best = 0;
  for (int i = 0; i < nodes; ++i) {
    grid[i] = i + 1 == nodes ? hi : lo + (hi - lo) * i / (nodes - 1);
    vals[i] = lw(grid[i]);
    if (vals[i] == kInf || vals[i] > log_cap) throw_unbounded(std::exp(vals[i]));
    if (vals[i] > vals[best]) best = i;
  }
  if (vals[best] == -kInf) {
    throw Error(ErrorCode::InvalidModel, "target density is zero on the search grid");
  }

  WeightSummary out;
  out.method = WstarMethod::GridRefine;
  const int l = std::max(best - 1, 0);
  const int r = std::min(best + 1, nodes - 1);
  auto [x_star, lw_star] = golden_max(lw, grid[l], grid[r], opt.refine_tol);
  if (vals[best] >= lw_star) {
    x_star = grid[best];
    lw_star = vals[best];
  }

  // A maximum on a truncated (infinite) end may keep growing outward.
  const bool at_lo = best == 0 && std::isinf(a);
  const bool at_hi = best == nodes - 1 && std::isinf(b);
  if (at_lo || at_hi) {
    out.boundary_warning = true;
    const double dir = at_hi ? 1.0 : -1.0;
    const double edge = at_hi ? hi : lo;
    double step = std::max(1.0, hi - lo);
    for (int k = 0; k < 60; ++k, step *= 2.0) {
      const double x = edge + dir * step;
      const double pt[1] = {x};
      // Past double-precision density underflow the log ratio is noise.
      if (model.proposal_log_density(pt) < -700.0) break;
      const double v = lw(x);
      if (v == kInf || v > log_cap) throw_unbounded(std::exp(v));
      if (v > lw_star) {
        lw_star = v;
        x_star = x;
      }
    }
  }

  out.wstar = std::exp(lw_star);
  out.argmax = Point{x_star};
  out.attained = true;
  return out;
}

// Maps the K-1 free coordinates to a full simplex point; returns false when
// outside the simplex.
bool complete_simplex(std::span<const double> free, Point& full) {
  double s = 0.0;
  for (std::size_t i = 0; i < free.size(); ++i) {
    if (free[i] < 0.0) return false;
    full[i] = free[i];
    s += free[i];
  }
  if (s > 1.0) return false;
  full.back() = std::max(0.0, 1.0 - s);
  return true;
}

WeightSummary wstar_simplex(const GeneralModel& model, const WstarOptions& opt) {
  const int k = model.support.simplex_k;
  const double log_cap = unbounded_log_threshold(opt);
  WeightSummary out;
  Point full(k);

  auto lw_free = [&](std::span<const double> free) {
    if (!complete_simplex(free, full)) return -kInf;
    const double v = search_log_weight(model, full);
    if (v == kInf || v > log_cap) throw_unbounded(std::exp(v));
    return v;
  };

  if (k == 2) {
    const int nodes = opt.budget > 0 ? opt.budget : 200000;
    auto f = [&](double t) {
      const double free[1] = {t};
      return lw_free(free);
    };
    int best = 0;
    double best_val = -kInf;
    for (int i = 0; i < nodes; ++i) {
      const double t = static_cast<double>(i) / (nodes - 1);
      const double v = f(t);
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    const double l = static_cast<double>(std::max(best - 1, 0)) / (nodes - 1);
    const double r = static_cast<double>(std::min(best + 1, nodes - 1)) / (nodes - 1);
    auto [t, v] = golden_max(f, l, r, opt.refine_tol);
    if (v < best_val) {
      t = static_cast<double>(best) / (nodes - 1);
      v = best_val;
    }
    out.method = WstarMethod::GridRefine;
    out.wstar = std::exp(v);
    out.argmax = Point{t, 1.0 - t};
    return out;
  }

  const int draws = opt.budget > 0 ? opt.budget : 200000;
  Rng rng(opt.seed);
  std::vector<double> free(k - 1), best_free(k - 1, 1.0 / k);
  double best_val = lw_free(best_free);
  for (int i = 0; i < draws; ++i) {
    double s = 0.0;
    std::vector<double> e(k);
    for (int j = 0; j < k; ++j) s += (e[j] = rng.exponential());
    for (int j = 0; j < k - 1; ++j) free[j] = e[j] / s;
    const double v = lw_free(free);
    if (v > best_val) {
      best_val = v;
      best_free = free;
    }
  }
  // Compass search on the free coordinates, keeping the last coordinate as
  // the slack variable.
  double step = 1.0 / std::cbrt(static_cast<double>(draws));
  while (step > opt.refine_tol) {
    bool moved = false;
    for (int j = 0; j < k - 1 && !moved; ++j) {
      for (double sgn : {1.0, -1.0}) {
        free = best_free;
        free[j] += sgn * step;
        const double v = lw_free(free);
        if (v > best_val) {
          best_val = v;
          best_free = free;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  complete_simplex(best_free, full);
  out.method = WstarMethod::MonteCarloSup;
  out.wstar = std::exp(best_val);
  out.argmax = full;
  return out;
}

}  // namespace

DiscreteModel::DiscreteModel(std::vector<double> target, std::vector<double> proposal) {
  if (target.empty() || target.size() != proposal.size()) {
    throw Error(ErrorCode::InvalidModel,
                "target and proposal must be non-empty and of equal length");
  }
  check_probability_vector(target, "target");
  check_probability_vector(proposal, "proposal");
  user_size_ = target.size();

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] > 0.0 && proposal[i] == 0.0) {
      throw Error(ErrorCode::InvalidModel,
                  "state " + std::to_string(i + 1) +
                      " has target mass but no proposal mass (support not contained)");
    }
    if (target[i] > 0.0 || proposal[i] > 0.0) keep.push_back(i);
  }

  std::vector<double> w(target.size(), 0.0);
  for (std::size_t i : keep) w[i] = target[i] / proposal[i];
  std::stable_sort(keep.begin(), keep.end(),
                   [&](std::size_t x, std::size_t y) { return w[x] > w[y]; });

  for (std::size_t i : keep) {
    target_.push_back(target[i]);
    proposal_.push_back(proposal[i]);
    weight_.push_back(w[i]);
    user_index_.push_back(i);
  }
}

std::size_t DiscreteModel::canonical_of(std::size_t u) const {
  const auto it = std::find(user_index_.begin(), user_index_.end(), u);
  return static_cast<std::size_t>(it - user_index_.begin());
}

double DiscreteModel::pi_min() const {
  double m = kInf;
  for (double x : target_) {
    if (x > 0.0) m = std::min(m, x);
  }
  return m;
}

Support Support::interval(double a, double b) {
  Support s;
  s.kind = Kind::Interval;
  s.bounds = {{a, b}};
  s.validate();
  return s;
}

Support Support::simplex(int k) {
  Support s;
  s.kind = Kind::Simplex;
  s.simplex_k = k;
  s.validate();
  return s;
}

Support Support::product(std::vector<std::pair<double, double>> bounds) {
  Support s;
  s.kind = Kind::Product;
  s.bounds = std::move(bounds);
  s.validate();
  return s;
}

int Support::dimension() const {
  switch (kind) {
    case Kind::Interval: return 1;
    case Kind::Simplex: return simplex_k;
    case Kind::Product: return static_cast<int>(bounds.size());
  }
  return 0;
}

void Support::validate() const {
  if (kind == Kind::Simplex) {
    if (simplex_k < 2) {
      throw Error(ErrorCode::InvalidModel, "simplex dimension must be at least 2");
    }
    return;
  }
  if (bounds.empty() || (kind == Kind::Interval && bounds.size() != 1)) {
    throw Error(ErrorCode::InvalidModel, "support bounds are missing");
  }
  for (const auto& [a, b] : bounds) {
    if (std::isnan(a) || std::isnan(b) || !(a < b)) {
      throw Error(ErrorCode::InvalidModel, "support endpoints must satisfy a < b");
    }
  }
}

bool Support::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension()) return false;
  if (kind == Kind::Simplex) {
    double s = 0.0;
    for (double v : x) {
      if (!(v >= -1e-12)) return false;
      s += v;
    }
    return std::abs(s - 1.0) <= 1e-9;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= bounds[i].first && x[i] <= bounds[i].second)) return false;
  }
  return true;
}

double GeneralModel::target_density(std::span<const double> x) const {
  return std::exp(target_log_density(x));
}

double GeneralModel::proposal_density(std::span<const double> x) const {
  return std::exp(proposal_log_density(x));
}

void GeneralModel::validate() const {
  support.validate();
  if (!target_log_density || !proposal_log_density) {
    throw Error(ErrorCode::InvalidModel, "model '" + name + "' lacks a density");
  }
  if (!proposal_sampler) {
    throw Error(ErrorCode::InvalidModel, "model '" + name + "' lacks a proposal sampler");
  }
  if (hints.weight_monotone && *hints.weight_monotone != Monotone::None &&
      support.kind != Support::Kind::Interval) {
    throw Error(ErrorCode::InvalidModel, "monotone weight hints need a 1-D interval support");
  }
  if (hints.known_wstar && !(*hints.known_wstar > 0.0)) {
    throw Error(ErrorCode::InvalidModel, "known_wstar must be positive");
  }
  if (hints.known_argmax) {
    if (!support.contains(*hints.known_argmax)) {
      throw Error(ErrorCode::PointOutsideSupport, "known_argmax lies outside the support");
    }
    if (hints.known_wstar) {
      const double w = weight_at(*this, *hints.known_argmax);
      if (std::abs(w - *hints.known_wstar) > 1e-9 * std::max(1.0, *hints.known_wstar)) {
        throw Error(ErrorCode::InvalidModel,
                    "w(known_argmax) = " + std::to_string(w) + " differs from known_wstar");
      }
    }
  }
}

std::string to_string(WstarMethod m) {
  switch (m) {
    case WstarMethod::AnalyticHint: return "analytic-hint";
    case WstarMethod::GridRefine: return "grid-refine";
    case WstarMethod::MonteCarloSup: return "monte-carlo-sup";
  }
  return "unknown";
}

std::string to_string(Monotone m) {
  switch (m) {
    case Monotone::Increasing: return "increasing";
    case Monotone::Decreasing: return "decreasing";
    case Monotone::None: return "none";
  }
  return "unknown";
}

double weight_at(const DiscreteModel& model, std::size_t state) {
  if (state >= model.size()) {
    throw Error(ErrorCode::PointOutsideSupport,
                "state " + std::to_string(state) + " is not in the model");
  }
  return model.weight()[state];
}

double log_weight_at(const GeneralModel& model, std::span<const double> x) {
  if (!model.support.contains(x)) {
    throw Error(ErrorCode::PointOutsideSupport, "point lies outside the support");
  }
  const double lp = model.proposal_log_density(x);
  if (lp == -kInf) {
    throw Error(ErrorCode::ZeroProposalDensity,
                "proposal density is zero at the point (support containment violated)");
  }
  return model.target_log_density(x) - lp;
}

double weight_at(const GeneralModel& model, std::span<const double> x) {
  return std::exp(log_weight_at(model, x));
}

double weight_at(const GeneralModel& model, double x) {
  const double p[1] = {x};
  return weight_at(model, p);
}

std::pair<double, double> search_window(const GeneralModel& model) {
  if (model.support.kind != Support::Kind::Interval) {
    throw Error(ErrorCode::InvalidModel, "search window needs a 1-D interval support");
  }
  auto [a, b] = model.support.bounds.front();
  auto p = [&model](double x) {
    const double pt[1] = {x};
    return model.proposal_density(pt);
  };
  constexpr double kTail = 1e-10;
  double lo = a, hi = b;
  if (std::isinf(b)) {
    const double start = std::isfinite(a) ? a : 0.0;
    hi = tail_quantile(p, start, true, kTail);
  }
  if (std::isinf(a)) {
    const double start = std::isfinite(b) ? b : 0.0;
    lo = tail_quantile(p, start, false, kTail);
  }
  return {lo, hi};
}

WeightSummary compute_wstar(const GeneralModel& model, const WstarOptions& opt) {
  if (opt.budget != 0 && opt.budget < 100) {
    throw Error(ErrorCode::BudgetExhausted,
                "w* search needs a budget of at least 100 evaluations");
  }
  const auto& h = model.hints;
  if (h.known_wstar || h.known_argmax) {
    WeightSummary out;
    out.method = WstarMethod::AnalyticHint;
    out.argmax = h.known_argmax;
    out.wstar = h.known_wstar ? *h.known_wstar : weight_at(model, *h.known_argmax);
    out.attained = h.wstar_attained.value_or(h.known_argmax.has_value());
    return out;
  }
  if (h.weight_monotone && *h.weight_monotone != Monotone::None &&
      model.support.kind == Support::Kind::Interval) {
    const auto [a, b] = model.support.bounds.front();
    const bool decreasing = *h.weight_monotone == Monotone::Decreasing;
    const double end = decreasing ? a : b;
    if (std::isfinite(end)) {
      WeightSummary out;
      out.method = WstarMethod::AnalyticHint;
      out.argmax = Point{end};
      out.wstar = weight_at(model, end);
      if (out.wstar > opt.unbounded_threshold) throw_unbounded(out.wstar);
      out.attained = h.wstar_attained.value_or(true);
      return out;
    }
  }
  if (model.support.kind == Support::Kind::Product) {
    throw Error(ErrorCode::InvalidModel,
                "w* search on product supports needs a known_wstar hint");
  }
  WeightSummary out = model.support.kind == Support::Kind::Simplex
                          ? wstar_simplex(model, opt)
                          : wstar_interval(model, opt);
  if (h.wstar_attained) out.attained = *h.wstar_attained;
  return out;
}

WeightSummary wstar_discrete(const DiscreteModel& model) {
  WeightSummary out;
  out.method = WstarMethod::AnalyticHint;
  out.wstar = model.weight().front();
  std::size_t best = model.user_index().front();
  for (std::size_t i = 0; i < model.size() && model.weight()[i] == out.wstar; ++i) {
    best = std::min(best, model.user_index()[i]);
  }
  out.argmax = Point{static_cast<double>(best)};
  out.attained = true;
  return out;
}

}  // namespace imh
