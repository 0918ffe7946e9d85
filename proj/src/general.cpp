// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include "imh/general.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "imh/error.hpp"

namespace imh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kScanNodes = 10001;

QuadratureConfig mass_config(const QuadratureConfig& cfg) {
  QuadratureConfig c = cfg;
  c.abs_tol = 1e-300;
  c.rel_tol = std::min(cfg.rel_tol, 1e-11);
  c.max_subdivisions = std::max(cfg.max_subdivisions, 4000);
  return c;
}

// Fritsch-Carlson slopes for a monotone cubic through (x_i, y_i) on a
// uniform grid of spacing h.
std::vector<double> monotone_slopes(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> m(n, 0.0), d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / h;
  m[0] = d[0];
  m[n - 1] = d[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] <= 0.0) {
      m[i] = 0.0;
    } else {
      m[i] = 2.0 / (1.0 / d[i - 1] + 1.0 / d[i]);  // harmonic mean
    }
  }
  return m;
}

double hermite(double y0, double y1, double m0, double m1, double h, double t) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

double require_1d_weight(const GeneralModel& model, double x) {
  const double p[1] = {x};
  return log_weight_at(model, p);
}

}  // namespace

// ---------------------------------------------------------------- LevelSets

LevelSets::LevelSets(const GeneralModel& model) : model_(model) {
  if (model.support.kind != Support::Kind::Interval) {
    throw Error(ErrorCode::InvalidModel,
                "sub-level-set quadrature needs a 1-D interval support; "
                "use the Monte Carlo routines for '" + model.name + "'");
  }
  std::tie(a_, b_) = model.support.bounds.front();
  monotone_ = model.hints.weight_monotone.value_or(Monotone::None);
  const auto [lo, hi] = search_window(model);
  if (monotone_ == Monotone::None) {
    grid_.resize(kScanNodes);
    grid_lw_.resize(kScanNodes);
    double floor_lw = kInf;
    for (int i = 0; i < kScanNodes; ++i) {
      grid_[i] = i + 1 == kScanNodes ? hi : lo + (hi - lo) * i / (kScanNodes - 1);
      grid_lw_[i] = log_weight(grid_[i]);
      floor_lw = std::min(floor_lw, grid_lw_[i]);
    }
    w_floor_ = std::exp(floor_lw);
  } else {
    w_floor_ = std::min(std::exp(log_weight(lo)), std::exp(log_weight(hi)));
  }
}

double LevelSets::log_weight(double y) const {
  const double pt[1] = {y};
  const double lt = model_.target_log_density(pt);
  if (lt == -kInf || std::isnan(lt)) return -kInf;
  const double lp = model_.proposal_log_density(pt);
  if (lp == -kInf) {
    throw Error(ErrorCode::ZeroProposalDensity,
                "proposal density vanishes at " + std::to_string(y) +
                    " where the target is positive");
  }
  return lt - lp;
}

double LevelSets::bisect(double lo, double hi, double log_v) const {
  const bool lo_in = log_weight(lo) <= log_v;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > std::min(lo, hi) && mid < std::max(lo, hi)) ||
        std::abs(hi - lo) <= 1e-12 * std::max(1.0, std::abs(mid))) {
      break;
    }
    if ((log_weight(mid) <= log_v) == lo_in) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

IntervalList LevelSets::sublevel(double v) const {
  const double log_v = std::log(v);
  auto inside = [&](double y) { return log_weight(y) <= log_v; };

  if (monotone_ != Monotone::None) {
    // Orient so that w decreases from `first` towards `last`.
    const bool dec = monotone_ == Monotone::Decreasing;
    const double first = dec ? a_ : b_;
    const double last = dec ? b_ : a_;
    const double dir = dec ? 1.0 : -1.0;
    const auto [lo, hi] = std::pair{a_, b_};
    auto interval_from = [&](double x) {
      return dec ? IntervalList{{x, hi}} : IntervalList{{lo, x}};
    };

    double out_pt;  // a point outside C(v), near `first`
    if (std::isfinite(first)) {
      if (inside(first)) return {{a_, b_}};
      out_pt = first;
    } else {
      double step = 1.0;
      out_pt = std::isfinite(last) ? last - dir * step : 0.0;
      while (inside(out_pt)) {
        step *= 2.0;
        out_pt = (std::isfinite(last) ? last : 0.0) - dir * step;
        if (step > 1e300) return {{a_, b_}};
      }
    }
    double in_pt;  // a point inside C(v), towards `last`
    if (std::isfinite(last)) {
      if (!inside(last)) return {};
      in_pt = last;
    } else {
      double step = 1.0;
      in_pt = out_pt + dir * step;
      while (!inside(in_pt)) {
        step *= 2.0;
        in_pt = out_pt + dir * step;
        if (step > 1e300) return {};
      }
    }
    return interval_from(bisect(out_pt, in_pt, log_v));
  }

  IntervalList out;
  const int n = static_cast<int>(grid_.size());
  bool open = grid_lw_[0] <= log_v;
  double start = a_;
  for (int i = 0; i + 1 < n; ++i) {
    const bool next_in = grid_lw_[i + 1] <= log_v;
    if (next_in == open) continue;
    const double x = bisect(grid_[i], grid_[i + 1], log_v);
    if (open) {
      out.emplace_back(start, x);
    } else {
      start = x;
    }
    open = next_in;
  }
  if (open) out.emplace_back(start, b_);
  return out;
}

std::vector<double> LevelSets::crossings(double v) const {
  std::vector<double> out;
  for (const auto& [l, r] : sublevel(v)) {
    if (l != a_) out.push_back(l);
    if (r != b_) out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

LevelSets::Masses LevelSets::masses(double v, const QuadratureConfig& cfg) const {
  const QuadratureConfig c = mass_config(cfg);
  const double log_v = std::log(v);
  auto pi = [&](double y) {
    const double pt[1] = {y};
    return model_.target_density(pt);
  };
  auto gap = [&](double y) {
    // p(y) (1 - w(y)/v), clipped at 0 for points just outside C(v).
    const double pt[1] = {y};
    const double lp = model_.proposal_log_density(pt);
    if (lp == -kInf) return 0.0;
    const double lw = log_weight(y);
    return std::exp(lp) * std::max(0.0, -std::expm1(lw - log_v));
  };
  Masses m{0.0, 0.0, 0.0};
  for (const auto& [l, r] : sublevel(v)) {
    m.pi_tilde += integrate_or_throw(pi, l, r, c);
    m.lambda += integrate_or_throw(gap, l, r, c);
  }
  m.pi_tilde = std::min(m.pi_tilde, 1.0);
  m.p_tilde = std::min(1.0, m.lambda + m.pi_tilde / v);
  return m;
}

// ------------------------------------------------------------ WeightCdfPair

WeightCdfPair::WeightCdfPair(const GeneralModel& model, const WeightSummary& summary,
                             const QuadratureConfig& cfg, int nodes)
    : levels_(std::make_shared<LevelSets>(model)), cfg_(cfg) {
  cfg.validate();
  if (nodes < 3) throw Error(ErrorCode::InvalidModel, "lambda grid needs at least 3 nodes");
  wstar_ = summary.wstar;
  lambda_star_ = 1.0 - 1.0 / wstar_;
  w_lo_ = std::max(levels_->weight_floor(), 1e-12 * wstar_);
  if (!(w_lo_ < wstar_ * (1.0 - 1e-9))) w_lo_ = 0.5 * wstar_;

  s0_ = std::log(w_lo_);
  h_ = (std::log(wstar_) - s0_) / (nodes - 1);
  node_w_.resize(nodes);
  node_pi_.resize(nodes);
  node_p_.resize(nodes);
  node_lambda_.resize(nodes);
  node_slope_.resize(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double v = i + 1 == nodes ? wstar_ : std::exp(s0_ + i * h_);
    node_w_[i] = v;
    if (i + 1 == nodes) {
      node_pi_[i] = 1.0;
      node_p_[i] = 1.0;
      node_lambda_[i] = lambda_star_;
    } else {
      const auto m = levels_->masses(v, cfg_);
      node_pi_[i] = m.pi_tilde;
      node_p_[i] = m.p_tilde;
      node_lambda_[i] = std::min(m.lambda, lambda_star_);
    }
    node_slope_[i] = node_pi_[i] / v;
  }
  node_pi_slope_ = monotone_slopes(node_pi_, h_);
}

std::size_t WeightCdfPair::cell_of(double s) const {
  const double pos = (s - s0_) / h_;
  const auto last = node_w_.size() - 2;
  if (!(pos > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(pos), last);
}

double WeightCdfPair::lambda(double w) const {
  if (w >= wstar_) return 1.0 - 1.0 / w;
  if (w <= w_lo_) return node_lambda_.front();
  const double s = std::log(w);
  const std::size_t i = cell_of(s);
  const double t = (s - (s0_ + i * h_)) / h_;
  const double v = hermite(node_lambda_[i], node_lambda_[i + 1], node_slope_[i],
                           node_slope_[i + 1], h_, t);
  return std::clamp(v, 0.0, lambda_star_);
}

double WeightCdfPair::pi_tilde(double w) const {
  if (w >= wstar_) return 1.0;
  if (w <= w_lo_) return node_pi_.front();
  const double s = std::log(w);
  const std::size_t i = cell_of(s);
  const double t = (s - (s0_ + i * h_)) / h_;
  return std::clamp(hermite(node_pi_[i], node_pi_[i + 1], node_pi_slope_[i],
                            node_pi_slope_[i + 1], h_, t),
                    0.0, 1.0);
}

double WeightCdfPair::p_tilde(double w) const {
  if (w >= wstar_) return 1.0;
  const double v = std::max(w, w_lo_);
  return std::min(1.0, lambda(v) + pi_tilde(v) / v);
}

double WeightCdfPair::head_integrand(int n, double s) const {
  const double v = std::exp(s);
  const double lam = lambda(v);
  return n * std::pow(lam, n - 1) / v;  // n lambda^(n-1) / v^2 * dv/ds
}

const std::vector<double>& WeightCdfPair::head_table(int n) const {
  std::lock_guard<std::mutex> lock(table_mutex_);
  auto it = tables_.find(n);
  if (it != tables_.end()) return it->second;
  const std::size_t m = node_w_.size();
  std::vector<double> cum(m, 0.0);
  auto f = [this, n](double s) { return head_integrand(n, s); };
  for (std::size_t i = m - 1; i-- > 0;) {
    const double a = s0_ + i * h_;
    const double b = i + 2 == m ? std::log(wstar_) : s0_ + (i + 1) * h_;
    cum[i] = cum[i + 1] + kronrod21(f, a, b);
  }
  return tables_.emplace(n, std::move(cum)).first->second;
}

double WeightCdfPair::t_n_minus_one(int n, double w) const {
  if (n < 1) throw Error(ErrorCode::InvalidModel, "T_n needs n >= 1");
  if (!(w > 0.0)) throw Error(ErrorCode::InvalidModel, "T_n needs w > 0");
  if (w >= wstar_) return -std::pow(1.0 - 1.0 / w, n);
  const auto& cum = head_table(n);
  const double s = std::log(std::max(w, w_lo_));
  const std::size_t i = cell_of(s);
  const double s_next = i + 2 == node_w_.size() ? std::log(wstar_) : s0_ + (i + 1) * h_;
  double head = cum[i + 1];
  if (s < s_next) {
    head += kronrod21([this, n](double u) { return head_integrand(n, u); }, s, s_next);
  }
  return head - std::pow(lambda_star_, n);
}

WeightCdfPair make_weight_cdf_pair(const GeneralModel& model, const QuadratureConfig& cfg) {
  return WeightCdfPair(model, compute_wstar(model), cfg);
}

double lambda_fn(const WeightCdfPair& pair, double w) {
  if (!(w > 0.0)) throw Error(ErrorCode::InvalidModel, "lambda needs w > 0");
  return pair.lambda(w);
}

double t_n(const WeightCdfPair& pair, int n, double w) {
  return 1.0 + pair.t_n_minus_one(n, w);
}

double t_n_direct(const WeightCdfPair& pair, int n, double w, const QuadratureConfig& cfg,
                  bool direct_lambda) {
  if (n < 1 || !(w > 0.0)) throw Error(ErrorCode::InvalidModel, "T_n needs n >= 1 and w > 0");
  const double ws = pair.wstar();
  auto f = [&](double v) {
    double lam;
    if (v >= ws) {
      lam = 1.0 - 1.0 / v;
    } else {
      lam = direct_lambda ? pair.direct(v).lambda : pair.lambda(v);
    }
    return n * std::pow(lam, n - 1) / (v * v);
  };
  const double bp[1] = {ws};
  return integrate_or_throw(f, w, kInf, cfg, bp);
}

double rejection_probability(const GeneralModel& model, double x, const QuadratureConfig& cfg) {
  const double lw = require_1d_weight(model, x);
  if (lw == -kInf) {
    throw Error(ErrorCode::InvalidModel, "rejection probability needs w(x) > 0");
  }
  const LevelSets levels(model);
  return levels.masses(std::exp(lw), cfg).lambda;
}

McWeightCdf weight_cdf_mc(const GeneralModel& model, double w, int draws, std::uint64_t seed) {
  if (draws < 2) throw Error(ErrorCode::InvalidModel, "need at least 2 draws");
  Rng rng(seed);
  double s_ind = 0, s_ind2 = 0, s_pi = 0, s_pi2 = 0, s_lam = 0, s_lam2 = 0;
  for (int i = 0; i < draws; ++i) {
    const Point y = model.proposal_sampler(rng);
    const double lt = model.target_log_density(y);
    const double lp = model.proposal_log_density(y);
    const double wy = lt == -kInf ? 0.0 : std::exp(lt - lp);
    if (wy <= w) {
      const double lam = 1.0 - wy / w;
      s_ind += 1.0;
      s_ind2 += 1.0;
      s_pi += wy;
      s_pi2 += wy * wy;
      s_lam += lam;
      s_lam2 += lam * lam;
    }
  }
  auto est = [draws](double s, double s2) {
    const double n = draws;
    const double mean = s / n;
    const double var = std::max(0.0, (s2 / n - mean * mean) * n / (n - 1));
    return Estimate{mean, std::sqrt(var / n)};
  };
  return {est(s_pi, s_pi2), est(s_ind, s_ind2), est(s_lam, s_lam2)};
}

Estimate rejection_probability_mc(const GeneralModel& model, const Point& x, int draws,
                                  std::uint64_t seed) {
  const double w = weight_at(model, x);
  if (!(w > 0.0)) throw Error(ErrorCode::InvalidModel, "rejection probability needs w(x) > 0");
  return weight_cdf_mc(model, w, draws, seed).lambda;
}

// ------------------------------------------------------------ n-step kernel

namespace {

struct PointContext {
  double wx;
  std::vector<double> breakpoints;
  QuadratureConfig cfg;
};

PointContext point_context(const WeightCdfPair& pair, int n, double x,
                           const QuadratureConfig& cfg, bool with_sign_change) {
  if (n < 1) throw Error(ErrorCode::InvalidModel, "n must be at least 1");
  const double lw = require_1d_weight(pair.model(), x);
  PointContext ctx;
  ctx.wx = std::exp(lw);
  ctx.breakpoints.push_back(x);
  if (ctx.wx > 0.0 && ctx.wx < pair.wstar()) {
    for (double c : pair.levels().crossings(ctx.wx)) ctx.breakpoints.push_back(c);
  }
  if (with_sign_change) {
    // T_n - 1 is decreasing in w; locate its zero so the positive part has
    // a breakpoint at the kink.
    double lo = pair.w_lo(), hi = pair.wstar();
    if (pair.t_n_minus_one(n, lo) > 0.0) {
      for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);
        (pair.t_n_minus_one(n, mid) > 0.0 ? lo : hi) = mid;
      }
      const double v0 = 0.5 * (lo + hi);
      if (v0 > ctx.wx) {
        for (double c : pair.levels().crossings(v0)) ctx.breakpoints.push_back(c);
      }
    }
  }
  ctx.cfg = cfg;
  const double scale = std::pow(std::max(1.0 - 1.0 / pair.wstar(), 0.0), n);
  ctx.cfg.abs_tol = cfg.abs_tol * std::max(scale, 1e-280);
  return ctx;
}

}  // namespace

double n_step_kernel(const WeightCdfPair& pair, int n, double x, double a, double b,
                     const QuadratureConfig& cfg) {
  const auto& model = pair.model();
  const auto [sa, sb] = model.support.bounds.front();
  if (!(a <= b)) throw Error(ErrorCode::InvalidModel, "interval endpoints must satisfy a <= b");
  a = std::max(a, sa);
  b = std::min(b, sb);
  if (!(a < b)) return 0.0;
  const PointContext ctx = point_context(pair, n, x, cfg, false);
  const LevelSets& lv = pair.levels();

  auto pi = [&](double y) {
    const double pt[1] = {y};
    return model.target_density(pt);
  };
  auto dev = [&](double y) {
    const double p = pi(y);
    if (p == 0.0) return 0.0;
    const double v = std::max(ctx.wx, std::exp(lv.log_weight(y)));
    return pair.t_n_minus_one(n, v) * p;
  };
  const double mass = integrate_or_throw(pi, a, b, cfg, ctx.breakpoints);
  const double correction = integrate_or_throw(dev, a, b, ctx.cfg, ctx.breakpoints);
  const double atom = (x >= a && x <= b) ? std::pow(pair.lambda(ctx.wx), n) : 0.0;
  return mass + correction + atom;
}

double tv_at_point_general(const WeightCdfPair& pair, int n, double x,
                           const QuadratureConfig& cfg) {
  const auto& model = pair.model();
  const auto [a, b] = model.support.bounds.front();
  const PointContext ctx = point_context(pair, n, x, cfg, true);
  const LevelSets& lv = pair.levels();
  auto f = [&](double y) {
    const double pt[1] = {y};
    const double p = model.target_density(pt);
    if (p == 0.0) return 0.0;
    const double v = std::max(ctx.wx, std::exp(lv.log_weight(y)));
    return std::max(0.0, -pair.t_n_minus_one(n, v)) * p;
  };
  return integrate_or_throw(f, a, b, ctx.cfg, ctx.breakpoints);
}

double tv_at_point_general_split(const WeightCdfPair& pair, int n, double x,
                                 const QuadratureConfig& cfg) {
  const auto& model = pair.model();
  const auto [a, b] = model.support.bounds.front();
  const PointContext ctx = point_context(pair, n, x, cfg, true);
  const LevelSets& lv = pair.levels();
  auto f = [&](double y) {
    const double pt[1] = {y};
    const double p = model.target_density(pt);
    if (p == 0.0) return 0.0;
    const double v = std::max(ctx.wx, std::exp(lv.log_weight(y)));
    return std::abs(pair.t_n_minus_one(n, v)) * p;
  };
  const double atom = std::pow(pair.lambda(ctx.wx), n);
  return 0.5 * (atom + integrate_or_throw(f, a, b, ctx.cfg, ctx.breakpoints));
}

// -------------------------------------------------------------- rate report

std::string to_string(SpeedKind k) {
  switch (k) {
    case SpeedKind::ExactEquality: return "exact-equality";
    case SpeedKind::RateOnly: return "rate-only";
    case SpeedKind::NotGeometric: return "not-geometric";
    case SpeedKind::DiscreteSandwich: return "discrete-sandwich";
  }
  return "unknown";
}

StepsToEps RateReport::steps_to_eps(double eps) const {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw Error(ErrorCode::InvalidModel, "epsilon must lie in (0, 1)");
  }
  StepsToEps s;
  s.epsilon = eps;
  if (!exact_rate) {
    s.steps = kInf;
    s.steps_ceil = 0;
    return s;
  }
  const double r = *exact_rate;
  if (r == 0.0) {
    s.steps = 0.0;
    s.steps_ceil = 1;
    return s;
  }
  s.steps = std::log(eps) / std::log(r);
  s.steps_ceil = std::max(1LL, static_cast<long long>(std::ceil(s.steps - 1e-9)));
  return s;
}

double RateReport::upper(int n) const {
  if (!exact_rate) return 1.0;
  return std::pow(*exact_rate, n);
}

double RateReport::lower(int n) const {
  switch (speed_kind) {
    case SpeedKind::ExactEquality: return upper(n);
    case SpeedKind::RateOnly: return std::pow(std::max(0.0, *exact_rate - rate_slack), n);
    case SpeedKind::DiscreteSandwich: return (1.0 - pi1) * upper(n);
    case SpeedKind::NotGeometric: return 0.0;
  }
  return 0.0;
}

RateReport rate_report(const GeneralModel& model, const RateReportOptions& opt) {
  RateReport rep;
  rep.model_name = model.name;
  rep.rate_slack = opt.rate_slack;
  WeightSummary ws;
  try {
    ws = compute_wstar(model, opt.wstar);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnboundedWeight) throw;
    rep.speed_kind = SpeedKind::NotGeometric;
    rep.wstar = kInf;
    rep.attained = false;
    rep.method = WstarMethod::GridRefine;
    rep.note = e.what();
    for (double eps : opt.epsilons) rep.steps.push_back(rep.steps_to_eps(eps));
    return rep;
  }
  rep.wstar = ws.wstar;
  rep.attained = ws.attained;
  rep.boundary_warning = ws.boundary_warning;
  rep.method = ws.method;
  rep.argmax = ws.argmax;
  rep.exact_rate = std::max(0.0, 1.0 - 1.0 / ws.wstar);
  rep.speed_kind = ws.attained ? SpeedKind::ExactEquality : SpeedKind::RateOnly;
  if (rep.speed_kind == SpeedKind::RateOnly) {
    rep.note = "supremum of w not attained: rate is exact, d(n) lies between the envelopes";
  }
  if (ws.boundary_warning) {
    rep.note += std::string(rep.note.empty() ? "" : "; ") +
                "maximum found on a truncation boundary of the search window";
  }
  for (double eps : opt.epsilons) rep.steps.push_back(rep.steps_to_eps(eps));
  return rep;
}

RateReport rate_report(const DiscreteModel& model, const RateReportOptions& opt) {
  RateReport rep;
  rep.model_name = "discrete";
  const WeightSummary ws = wstar_discrete(model);
  rep.wstar = ws.wstar;
  rep.argmax = ws.argmax;
  rep.attained = true;
  rep.method = ws.method;
  rep.exact_rate = std::max(0.0, 1.0 - 1.0 / ws.wstar);
  rep.speed_kind = SpeedKind::DiscreteSandwich;
  rep.pi1 = model.target().front();
  rep.rate_slack = opt.rate_slack;
  if (model.has_zero_weight()) {
    rep.note = "model has zero-weight states: closed-form spectrum unavailable, "
               "rates come from exact TV fits";
  }
  for (double eps : opt.epsilons) rep.steps.push_back(rep.steps_to_eps(eps));
  return rep;
}

PerPointGeneral per_point_rate_general(const WeightCdfPair& pair, double x, int n_max,
                                       const QuadratureConfig& cfg) {
  if (n_max < 3) throw Error(ErrorCode::InvalidModel, "n_max must be at least 3");
  PerPointGeneral out;
  out.row.x = x;
  const double wx = std::exp(require_1d_weight(pair.model(), x));
  out.row.rejection = wx > 0.0 ? pair.direct(wx).lambda : 0.0;
  out.row.upper = 1.0 - 1.0 / pair.wstar();
  std::vector<double> log_tv(n_max);
  out.tv.resize(n_max);
  for (int n = 1; n <= n_max; ++n) {
    out.tv[n - 1] = tv_at_point_general(pair, n, x, cfg);
    log_tv[n - 1] = out.tv[n - 1] > 0.0 ? std::log(out.tv[n - 1]) : -kInf;
  }
  out.fit = fit_tail_rate(log_tv, 1);
  out.row.fitted_rate = out.fit.rate;
  return out;
}

}  // namespace imh
