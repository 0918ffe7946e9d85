// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include "imh/case_studies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "imh/error.hpp"

namespace imh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

double standard_normal(Rng& rng) {
  const double u1 = rng.uniform_positive();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// Marsaglia-Tsang gamma sampler with unit scale.
double gamma_draw(double shape, Rng& rng) {
  if (shape < 1.0) {
    return gamma_draw(shape + 1.0, rng) * std::pow(rng.uniform_positive(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double z, v;
    do {
      z = standard_normal(rng);
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_positive();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
  }
}

double param_double(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  if (it == p.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidModel, "parameter '" + key + "' is not a number: " + it->second);
  }
}

std::vector<double> param_list(const Params& p, const std::string& key,
                               std::vector<double> fallback) {
  const auto it = p.find(key);
  if (it == p.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Params one{{key, item}};
    out.push_back(param_double(one, key, 0.0));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidModel, "parameter '" + key + "' is empty");
  return out;
}

void check_known(const Params& p, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : p) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; })) {
      throw Error(ErrorCode::InvalidModel, "unknown parameter '" + k + "'");
    }
  }
}

}  // namespace

std::string to_string(Provenance p) {
  return p == Provenance::Published ? "published" : "derived";
}

RawChain three_point_chain() {
  RawChain c;
  c.name = "three_point";
  const double t = 1.0 / 3.0;
  c.matrix = TransitionMatrix::from_rows({{t, t, t}, {t, 2.0 * t, 0.0}, {t, 0.0, 2.0 * t}});
  c.stationary = {t, t, t};
  return c;
}

GeneralModel exponential_exponential(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::ThetaOutOfRange,
                "theta = " + std::to_string(theta) +
                    " outside (0, 1]: for theta > 1 the weight e^{(theta-1)x}/theta is "
                    "unbounded, so the IMH chain is not geometrically ergodic");
  }
  GeneralModel m;
  m.name = "exponential";
  m.support = Support::interval(0.0, kInf);
  m.target_log_density = [](std::span<const double> x) {
    return x[0] >= 0.0 ? -x[0] : -kInf;
  };
  m.proposal_log_density = [theta](std::span<const double> x) {
    return x[0] >= 0.0 ? std::log(theta) - theta * x[0] : -kInf;
  };
  m.proposal_sampler = [theta](Rng& rng) { return Point{rng.exponential(theta)}; };
  m.target_sampler = [](Rng& rng) { return Point{rng.exponential(1.0)}; };
  m.hints.weight_monotone = Monotone::Decreasing;
  m.hints.known_argmax = Point{0.0};
  m.hints.known_wstar = 1.0 / theta;
  m.hints.wstar_attained = true;
  m.validate();
  return m;
}

DirichletCase dirichlet_multinomial(const std::vector<double>& alpha,
                                    const std::vector<long long>& counts) {
  const std::size_t k = alpha.size();
  if (k < 2 || counts.size() != k) {
    throw Error(ErrorCode::InvalidModel, "alpha and counts need the same length K >= 2");
  }
  std::vector<double> a(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(alpha[i] > 0.0) || counts[i] < 0) {
      throw Error(ErrorCode::InvalidModel, "alpha must be positive and counts nonnegative");
    }
    a[i] = alpha[i] + static_cast<double>(counts[i]);
    if (a[i] < 1.0) {
      throw Error(ErrorCode::ModeUndefined,
                  "alpha_i + x_i = " + std::to_string(a[i]) +
                      " < 1: the posterior density is unbounded at the boundary");
    }
    total += a[i];
  }
  const double log_fact = std::lgamma(static_cast<double>(k));  // log (K-1)!
  double log_norm = std::lgamma(total);
  for (double ai : a) log_norm -= std::lgamma(ai);

  DirichletCase out;
  const double excess = total - static_cast<double>(k);
  out.mode.resize(k);
  double log_peak = log_norm;
  for (std::size_t i = 0; i < k; ++i) {
    out.mode[i] = excess > 0.0 ? (a[i] - 1.0) / excess : 1.0 / static_cast<double>(k);
    if (a[i] > 1.0) log_peak += (a[i] - 1.0) * std::log(a[i] - 1.0);
  }
  if (excess > 0.0) log_peak -= excess * std::log(excess);
  out.log_wstar = log_peak - log_fact;
  out.wstar = std::exp(out.log_wstar);

  GeneralModel& m = out.model;
  m.name = "dirichlet_multinomial";
  m.support = Support::simplex(static_cast<int>(k));
  auto inside = [k](std::span<const double> x) {
    if (x.size() != k) return false;
    double s = 0.0;
    for (double v : x) {
      if (!(v >= 0.0)) return false;
      s += v;
    }
    return std::abs(s - 1.0) <= 1e-9;
  };
  m.target_log_density = [a, log_norm, inside](std::span<const double> x) {
    if (!inside(x)) return -kInf;
    double l = log_norm;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != 1.0) l += (a[i] - 1.0) * std::log(x[i]);
    }
    return l;
  };
  m.proposal_log_density = [log_fact, inside](std::span<const double> x) {
    return inside(x) ? log_fact : -kInf;
  };
  m.proposal_sampler = [k](Rng& rng) {
    Point x(k);
    double s = 0.0;
    for (double& v : x) s += (v = rng.exponential());
    for (double& v : x) v /= s;
    return x;
  };
  m.target_sampler = [a](Rng& rng) {
    Point x(a.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (x[i] = gamma_draw(a[i], rng));
    for (double& v : x) v /= s;
    return x;
  };
  m.hints.known_argmax = out.mode;
  m.hints.known_wstar = out.wstar;
  m.hints.wstar_attained = true;
  m.validate();
  return out;
}

double dirichlet_wstar_stirling(double n_trials, const std::vector<double>& p) {
  const double k = static_cast<double>(p.size());
  double log_prod = 0.0;
  for (double v : p) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidModel, "proportions must be positive");
    log_prod += std::log(v);
  }
  const double log_w = -std::lgamma(k) +
                       0.5 * ((k - 1.0) * std::log(n_trials) -
                              (k - 1.0) * std::log(2.0 * kPi) - log_prod);
  return std::exp(log_w);
}

GeneralModel rate_not_attained_model() {
  GeneralModel m;
  m.name = "rate_not_attained";
  m.support = Support::interval(0.0, kInf);
  m.target_log_density = [](std::span<const double> x) {
    return x[0] >= 0.0 ? -x[0] : -kInf;
  };
  m.proposal_log_density = [](std::span<const double> x) {
    return x[0] >= 0.0 ? std::log(2.0 / 3.0) - x[0] + std::log1p(std::exp(-x[0])) : -kInf;
  };
  m.proposal_sampler = [](Rng& rng) {
    const bool slow = rng.uniform() < 2.0 / 3.0;
    return Point{rng.exponential(slow ? 1.0 : 2.0)};
  };
  m.target_sampler = [](Rng& rng) { return Point{rng.exponential(1.0)}; };
  m.hints.weight_monotone = Monotone::Increasing;
  m.hints.known_wstar = 1.5;
  m.hints.wstar_attained = false;
  m.validate();
  return m;
}

MhFixture cauchy_rwmh() {
  MhFixture fx;
  fx.name = "cauchy_rwmh";
  fx.half_width = 1.0;
  fx.support = Support::interval(-kInf, kInf);
  fx.log_target = [](double x) { return -std::log(kPi * (1.0 + x * x)); };
  fx.proposal.sample = [](double x, Rng& rng) { return rng.uniform(x - 1.0, x + 1.0); };
  fx.proposal.log_density = [](double from, double to) {
    return std::abs(to - from) <= 1.0 ? -std::log(2.0) : -kInf;
  };
  return fx;
}

MhFixture uniform_rwmh(double delta) {
  if (!(delta >= 1.0 && delta < 2.0)) {
    throw Error(ErrorCode::DeltaOutOfRange,
                "delta = " + std::to_string(delta) + " outside [1, 2)");
  }
  MhFixture fx;
  fx.name = "uniform_rwmh";
  fx.half_width = delta;
  fx.support = Support::interval(-1.0, 1.0);
  fx.log_target = [](double x) { return std::abs(x) <= 1.0 ? -std::log(2.0) : -kInf; };
  fx.proposal.sample = [delta](double x, Rng& rng) { return rng.uniform(x - delta, x + delta); };
  fx.proposal.log_density = [delta](double from, double to) {
    return std::abs(to - from) <= delta ? -std::log(2.0 * delta) : -kInf;
  };
  fx.rejection = [delta](double y) {
    const double ay = std::abs(y);
    return ay > delta - 1.0 ? (delta - 1.0 + ay) / (2.0 * delta) : (delta - 1.0) / delta;
  };
  return fx;
}

double mh_rejection_quadrature(const MhFixture& fx, double x, const QuadratureConfig& cfg) {
  const double lx = fx.log_target(x);
  if (lx == -kInf) throw Error(ErrorCode::ZeroDensityAtStart, "target is zero at x");
  auto accept = [&](double y) {
    const double ly = fx.log_target(y);
    if (ly == -kInf) return 0.0;
    const double qxy = fx.proposal.log_density(x, y);
    if (qxy == -kInf) return 0.0;
    const double log_a = ly + fx.proposal.log_density(y, x) - lx - qxy;
    return std::exp(qxy) * std::min(1.0, std::exp(log_a));
  };
  std::vector<double> bp{x, -x};
  for (const auto& [a, b] : fx.support.bounds) {
    if (std::isfinite(a)) bp.push_back(a);
    if (std::isfinite(b)) bp.push_back(b);
  }
  return 1.0 - integrate_or_throw(accept, x - fx.half_width, x + fx.half_width, cfg, bp);
}

Estimate empirical_rejection_rate(const MhFixture& fx, double x, int count, std::uint64_t seed) {
  if (count < 2) throw Error(ErrorCode::InvalidModel, "need at least 2 proposals");
  const double lx = fx.log_target(x);
  if (lx == -kInf) throw Error(ErrorCode::ZeroDensityAtStart, "target is zero at x");
  Rng rng(seed);
  int rejected = 0;
  for (int i = 0; i < count; ++i) {
    const double y = fx.proposal.sample(x, rng);
    const double ly = fx.log_target(y);
    bool accept = false;
    if (ly != -kInf) {
      const double log_a =
          ly + fx.proposal.log_density(y, x) - lx - fx.proposal.log_density(x, y);
      accept = log_a >= 0.0 || rng.uniform() < std::exp(log_a);
    }
    rejected += !accept;
  }
  const double r = static_cast<double>(rejected) / count;
  return {r, std::sqrt(r * (1.0 - r) / count)};
}

double cauchy_tail_mass(double t, const QuadratureConfig& cfg) {
  auto density = [](double x) { return 1.0 / (kPi * (1.0 + x * x)); };
  return 2.0 * integrate_or_throw(density, std::abs(t), kInf, cfg);
}

double cauchy_tv_lower_bound(double x0, int n) {
  return 1.0 / (2.0 * kPi * (std::abs(x0) + n));
}

SharpnessPair sharpness_chains(int k) {
  if (k < 2) throw Error(ErrorCode::InvalidModel, "sharpness chains need K >= 2");
  const auto kk = static_cast<std::size_t>(k);
  std::vector<double> pi1(2 * kk, 0.0), p1(2 * kk, 1.0 / (2.0 * k));
  std::fill(pi1.begin(), pi1.begin() + k, 1.0 / k);
  std::vector<double> pi2(kk + 1, 1.0 / (2.0 * k)), p2(kk + 1, 3.0 / (4.0 * k));
  pi2[0] = 0.5;
  p2[0] = 0.25;
  return {DiscreteModel(pi1, p1), DiscreteModel(pi2, p2)};
}

DiscreteModel random_discrete_model(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidModel, "need at least one state");
  Rng rng(seed);
  auto draw = [&] {
    std::vector<double> v(n);
    double s = 0.0;
    for (double& x : v) s += (x = rng.exponential());
    for (double& x : v) x /= s;
    return v;
  };
  std::vector<double> pi = draw();
  std::vector<double> p = draw();
  return DiscreteModel(pi, p);
}

const std::vector<std::string>& registry_names() {
  static const std::vector<std::string> names{
      "exponential",  "dirichlet_multinomial", "rate_not_attained", "cauchy_rwmh",
      "uniform_rwmh", "sharpness_phi1",        "sharpness_phi2",    "three_point"};
  return names;
}

RegistryEntry make_registry_entry(const std::string& name, const Params& params) {
  RegistryEntry e{name, RawChain{}, {}};
  if (name == "exponential") {
    check_known(params, {"theta"});
    const double theta = param_double(params, "theta", 0.5);
    e.model = exponential_exponential(theta);
    e.truths = {
        {"wstar", 1.0 / theta, Provenance::Published, ""},
        {"rate", 1.0 - theta, Provenance::Published, ""},
        {"argmax", 0.0, Provenance::Published, ""},
    };
  } else if (name == "dirichlet_multinomial") {
    check_known(params, {"alpha", "counts"});
    const auto alpha = param_list(params, "alpha", {1.0, 1.0});
    const auto raw = param_list(params, "counts", {1.0, 1.0});
    std::vector<long long> counts;
    for (double c : raw) {
      if (c != std::floor(c)) throw Error(ErrorCode::InvalidModel, "counts must be integers");
      counts.push_back(static_cast<long long>(c));
    }
    DirichletCase dc = dirichlet_multinomial(alpha, counts);
    e.truths = {{"wstar", dc.wstar, Provenance::Derived,
                 "posterior density at its mode divided by (K-1)!, in log-gamma form"}};
    e.model = std::move(dc.model);
  } else if (name == "rate_not_attained") {
    check_known(params, {});
    e.model = rate_not_attained_model();
    e.truths = {
        {"wstar", 1.5, Provenance::Derived, "limit of 1.5/(1+e^-x) as x grows"},
        {"rate", 1.0 / 3.0, Provenance::Derived, "1 - 1/1.5"},
        {"w_at_0", 0.75, Provenance::Derived, "1.5/(1+1)"},
    };
  } else if (name == "cauchy_rwmh") {
    check_known(params, {});
    e.model = cauchy_rwmh();
    e.truths = {{"rejection_at_0", 1.0 - kPi / 4.0, Provenance::Derived,
                 "1 - (1/2) * integral over [-1,1] of ds/(1+s^2)"}};
  } else if (name == "uniform_rwmh") {
    check_known(params, {"delta"});
    const double delta = param_double(params, "delta", 1.5);
    MhFixture fx = uniform_rwmh(delta);
    e.truths = {
        {"rejection_at_1", fx.rejection(1.0), Provenance::Published, ""},
        {"inside_rate_bound", 1.0 - 1.0 / delta, Provenance::Published, ""},
    };
    e.model = std::move(fx);
  } else if (name == "sharpness_phi1" || name == "sharpness_phi2") {
    check_known(params, {"K"});
    const double k = param_double(params, "K", 2.0);
    if (k != std::floor(k)) throw Error(ErrorCode::InvalidModel, "K must be an integer");
    SharpnessPair sp = sharpness_chains(static_cast<int>(k));
    const bool first = name == "sharpness_phi1";
    e.model = first ? sp.phi1 : sp.phi2;
    e.truths = {
        {"wstar", 2.0, Provenance::Derived, "elementwise ratio pi/p"},
        {"dmax_factor", first ? 1.0 : 0.5, Provenance::Published, ""},
    };
  } else if (name == "three_point") {
    check_known(params, {});
    e.model = three_point_chain();
    e.truths = {
        {"tv_x2_factor", 0.5, Provenance::Published, ""},  // TV from x2 = factor * rate^n
        {"tv_x2_rate", 2.0 / 3.0, Provenance::Published, ""},
        {"tv_x1_after_one_step", 0.0, Provenance::Published, ""},
    };
  } else {
    std::string known;
    for (const auto& n : registry_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::InvalidModel, "unknown registry model '" + name + "' (known: " + known + ")");
  }
  return e;
}

}  // namespace imh
