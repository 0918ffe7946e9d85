// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include "imh/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "imh/error.hpp"

namespace imh {
namespace {

// QUADPACK qk21 abscissae and weights. Odd indices of kXgk are the 10-point
// Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208645330324, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct RuleResult {
  double value;
  double error;
  bool finite;
};

RuleResult apply_gk21(const Integrand& g, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double f_center = g(center);

  double result_gauss = 0.0;
  double result_kronrod = f_center * kWgk[10];
  double result_abs = std::abs(result_kronrod);
  std::array<double, 10> f1{}, f2{};
  bool finite = std::isfinite(f_center);

  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double a = g(center - dx);
    const double b = g(center + dx);
    finite = finite && std::isfinite(a) && std::isfinite(b);
    f1[j] = a;
    f2[j] = b;
    result_kronrod += kWgk[j] * (a + b);
    result_abs += kWgk[j] * (std::abs(a) + std::abs(b));
    if (j % 2 == 1) result_gauss += kWg[j / 2] * (a + b);
  }

  const double mean = 0.5 * result_kronrod;
  double result_asc = kWgk[10] * std::abs(f_center - mean);
  for (int j = 0; j < 10; ++j) {
    result_asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }

  const double value = result_kronrod * half;
  result_abs *= std::abs(half);
  result_asc *= std::abs(half);
  double err = std::abs((result_kronrod - result_gauss) * half);
  if (result_asc != 0.0 && err != 0.0) {
    err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  if (result_abs > tiny / (50.0 * eps)) {
    err = std::max(50.0 * eps * result_abs, err);
  }
  return {value, err, finite};
}

struct Segment {
  Integrand g;
  double lo;
  double hi;
};

void push_segments(const Integrand& f, double l, double r,
                   std::vector<Segment>& out) {
  const bool l_inf = std::isinf(l);
  const bool r_inf = std::isinf(r);
  if (!l_inf && !r_inf) {
    out.push_back({f, l, r});
  } else if (!l_inf && r_inf) {
    out.push_back({[f, l](double t) {
                     const double s = 1.0 - t;
                     return f(l + t / s) / (s * s);
                   },
                   0.0, 1.0});
  } else if (l_inf && !r_inf) {
    out.push_back({[f, r](double t) {
                     const double s = 1.0 - t;
                     return f(r - t / s) / (s * s);
                   },
                   0.0, 1.0});
  } else {
    push_segments(f, l, 0.0, out);
    push_segments(f, 0.0, r, out);
  }
}

struct Piece {
  int segment;
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

}  // namespace

void QuadratureConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw Error(ErrorCode::InvalidModel, "quadrature tolerances must be positive");
  }
  if (max_subdivisions < 10) {
    throw Error(ErrorCode::InvalidModel, "max_subdivisions must be at least 10");
  }
}

double kronrod21(const Integrand& f, double a, double b) {
  return apply_gk21(f, a, b).value;
}

QuadResult integrate(const Integrand& f, double a, double b,
                     const QuadratureConfig& cfg,
                     std::span<const double> breakpoints) {
  QuadResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  if (a > b) {
    std::vector<double> bp(breakpoints.begin(), breakpoints.end());
    out = integrate(f, b, a, cfg, bp);
    out.value = -out.value;
    return out;
  }

  std::vector<double> cuts{a};
  {
    std::vector<double> inner;
    for (double p : breakpoints) {
      if (p > a && p < b && std::isfinite(p)) inner.push_back(p);
    }
    std::sort(inner.begin(), inner.end());
    inner.erase(std::unique(inner.begin(), inner.end()), inner.end());
    cuts.insert(cuts.end(), inner.begin(), inner.end());
  }
  cuts.push_back(b);

  std::vector<Segment> segments;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    push_segments(f, cuts[i], cuts[i + 1], segments);
  }

  std::priority_queue<Piece> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto r = apply_gk21(segments[s].g, segments[s].lo, segments[s].hi);
    out.evaluations += 21;
    if (!r.finite) {
      out.value = std::numeric_limits<double>::quiet_NaN();
      out.abs_error = std::numeric_limits<double>::infinity();
      return out;
    }
    heap.push({static_cast<int>(s), segments[s].lo, segments[s].hi, r.value,
               r.error});
    total += r.value;
    total_err += r.error;
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  std::vector<Piece> frozen;
  auto tolerance = [&] { return std::max(cfg.abs_tol, cfg.rel_tol * std::abs(total)); };

  while (total_err > tolerance() && out.subdivisions < cfg.max_subdivisions &&
         !heap.empty()) {
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi) ||
        (worst.hi - worst.lo) <= 100.0 * eps * std::abs(mid)) {
      // Cannot be split further in double precision.
      frozen.push_back(worst);
      continue;
    }
    const auto& g = segments[worst.segment].g;
    const auto left = apply_gk21(g, worst.lo, mid);
    const auto right = apply_gk21(g, mid, worst.hi);
    out.evaluations += 42;
    ++out.subdivisions;
    if (!left.finite || !right.finite) {
      out.value = std::numeric_limits<double>::quiet_NaN();
      out.abs_error = std::numeric_limits<double>::infinity();
      return out;
    }
    heap.push({worst.segment, worst.lo, mid, left.value, left.error});
    heap.push({worst.segment, mid, worst.hi, right.value, right.error});
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    if (out.subdivisions % 64 == 0) {
      // Resum to keep running totals from drifting.
      total = 0.0;
      total_err = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        total += copy.top().value;
        total_err += copy.top().error;
        copy.pop();
      }
      for (const auto& p : frozen) {
        total += p.value;
        total_err += p.error;
      }
    }
  }

  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  for (const auto& p : frozen) {
    value += p.value;
    err += p.error;
  }
  out.value = value;
  out.abs_error = err;
  out.converged = err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(value));
  return out;
}

double integrate_or_throw(const Integrand& f, double a, double b,
                          const QuadratureConfig& cfg,
                          std::span<const double> breakpoints) {
  const QuadResult r = integrate(f, a, b, cfg, breakpoints);
  if (!r.converged) {
    throw Error(ErrorCode::QuadratureFailure,
                "integral over [" + std::to_string(a) + ", " + std::to_string(b) +
                    "] did not converge: value " + std::to_string(r.value) +
                    ", error estimate " + std::to_string(r.abs_error) + " after " +
                    std::to_string(r.subdivisions) + " subdivisions");
  }
  return r.value;
}

double tail_quantile(const Integrand& density, double a, bool upper,
                     double tail_mass, const QuadratureConfig& cfg) {
  QuadratureConfig tail_cfg = cfg;
  tail_cfg.abs_tol = tail_mass * 1e-3;
  const double inf = std::numeric_limits<double>::infinity();
  auto tail = [&](double b) {
    return upper ? integrate_or_throw(density, b, inf, tail_cfg)
                 : integrate_or_throw(density, -inf, b, tail_cfg);
  };
  const double dir = upper ? 1.0 : -1.0;

  double inside = a;
  double step = 1.0;
  double outside = a + dir * step;
  int guard = 0;
  while (tail(outside) > tail_mass) {
    inside = outside;
    step *= 2.0;
    outside = a + dir * step;
    if (++guard > 1100) {
      throw Error(ErrorCode::QuadratureFailure,
                  "tail quantile search did not bracket the target mass");
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (std::abs(outside - inside) <= 1e-12 * std::max(1.0, std::abs(mid))) break;
    if (tail(mid) > tail_mass) {
      inside = mid;
    } else {
      outside = mid;
    }
  }
  return outside;
}

}  // namespace imh
