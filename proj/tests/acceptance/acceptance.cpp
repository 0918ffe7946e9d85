// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

// End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
// status when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "imh/case_studies.hpp"
#include "imh/discrete.hpp"
#include "imh/error.hpp"
#include "imh/general.hpp"
#include "imh/samplers.hpp"

using namespace imh;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Outcome exponential_table() {
  Outcome o;
  const auto t0 = Clock::now();
  const double thetas[] = {0.5, 0.1, 0.01};
  const double expected[] = {6.64, 43.71, 458.21};
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    const RateReport r = rate_report(exponential_exponential(thetas[i]));
    worst = std::max(worst, std::abs(r.steps_to_eps(0.01).steps - expected[i]));
  }
  const double secs = seconds_since(t0);
  o.require(worst <= 0.01, fmt("max step error %.4g", worst));
  o.require(secs < 1.0, fmt("runtime %.3g s", secs));
  o.detail += fmt(" max |steps - table| = %.3g", worst) + fmt(", %.3f s", secs);
  return o;
}

Outcome exact_speed_at_maximizer() {
  Outcome o;
  const auto t0 = Clock::now();
  const WeightCdfPair pair = make_weight_cdf_pair(exponential_exponential(0.5));
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n) {
    worst = std::max(worst, std::abs(tv_at_point_general(pair, n, 0.0) - std::pow(0.5, n)));
  }
  const double secs = seconds_since(t0);
  o.require(worst <= 1e-6, fmt("max error %.3g", worst));
  o.require(secs < 10.0, fmt("runtime %.3g s", secs));
  o.detail += fmt(" max |TV - 0.5^n| = %.3g", worst) + fmt(", %.3f s", secs);
  return o;
}

Outcome kernel_normalization() {
  Outcome o;
  const WeightCdfPair pair = make_weight_cdf_pair(exponential_exponential(0.5));
  double worst = 0.0;
  for (double x : {0.0, 1.0, 4.0}) {
    for (int n : {1, 2, 5}) {
      worst = std::max(worst, std::abs(n_step_kernel(pair, n, x, 0.0, kInf) - 1.0));
    }
  }
  o.require(worst <= 1e-6, fmt("max error %.3g", worst));
  o.detail += fmt(" max |P^n(x, X) - 1| = %.3g", worst);
  return o;
}

Outcome t_n_closed_form() {
  Outcome o;
  const WeightCdfPair pair = make_weight_cdf_pair(exponential_exponential(0.5));
  Rng rng(20260401);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform() * 20.0);
    const double w = pair.wstar() * std::exp(rng.uniform(0.0, std::log(50.0)));
    worst = std::max(worst, std::abs(t_n_direct(pair, n, w) - (1.0 - std::pow(1.0 - 1.0 / w, n))));
  }
  o.require(worst <= 1e-8, fmt("max error %.3g", worst));
  o.detail += fmt(" max |T_n - closed form| = %.3g over 50 draws", worst);
  return o;
}

Outcome discrete_sandwich() {
  Outcome o;
  constexpr int T = 50;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const DiscreteModel m = random_discrete_model(1 + s % 10, stream_seed(505, s));
    const TvTrajectory tv = exact_tv(m, T);
    const double r = 1.0 - 1.0 / m.weight().front(), pi1 = m.target().front();
    for (int t = 0; t <= T; ++t) {
      const double up = std::pow(r, t), lo = (1.0 - pi1) * up;
      worst = std::max({worst, tv.d_max[t] - up, lo - tv.d_max[t]});
    }
  }
  o.require(worst <= 1e-12, fmt("sandwich violated by %.3g", worst));
  double e1 = 0.0, e2 = 0.0;
  for (int k : {2, 3, 5}) {
    const SharpnessPair sp = sharpness_chains(k);
    const TvTrajectory t1 = exact_tv(sp.phi1, T), t2 = exact_tv(sp.phi2, T);
    // At t = 0 the distance is the trivial max_x (1 - pi(x)); the envelopes
    // are attained from the first step on.
    for (int t = 1; t <= T; ++t) {
      e1 = std::max(e1, std::abs(t1.d_max[t] - std::pow(0.5, t)));
      e2 = std::max(e2, std::abs(t2.d_max[t] - 0.5 * std::pow(0.5, t)));
    }
  }
  o.require(e1 <= 1e-12, fmt("phi1 off upper envelope by %.3g", e1));
  o.require(e2 <= 1e-12, fmt("phi2 off lower envelope by %.3g", e2));
  o.detail += fmt(" worst slack %.3g", worst) + fmt(", phi1 %.3g", e1) + fmt(", phi2 %.3g", e2);
  return o;
}

Outcome liu_spectrum_check() {
  Outcome o;
  double resid = 0.0, ortho = 0.0;
  bool top_exact = true;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const DiscreteModel m = random_discrete_model(2 + s % 9, stream_seed(606, s));
    const Matrix P = build_kernel(m).entries;
    const SpectralDecomposition sd = liu_spectrum(m);
    const auto n = P.rows();
    for (Eigen::Index c = 0; c < n - 1; ++c) {
      const Vector f = sd.normalized.col(c);
      resid = std::max(resid, (P * f - sd.eigenvalues[c + 1] * f).cwiseAbs().maxCoeff());
      double mean = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) mean += m.target()[i] * f(i);
      ortho = std::max(ortho, std::abs(mean));
      for (Eigen::Index d = c + 1; d < n - 1; ++d) {
        double ip = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) ip += m.target()[i] * f(i) * sd.normalized(i, d);
        ortho = std::max(ortho, std::abs(ip));
      }
    }
    top_exact = top_exact && sd.eigenvalues[1] == 1.0 - 1.0 / m.weight().front();
  }
  o.require(resid <= 1e-10, fmt("eigen residual %.3g", resid));
  o.require(ortho <= 1e-10, fmt("orthogonality %.3g", ortho));
  o.require(top_exact, "lambda_1 differs from 1 - 1/w*");
  o.detail += fmt(" residual %.3g", resid) + fmt(", orthogonality %.3g", ortho);
  return o;
}

Outcome per_point_rates() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst_discrete = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const DiscreteModel m = random_discrete_model(2 + s % 9, stream_seed(707, s));
    const PerPointDiscrete pp = per_point_rate_discrete(m, resolving_horizon(m, 5000));
    for (const RateFit& f : pp.fits) {
      if (f.vanished) {
        o.require(false, "distance vanished at a state");
        continue;
      }
      worst_discrete = std::max(worst_discrete, std::abs(f.rate - pp.theoretical));
    }
  }
  o.require(worst_discrete <= 1e-4, fmt("discrete rate error %.3g", worst_discrete));

  const WeightCdfPair pair = make_weight_cdf_pair(exponential_exponential(0.5));
  double worst_general = 0.0;
  for (double x : {0.0, 1.0, 3.0}) {
    const PerPointGeneral pp = per_point_rate_general(pair, x, 60);
    worst_general = std::max(worst_general, std::abs(pp.fit.rate - 0.5));
  }
  o.require(worst_general <= 2e-2, fmt("general rate error %.3g", worst_general));
  const double secs = seconds_since(t0);
  o.require(secs < 120.0, fmt("runtime %.3g s", secs));
  o.detail += fmt(" discrete max error %.3g", worst_discrete) +
              fmt(", general max error %.3g", worst_general) + fmt(", %.2f s", secs);
  return o;
}

Outcome coupling_law() {
  Outcome o;
  constexpr int kReps = 100000;
  // phi1 has w* = 2; from a zero-weight state the chain cannot meet the
  // stationary copy before the first common draw.
  const DiscreteModel phi1 = sharpness_chains(2).phi1;
  const MeetingTimeStats st = coupling_replicas(phi1, phi1.size() - 1, kReps, 8, 10);
  double worst_z = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const double p = std::pow(0.5, n - 1);
    const double se = std::sqrt(p * (1.0 - p) / kReps);
    worst_z = std::max(worst_z, se > 0 ? std::abs(st.tail[n] - p) / se : std::abs(st.tail[n] - p) * 1e12);
  }
  o.require(worst_z <= 3.0, fmt("meeting-time tail off by %.3g stderr", worst_z));
  const RawChain c = three_point_chain();
  const Estimate e = empirical_tv(c.matrix, c.stationary, 1, 3, kReps, 88);
  const double z = e.z_score(4.0 / 27.0);
  o.require(z <= 3.0, fmt("empirical TV off by %.3g stderr", z));
  o.detail += fmt(" tail max |z| = %.2f", worst_z) + fmt(", TV(x2, 3) = %.5f", e.value) +
              fmt(" (|z| = %.2f)", z);
  return o;
}

Outcome dirichlet() {
  Outcome o;
  const DirichletCase d = dirichlet_multinomial({1.0, 1.0}, {1, 1});
  GeneralModel bare = d.model;
  bare.hints = {};
  const double grid = compute_wstar(bare).wstar;
  o.require(std::abs(d.wstar - 1.5) <= 1e-12, fmt("analytic w* = %.15g", d.wstar));
  o.require(std::abs(grid - d.wstar) <= 1e-6, fmt("grid w* = %.12g", grid));

  const double ratio = dirichlet_multinomial({1.0, 1.0}, {640, 640}).wstar /
                       dirichlet_wstar_stirling(1280.0, {0.5, 0.5});
  o.require(std::abs(ratio - 1.0) <= 0.02, fmt("Stirling ratio %.5f", ratio));

  auto steps_at = [](long long n) {
    const DirichletCase c = dirichlet_multinomial({1.0, 1.0}, {n / 2, n - n / 2});
    return rate_report(c.model).steps_to_eps(0.01).steps;
  };
  const double n_lo = 8192, n_hi = 81920;
  const double slope = std::log(steps_at(81920) / steps_at(8192)) / std::log(n_hi / n_lo);
  o.require(std::abs(slope - 0.5) <= 0.05, fmt("log-log slope %.4f", slope));
  o.detail += fmt(" grid w* = %.9f", grid) + fmt(", Stirling ratio %.5f", ratio) +
              fmt(", slope %.4f", slope);
  return o;
}

Outcome cauchy_counterexample() {
  Outcome o;
  const MhFixture fx = cauchy_rwmh();
  double sup = 0.0;
  for (int i = 0; i <= 10000; ++i) sup = std::max(sup, mh_rejection_quadrature(fx, -50.0 + 0.01 * i));
  o.require(sup < 1.0, fmt("grid sup of R = %.6f", sup));

  bool contained = true;
  for (int n : {5, 10, 50, 500}) {
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto run = run_mh(fx.log_target, fx.proposal, 0.0, n, stream_seed(1010, s));
      for (std::size_t k = 0; k < run.states.size(); ++k) {
        contained = contained && std::abs(run.states[k]) <= static_cast<double>(k);
      }
    }
  }
  o.require(contained, "a chain left [-n, n] after n steps");

  bool tails = true;
  for (int n : {5, 10, 50}) tails = tails && cauchy_tail_mass(n) >= 1.0 / (2.0 * std::numbers::pi * n);
  o.require(tails, "tail mass below 1/(2 pi n)");

  const double r0 = mh_rejection_quadrature(fx, 0.0);
  const Estimate mc = empirical_rejection_rate(fx, 0.0, 200000, 1011);
  const double z = mc.z_score(r0);
  o.require(z <= 3.0, fmt("R(0) Monte Carlo off by %.3g stderr", z));
  o.detail += fmt(" sup R = %.6f", sup) + fmt(", R(0) = %.6f", r0) + fmt(" (MC |z| = %.2f)", z);
  return o;
}

Outcome not_attained() {
  Outcome o;
  const WeightCdfPair pair = make_weight_cdf_pair(rate_not_attained_model());
  const PerPointGeneral pp = per_point_rate_general(pair, 0.0, 80);
  o.require(std::abs(pp.fit.rate - 1.0 / 3.0) <= 3e-2, fmt("fitted rate %.5f", pp.fit.rate));
  // d(n) is the supremum over starting points; it is bounded here by the
  // largest TV over a spread of starts (the chain from x = 0 included).
  double excess = -kInf;
  for (double x : {0.0, 0.5, 2.0, 8.0, 20.0}) {
    for (int n = 1; n <= 80; ++n) {
      excess = std::max(excess, tv_at_point_general(pair, n, x) - std::pow(2.0 / 3.0, n));
    }
  }
  o.require(excess <= 1e-8, fmt("TV above (2/3)^n by %.3g", excess));
  o.detail += fmt(" fitted rate %.5f", pp.fit.rate) + fmt(", max TV - (2/3)^n = %.3g", excess);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"exponential steps-to-epsilon table", exponential_table},
      {"exact speed at the maximizer", exact_speed_at_maximizer},
      {"n-step kernel normalization", kernel_normalization},
      {"T_n closed form for w >= w*", t_n_closed_form},
      {"discrete sandwich and sharpness", discrete_sandwich},
      {"closed-form discrete spectrum", liu_spectrum_check},
      {"per-point rates", per_point_rates},
      {"coupling law", coupling_law},
      {"Dirichlet-multinomial", dirichlet},
      {"Cauchy random-walk counterexample", cauchy_counterexample},
      {"rate not attained", not_attained},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s):%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
