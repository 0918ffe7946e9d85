// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "imh/case_studies.hpp"
#include "imh/error.hpp"
#include "imh/general.hpp"

using namespace imh;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
}  // namespace

TEST_CASE("three-point chain") {
  const RawChain c = three_point_chain();
  const TvTrajectory tv = exact_tv(c.matrix, c.stationary, 5);
  CHECK(tv.per_state(1, 3) == doctest::Approx(4.0 / 27.0).epsilon(1e-14));
  for (int t = 1; t <= 5; ++t) {
    CHECK(tv.per_state(0, t) < 1e-15);
    CHECK(tv.per_state(1, t) == doctest::Approx(0.5 * std::pow(2.0 / 3.0, t)).epsilon(1e-13));
  }
}

TEST_CASE("exponential family range") {
  CHECK_NOTHROW(exponential_exponential(1.0));
  for (double bad : {0.0, -0.5, 1.5}) {
    try {
      exponential_exponential(bad);
      FAIL("expected ThetaOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ThetaOutOfRange);
      CHECK(std::string(e.what()).find("not geometrically ergodic") != std::string::npos);
    }
  }
}

TEST_CASE("exponential densities integrate to one") {
  const GeneralModel m = exponential_exponential(0.3);
  auto p = [&](double x) { return m.proposal_density(std::vector<double>{x}); };
  auto t = [&](double x) { return m.target_density(std::vector<double>{x}); };
  CHECK(integrate_or_throw(p, 0.0, kInf) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(integrate_or_throw(t, 0.0, kInf) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("Dirichlet-multinomial maximum weight") {
  const DirichletCase d = dirichlet_multinomial({1.0, 1.0}, {1, 1});
  CHECK(d.wstar == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(d.mode[0] == 0.5);
  // Independent oracle: Beta(2,2) density 6 x (1 - x) at its mode, over (K-1)! = 1.
  CHECK(6.0 * 0.5 * 0.5 == doctest::Approx(d.wstar));
  GeneralModel bare = d.model;
  bare.hints = {};
  CHECK(compute_wstar(bare).wstar == doctest::Approx(1.5).epsilon(1e-6));

  // K = 3: Dirichlet(2, 3, 4) at the mode (1/6, 2/6, 3/6), proposal density 2.
  const DirichletCase d3 = dirichlet_multinomial({1.0, 1.0, 1.0}, {1, 2, 3});
  const double dens = std::tgamma(9.0) / (std::tgamma(2.0) * std::tgamma(3.0) * std::tgamma(4.0)) *
                      (1.0 / 6.0) * std::pow(2.0 / 6.0, 2) * std::pow(3.0 / 6.0, 3);
  CHECK(d3.wstar == doctest::Approx(dens / 2.0).epsilon(1e-12));
}

TEST_CASE("flat posterior and undefined mode") {
  const DirichletCase flat = dirichlet_multinomial({1.0, 1.0, 1.0}, {0, 0, 0});
  CHECK(flat.wstar == doctest::Approx(1.0));
  CHECK(flat.mode[1] == doctest::Approx(1.0 / 3.0));
  try {
    dirichlet_multinomial({0.5, 1.0}, {0, 2});
    FAIL("expected ModeUndefined");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModeUndefined);
  }
  CHECK_THROWS_AS(dirichlet_multinomial({1.0}, {1}), Error);
}

TEST_CASE("large counts stay finite") {
  const DirichletCase d = dirichlet_multinomial({1.0, 1.0}, {500000, 500000});
  CHECK(std::isfinite(d.wstar));
  CHECK(d.wstar / dirichlet_wstar_stirling(1e6, {0.5, 0.5}) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("Stirling ratio decreases to one") {
  double prev = kInf;
  for (double n : {20.0, 80.0, 320.0, 1280.0}) {
    const auto h = static_cast<long long>(n / 2);
    const double ratio = dirichlet_multinomial({1.0, 1.0}, {h, h}).wstar / dirichlet_wstar_stirling(n, {0.5, 0.5});
    CHECK(ratio < prev);
    CHECK(ratio > 1.0);
    // Second-order term for K = 2 at p = 1/2: ratio ~ 1 + 3/(4N).
    CHECK(ratio - 1.0 == doctest::Approx(0.75 / n).epsilon(0.15));
    prev = ratio;
  }
  CHECK(prev < 1.02);
}

TEST_CASE("Dirichlet samplers") {
  const DirichletCase d = dirichlet_multinomial({1.0, 1.0, 1.0}, {1, 4, 0});
  Rng rng(10);
  double m0 = 0.0, m1 = 0.0;
  constexpr int kDraws = 100000;
  for (int i = 0; i < kDraws; ++i) {
    const Point x = d.model.target_sampler(rng);
    CHECK(d.model.support.contains(x));
    m0 += x[0];
    m1 += x[1];
  }
  // Dirichlet(2, 5, 1): means 2/8 and 5/8.
  CHECK(m0 / kDraws == doctest::Approx(0.25).epsilon(0.01));
  CHECK(m1 / kDraws == doctest::Approx(0.625).epsilon(0.01));
}

TEST_CASE("rate-not-attained model") {
  const GeneralModel m = rate_not_attained_model();
  CHECK(weight_at(m, 0.0) == doctest::Approx(0.75));
  double prev = 0.0;
  for (double x = 0.0; x < 30.0; x += 0.5) {
    const double w = weight_at(m, x);
    CHECK(w > prev);
    CHECK(w < 1.5);
    prev = w;
  }
  auto p = [&](double x) { return m.proposal_density(std::vector<double>{x}); };
  CHECK(integrate_or_throw(p, 0.0, kInf) == doctest::Approx(1.0).epsilon(1e-10));
  Rng rng(6);
  double mean = 0.0;
  for (int i = 0; i < 200000; ++i) mean += m.proposal_sampler(rng)[0];
  CHECK(mean / 200000 == doctest::Approx(5.0 / 6.0).epsilon(0.01));
}

TEST_CASE("Cauchy random-walk fixture") {
  const MhFixture fx = cauchy_rwmh();
  const double r0 = mh_rejection_quadrature(fx, 0.0);
  CHECK(r0 == doctest::Approx(1.0 - kPi / 4.0).epsilon(1e-10));
  const Estimate mc = empirical_rejection_rate(fx, 0.0, 200000, 12);
  CHECK(mc.z_score(r0) < 3.0);
  double sup = 0.0;
  for (int i = 0; i <= 1000; ++i) sup = std::max(sup, mh_rejection_quadrature(fx, -50.0 + 0.1 * i));
  CHECK(sup < 1.0);
}

TEST_CASE("Cauchy tail mass exceeds the polynomial lower bound") {
  for (int n : {5, 10, 50}) {
    const double tail = cauchy_tail_mass(n);
    CHECK(tail == doctest::Approx(1.0 - 2.0 / kPi * std::atan(n)).epsilon(1e-10));
    CHECK(tail >= 1.0 / (2.0 * kPi * n));
  }
  CHECK(cauchy_tv_lower_bound(0.0, 10) == doctest::Approx(1.0 / (20.0 * kPi)));
}

TEST_CASE("Cauchy chain moves at most one unit per step") {
  const MhFixture fx = cauchy_rwmh();
  const auto run = run_mh(fx.log_target, fx.proposal, 0.0, 5000, 3);
  for (std::size_t k = 0; k < run.states.size(); ++k) CHECK(std::abs(run.states[k]) <= static_cast<double>(k));
}

TEST_CASE("uniform random-walk fixture") {
  const MhFixture fx = uniform_rwmh(1.5);
  CHECK(fx.rejection(1.0) == doctest::Approx(0.5));
  CHECK(uniform_rwmh(1.0).rejection(0.0) == 0.0);
  Rng rng(2);
  for (int i = 0; i < 50; ++i) {
    const double delta = rng.uniform(1.0, 1.99), y = rng.uniform(-1.0, 1.0);
    const MhFixture f = uniform_rwmh(delta);
    CHECK(mh_rejection_quadrature(f, y) == doctest::Approx(f.rejection(y)).epsilon(1e-9));
  }
  const Estimate mc = empirical_rejection_rate(fx, 1.0, 100000, 4);
  CHECK(mc.z_score(0.5) < 3.0);
  for (double bad : {0.5, 2.0}) {
    try {
      uniform_rwmh(bad);
      FAIL("expected DeltaOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DeltaOutOfRange);
    }
  }
}

TEST_CASE("sharpness chains") {
  const SharpnessPair sp = sharpness_chains(4);
  CHECK(sp.phi1.weight().front() == doctest::Approx(2.0));
  CHECK(sp.phi2.weight().front() == doctest::Approx(2.0));
  const TvTrajectory t1 = exact_tv(sp.phi1, 20), t2 = exact_tv(sp.phi2, 20);
  for (int t = 1; t <= 20; ++t) {
    CHECK(std::abs(t1.d_max[t] - std::pow(0.5, t)) < 1e-12);
    CHECK(std::abs(t2.d_max[t] - std::pow(0.5, t + 1)) < 1e-12);
  }
  CHECK_THROWS_AS(sharpness_chains(1), Error);
}

TEST_CASE("registry builds every model and checks parameters") {
  for (const std::string& name : registry_names()) {
    const RegistryEntry e = make_registry_entry(name);
    CHECK(e.name == name);
    CHECK_FALSE(e.truths.empty());
  }
  CHECK_THROWS_AS(make_registry_entry("nope"), Error);
  CHECK_THROWS_AS(make_registry_entry("exponential", {{"thet", "0.5"}}), Error);
  CHECK_THROWS_AS(make_registry_entry("exponential", {{"theta", "abc"}}), Error);
  const RegistryEntry d = make_registry_entry("dirichlet_multinomial", {{"alpha", "1,1"}, {"counts", "1,1"}});
  CHECK(std::get<GeneralModel>(d.model).hints.known_wstar == doctest::Approx(1.5));
}

TEST_CASE("published truths flow through the generic modules") {
  for (double theta : {0.5, 0.1, 0.01}) {
    const RegistryEntry e = make_registry_entry("exponential", {{"theta", std::to_string(theta)}});
    const RateReport r = rate_report(std::get<GeneralModel>(e.model));
    for (const Truth& t : e.truths) {
      if (t.name == "wstar") CHECK(r.wstar == doctest::Approx(t.value).epsilon(1e-12));
      if (t.name == "rate") CHECK(*r.exact_rate == doctest::Approx(t.value).epsilon(1e-12));
      CHECK(t.provenance == Provenance::Published);
    }
  }
  const RegistryEntry three = make_registry_entry("three_point");
  const RawChain& c = std::get<RawChain>(three.model);
  const TvTrajectory tv = exact_tv(c.matrix, c.stationary, 3);
  const double factor = three.truths[0].value, rate = three.truths[1].value;
  CHECK(tv.per_state(1, 3) == doctest::Approx(factor * std::pow(rate, 3)).epsilon(1e-14));

  const RegistryEntry cauchy = make_registry_entry("cauchy_rwmh");
  CHECK(cauchy.truths.front().provenance == Provenance::Derived);
  CHECK(mh_rejection_quadrature(std::get<MhFixture>(cauchy.model), 0.0) ==
        doctest::Approx(cauchy.truths.front().value).epsilon(1e-10));
}

TEST_CASE("random discrete models are valid") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const DiscreteModel m = random_discrete_model(1 + s % 10, s);
    double a = 0.0, b = 0.0;
    for (double x : m.target()) a += x;
    for (double x : m.proposal()) b += x;
    CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b == doctest::Approx(1.0).epsilon(1e-12));
  }
}
