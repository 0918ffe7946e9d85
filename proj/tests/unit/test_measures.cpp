// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "imh/case_studies.hpp"
#include "imh/error.hpp"
#include "imh/measures.hpp"

using namespace imh;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidModel;
}

GeneralModel without_hints(GeneralModel m) {
  m.hints = {};
  return m;
}

}  // namespace

TEST_CASE("discrete model sorts states by weight and keeps user indices") {
  const DiscreteModel m({0.2, 0.5, 0.3}, {0.4, 0.25, 0.35});
  // weights: 0.5, 2, 0.857...
  REQUIRE(m.size() == 3);
  CHECK(m.weight()[0] == doctest::Approx(2.0));
  CHECK(m.user_index() == std::vector<std::size_t>{1, 2, 0});
  CHECK(m.canonical_of(1) == 0);
  CHECK(m.canonical_of(0) == 2);
  CHECK(m.target()[0] == 0.5);
  CHECK(m.proposal()[0] == 0.25);
  CHECK_FALSE(m.has_zero_weight());
  CHECK(m.pi_min() == 0.2);
}

TEST_CASE("ties keep input order; empty states are dropped") {
  const DiscreteModel m({0.25, 0.0, 0.25, 0.5, 0.0}, {0.25, 0.0, 0.25, 0.25, 0.25});
  CHECK(m.size() == 4);
  CHECK(m.user_size() == 5);
  CHECK(m.user_index() == std::vector<std::size_t>{3, 0, 2, 4});
  CHECK(m.canonical_of(1) == m.size());
  CHECK(m.has_zero_weight());
  CHECK(m.weight().back() == 0.0);
}

TEST_CASE("invalid discrete models are rejected") {
  CHECK(code_of([] { DiscreteModel({0.5, 0.6}, {0.5, 0.5}); }) == ErrorCode::InvalidModel);
  CHECK(code_of([] { DiscreteModel({1.1, -0.1}, {0.5, 0.5}); }) == ErrorCode::InvalidModel);
  CHECK(code_of([] { DiscreteModel({0.5, 0.5}, {1.0, 0.0}); }) == ErrorCode::InvalidModel);
  CHECK(code_of([] { DiscreteModel({0.5, 0.5}, {0.5}); }) == ErrorCode::InvalidModel);
}

TEST_CASE("property: canonical order is non-increasing and a permutation") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const DiscreteModel m = random_discrete_model(1 + s % 12, s);
    CHECK(std::is_sorted(m.weight().rbegin(), m.weight().rend()));
    auto idx = m.user_index();
    std::sort(idx.begin(), idx.end());
    for (std::size_t i = 0; i < idx.size(); ++i) CHECK(idx[i] == i);
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(m.weight()[i] == doctest::Approx(m.target()[i] / m.proposal()[i]));
      CHECK(m.canonical_of(m.user_index()[i]) == i);
    }
  }
}

TEST_CASE("wstar of a discrete model reports the smallest tied user index") {
  const DiscreteModel m({0.4, 0.4, 0.2}, {0.2, 0.2, 0.6});
  const WeightSummary s = wstar_discrete(m);
  CHECK(s.wstar == doctest::Approx(2.0));
  CHECK((*s.argmax)[0] == 0.0);
  CHECK(weight_at(m, 0) == doctest::Approx(2.0));
  CHECK(code_of([&] { weight_at(m, 3); }) == ErrorCode::PointOutsideSupport);
}

TEST_CASE("supports") {
  const Support s = Support::simplex(3);
  CHECK(s.dimension() == 3);
  const double in[] = {0.2, 0.3, 0.5};
  const double out[] = {0.2, 0.3, 0.6};
  CHECK(s.contains(in));
  CHECK_FALSE(s.contains(out));
  const Support i = Support::interval(0.0, kInf);
  const double x[] = {5.0};
  const double y[] = {-1.0};
  CHECK(i.contains(x));
  CHECK_FALSE(i.contains(y));
  CHECK_THROWS_AS(Support::interval(1.0, 0.0).validate(), Error);
}

TEST_CASE("grid search without hints finds w* = 1/theta at x = 0") {
  for (double theta : {0.5, 0.1, 0.9}) {
    const WeightSummary s = compute_wstar(without_hints(exponential_exponential(theta)));
    CHECK(s.method == WstarMethod::GridRefine);
    CHECK(s.wstar == doctest::Approx(1.0 / theta).epsilon(1e-9));
    CHECK((*s.argmax)[0] == doctest::Approx(0.0).epsilon(1e-6));
  }
}

TEST_CASE("hints short-circuit the search") {
  const WeightSummary s = compute_wstar(exponential_exponential(0.25));
  CHECK(s.method == WstarMethod::AnalyticHint);
  CHECK(s.wstar == 4.0);
  CHECK(s.attained);
  const WeightSummary r = compute_wstar(rate_not_attained_model());
  CHECK(r.wstar == 1.5);
  CHECK_FALSE(r.attained);
}

TEST_CASE("increasing weight toward a truncated end is flagged, not attained") {
  const WeightSummary s = compute_wstar(without_hints(rate_not_attained_model()));
  CHECK(s.wstar == doctest::Approx(1.5).epsilon(1e-6));
  // log w cancels -x against +x, so evaluation error grows like x * eps.
  CHECK(s.wstar <= 1.5 * (1.0 + 1e-12));
  CHECK(s.boundary_warning);
}

TEST_CASE("unbounded weights are detected") {
  GeneralModel m = without_hints(exponential_exponential(0.5));
  const double theta = 1.5;
  m.proposal_log_density = [theta](std::span<const double> x) {
    return x[0] >= 0.0 ? std::log(theta) - theta * x[0] : -kInf;
  };
  m.proposal_sampler = [theta](Rng& rng) { return Point{rng.exponential(theta)}; };
  CHECK(code_of([&] { compute_wstar(m); }) == ErrorCode::UnboundedWeight);
}

TEST_CASE("tiny budgets are refused") {
  WstarOptions opt;
  opt.budget = 50;
  CHECK(code_of([&] { compute_wstar(without_hints(exponential_exponential(0.5)), opt); }) ==
        ErrorCode::BudgetExhausted);
}

TEST_CASE("simplex search matches the analytic Dirichlet maximum") {
  const DirichletCase d3 = dirichlet_multinomial({1.0, 1.0, 1.0}, {2, 3, 4});
  const WeightSummary s = compute_wstar(without_hints(d3.model));
  CHECK(s.wstar == doctest::Approx(d3.wstar).epsilon(1e-6));
  for (std::size_t i = 0; i < 3; ++i) CHECK((*s.argmax)[i] == doctest::Approx(d3.mode[i]).epsilon(1e-3));
}

TEST_CASE("weight evaluation outside support and at zero proposal density") {
  const GeneralModel m = exponential_exponential(0.5);
  CHECK(code_of([&] { weight_at(m, -1.0); }) == ErrorCode::PointOutsideSupport);
  CHECK(weight_at(m, 2.0) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(log_weight_at(m, std::vector<double>{2.0}) == doctest::Approx(std::log(2.0) - 1.0));
}

TEST_CASE("search window cuts the proposal tail at 1e-10") {
  const auto [lo, hi] = search_window(exponential_exponential(0.5));
  CHECK(lo == 0.0);
  CHECK(std::exp(-0.5 * hi) == doctest::Approx(1e-10).epsilon(1e-6));
}

TEST_CASE("hint consistency is validated") {
  GeneralModel m = exponential_exponential(0.5);
  m.hints.known_wstar = 3.0;
  CHECK_THROWS_AS(m.validate(), Error);
}
