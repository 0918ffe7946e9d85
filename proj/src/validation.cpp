// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include "imh/validation.hpp"

#include <algorithm>
#include <cmath>

#include "imh/case_studies.hpp"
#include "imh/discrete.hpp"
#include "imh/error.hpp"
#include "imh/general.hpp"
#include "imh/samplers.hpp"

namespace imh {
namespace {

void add(std::vector<Check>& out, const char* suite, std::string name, double value,
         double tol) {
  out.push_back({suite, std::move(name), value, tol, std::isfinite(value) && value <= tol});
}

void discrete_suite(std::vector<Check>& out, const ValidationOptions& opt) {
  constexpr int kModels = 50;
  double sandwich = 0.0, resid = 0.0, ortho = 0.0, top = 0.0, kernel_diag = 0.0;
  for (int m = 0; m < kModels; ++m) {
    const std::size_t n = 2 + static_cast<std::size_t>(m % 9);
    const DiscreteModel model = random_discrete_model(n, stream_seed(opt.seed, m));
    const double ws = model.weight().front();
    const double pi1 = model.target().front();
    const TvTrajectory tv = exact_tv(model, 50);
    for (int t = 0; t <= 50; ++t) {
      const double up = std::pow(1.0 - 1.0 / ws, t);
      const double lo = (1.0 - pi1) * up;
      sandwich = std::max({sandwich, tv.d_max[t] - up, lo - tv.d_max[t]});
    }
    const Matrix P = build_kernel(model).entries;
    const SpectralDecomposition sd = liu_spectrum(model);
    const auto k = static_cast<Eigen::Index>(n);
    Vector pi = Eigen::Map<const Vector>(model.target().data(), k);
    for (Eigen::Index c = 0; c < k - 1; ++c) {
      const Vector f = sd.normalized.col(c);
      resid = std::max(resid, (P * f - sd.eigenvalues[c + 1] * f).cwiseAbs().maxCoeff());
      ortho = std::max(ortho, std::abs(pi.dot(f)));
      for (Eigen::Index d = c + 1; d < k - 1; ++d) {
        ortho = std::max(ortho, std::abs(pi.cwiseProduct(f).dot(sd.normalized.col(d))));
      }
    }
    top = std::max(top, std::abs(sd.eigenvalues[1] - (1.0 - 1.0 / ws)));
    const Matrix D = kernel_upper_part(model);
    for (Eigen::Index i = 0; i + 1 < k; ++i) {
      kernel_diag = std::max(kernel_diag, std::abs(D(i, i) - sd.eigenvalues[i + 1]));
    }
  }
  add(out, "discrete", "sandwich violation, 50 models, t<=50", sandwich, 1e-12);
  add(out, "discrete", "eigen residual |P f - lambda f|", resid, 1e-10);
  add(out, "discrete", "pi-orthogonality of eigenvectors", ortho, 1e-10);
  add(out, "discrete", "lambda_1 = 1 - 1/w*", top, 1e-14);
  add(out, "discrete", "upper part diagonal = spectrum", kernel_diag, 1e-12);

  const SharpnessPair sp = sharpness_chains(3);
  const TvTrajectory t1 = exact_tv(sp.phi1, 30), t2 = exact_tv(sp.phi2, 30);
  double e1 = 0.0, e2 = 0.0;
  for (int t = 1; t <= 30; ++t) {
    e1 = std::max(e1, std::abs(t1.d_max[t] - std::pow(0.5, t)));
    e2 = std::max(e2, std::abs(t2.d_max[t] - std::pow(0.5, t + 1)));
  }
  add(out, "discrete", "phi1 attains upper envelope", e1, 1e-12);
  add(out, "discrete", "phi2 attains lower envelope", e2, 1e-12);

  const RawChain chain = three_point_chain();
  const TvTrajectory t3 = exact_tv(chain.matrix, chain.stationary, 3);
  add(out, "discrete", "three-point chain TV(x2, 3) = 4/27",
      std::abs(t3.per_state(1, 3) - 4.0 / 27.0), 1e-14);

  double fit_gap = 0.0;
  for (int m = 0; m < 10; ++m) {
    const DiscreteModel model = random_discrete_model(2 + m % 5, stream_seed(opt.seed + 1, m));
    const PerPointDiscrete pp = per_point_rate_discrete(model, resolving_horizon(model, 3000));
    for (const RateFit& f : pp.fits) {
      if (!f.vanished) fit_gap = std::max(fit_gap, std::abs(f.rate - pp.theoretical));
    }
  }
  add(out, "discrete", "per-state fitted rate vs 1 - 1/w*", fit_gap, 1e-4);
}

void general_suite(std::vector<Check>& out, const ValidationOptions& opt) {
  const GeneralModel model = exponential_exponential(0.5);
  const WeightCdfPair pair = make_weight_cdf_pair(model);
  Rng rng(opt.seed, 101);
  double closed = 0.0, closed_table = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = 1 + static_cast<int>(rng.uniform() * 20.0);
    const double w = pair.wstar() * (1.0 + 9.0 * rng.uniform());
    const double exact = 1.0 - std::pow(1.0 - 1.0 / w, n);
    closed = std::max(closed, std::abs(t_n_direct(pair, n, w) - exact));
    closed_table = std::max(closed_table, std::abs(t_n(pair, n, w) - exact));
  }
  add(out, "general", "T_n quadrature vs closed form (w >= w*)", closed, 1e-8);
  add(out, "general", "T_n table vs closed form (w >= w*)", closed_table, 1e-12);

  double table_direct = 0.0;
  for (double w : {0.6, 1.0, 1.5, 1.9}) {
    for (int n : {1, 3, 10}) {
      table_direct = std::max(table_direct, std::abs(t_n(pair, n, w) - t_n_direct(pair, n, w)));
    }
  }
  add(out, "general", "T_n table vs direct quadrature (w < w*)", table_direct, 1e-8);

  double norm = 0.0;
  for (double x : {0.0, 1.0, 4.0}) {
    for (int n : {1, 2, 5}) {
      norm = std::max(norm, std::abs(n_step_kernel(pair, n, x, 0.0, INFINITY) - 1.0));
    }
  }
  add(out, "general", "n-step kernel total mass = 1", norm, 1e-6);

  double tv0 = 0.0;
  for (int n = 1; n <= 10; ++n) {
    tv0 = std::max(tv0, std::abs(tv_at_point_general(pair, n, 0.0) - std::pow(0.5, n)));
  }
  add(out, "general", "TV at argmax = (1 - 1/w*)^n", tv0, 1e-6);

  const double expected[] = {6.64, 43.71, 458.21};
  const double thetas[] = {0.5, 0.1, 0.01};
  double steps = 0.0;
  for (int i = 0; i < 3; ++i) {
    const RateReport r = rate_report(exponential_exponential(thetas[i]));
    steps = std::max(steps, std::abs(r.steps_to_eps(0.01).steps - expected[i]));
  }
  add(out, "general", "exponential steps to 0.01", steps, 0.01);

  const double r0 = rejection_probability(model, 1.0);
  const double lam = lambda_fn(pair, 2.0 * std::exp(-0.5));
  add(out, "general", "R(x) = lambda(w(x))", std::abs(r0 - lam), 1e-8);
}

void coupling_suite(std::vector<Check>& out, const ValidationOptions& opt) {
  // Started from a zero-weight state the chain cannot meet a stationary copy
  // before the first common draw, so T is exactly geometric.
  const DiscreteModel phi1 = sharpness_chains(2).phi1;
  const std::size_t start = phi1.size() - 1;
  const MeetingTimeStats st = coupling_replicas(phi1, start, opt.replicas, opt.seed, 10);
  double worst_z = 0.0;
  for (int n = 1; n <= 10; ++n) {
    const double p = std::pow(0.5, n - 1);
    const double se = std::sqrt(p * (1.0 - p) / opt.replicas);
    worst_z = std::max(worst_z, se > 0.0 ? std::abs(st.tail[n] - p) / se
                                         : std::abs(st.tail[n] - p));
  }
  add(out, "coupling", "meeting-time tail vs geometric (max |z|)", worst_z, 3.0);

  const RawChain chain = three_point_chain();
  const Estimate e =
      empirical_tv(chain.matrix, chain.stationary, 1, 3, opt.replicas, opt.seed + 1);
  add(out, "coupling", "empirical TV(x2, 3) vs 4/27 (|z|)", std::abs(e.z_score(4.0 / 27.0)), 3.0);

  const double residual_min = residual_kernel(random_discrete_model(6, opt.seed)).minCoeff();
  add(out, "coupling", "residual kernel nonnegative", -residual_min, 0.0);
}

}  // namespace

std::vector<Check> run_validation(const std::string& suite, const ValidationOptions& opt) {
  if (opt.replicas < 10) throw Error(ErrorCode::InvalidModel, "validation needs >= 10 replicas");
  std::vector<Check> out;
  const bool all = suite == "all";
  if (!all && suite != "discrete" && suite != "general" && suite != "coupling") {
    throw Error(ErrorCode::InvalidModel, "unknown suite '" + suite + "'");
  }
  if (all || suite == "discrete") discrete_suite(out, opt);
  if (all || suite == "general") general_suite(out, opt);
  if (all || suite == "coupling") coupling_suite(out, opt);
  return out;
}

}  // namespace imh
