// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "imh/discrete.hpp"
#include "imh/estimate.hpp"
#include "imh/measures.hpp"
#include "imh/quadrature.hpp"
#include "imh/samplers.hpp"

namespace imh {

/// Where a ground-truth value comes from: quoted from the published
/// analysis, or derived here (with the derivation stated alongside).
enum class Provenance { Published, Derived };
std::string to_string(Provenance p);

struct Truth {
  std::string name;
  double value = 0.0;
  Provenance provenance = Provenance::Derived;
  std::string derivation;
};

/// A finite chain given directly by its matrix (not built from an IMH pair).
struct RawChain {
  std::string name;
  TransitionMatrix matrix;
  std::vector<double> stationary;
};

/// Random-walk Metropolis fixture with a uniform proposal U[x-h, x+h].
struct MhFixture {
  std::string name;
  std::function<double(double)> log_target;
  ProposalKernel proposal;
  double half_width = 1.0;
  Support support;
  std::function<double(double)> rejection;  // closed form, if known
};

RawChain three_point_chain();

/// pi = Exp(1), p = Exp(theta). Throws ThetaOutOfRange unless 0 < theta <= 1.
GeneralModel exponential_exponential(double theta);

struct DirichletCase {
  GeneralModel model;
  double wstar = 1.0;
  double log_wstar = 0.0;
  Point mode;
};

/// Dirichlet(alpha + counts) posterior against the uniform density (K-1)!
/// on the simplex. Throws ModeUndefined when some alpha_i + x_i < 1.
DirichletCase dirichlet_multinomial(const std::vector<double>& alpha,
                                    const std::vector<long long>& counts);

/// Large-N approximation (1/(K-1)!) sqrt(N^(K-1) / ((2 pi)^(K-1) prod p_i)).
double dirichlet_wstar_stirling(double n_trials, const std::vector<double>& p);

/// pi = Exp(1), p = (2/3) e^-x (1 + e^-x) on [0, inf): a mixture of
/// (2/3) Exp(1) and (1/3) Exp(2). Then w(x) = 1.5 / (1 + e^-x) increases to
/// w* = 1.5 without reaching it, so w(0) = 0.75 and the rate is 1/3.
GeneralModel rate_not_attained_model();

/// Cauchy target with proposal U[x-1, x+1].
MhFixture cauchy_rwmh();
/// U[-1, 1] target with proposal U[x-delta, x+delta], 1 <= delta < 2.
MhFixture uniform_rwmh(double delta);

/// R(x) = 1 - integral of q(x,y) min(1, pi(y)/pi(x)) dy by quadrature.
double mh_rejection_quadrature(const MhFixture& fx, double x, const QuadratureConfig& cfg = {});

/// Fraction of rejected proposals from x over `count` independent trials.
Estimate empirical_rejection_rate(const MhFixture& fx, double x, int count,
                                  std::uint64_t seed);

/// Mass of the Cauchy target outside [-t, t], by quadrature.
double cauchy_tail_mass(double t, const QuadratureConfig& cfg = {});
/// Polynomial lower bound 1 / (2 pi (|x0| + n)) on the TV after n steps.
double cauchy_tv_lower_bound(double x0, int n);

struct SharpnessPair {
  DiscreteModel phi1;  // uniform{1..K} target, uniform{1..2K} proposal
  DiscreteModel phi2;  // pi_1 = 1/2, pi_i = 1/(2K); p_1 = 1/4, p_i = 3/(4K)
};
SharpnessPair sharpness_chains(int k);

/// pi and p drawn independently from the flat Dirichlet on n states.
DiscreteModel random_discrete_model(std::size_t n, std::uint64_t seed);

using RegistryModel = std::variant<DiscreteModel, GeneralModel, RawChain, MhFixture>;
using Params = std::map<std::string, std::string>;

struct RegistryEntry {
  std::string name;
  RegistryModel model;
  std::vector<Truth> truths;
};

/// Names: exponential, dirichlet_multinomial, rate_not_attained,
/// cauchy_rwmh, uniform_rwmh, sharpness_phi1, sharpness_phi2, three_point.
const std::vector<std::string>& registry_names();
RegistryEntry make_registry_entry(const std::string& name, const Params& params = {});

}  // namespace imh
