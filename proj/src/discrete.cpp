// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include "imh/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "imh/error.hpp"

namespace imh {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_stationary(const TransitionMatrix& P, const std::vector<double>& pi) {
  if (pi.size() != P.n()) {
    throw Error(ErrorCode::NotStationary, "stationary vector has the wrong length");
  }
  Eigen::Map<const Eigen::RowVectorXd> row(pi.data(), static_cast<Eigen::Index>(pi.size()));
  const double drift = (row * P.entries - row).cwiseAbs().maxCoeff();
  if (drift > 1e-10 || std::abs(row.sum() - 1.0) > 1e-10) {
    throw Error(ErrorCode::NotStationary,
                "pi P differs from pi by " + std::to_string(drift));
  }
}

// Visits each scaled deviation row: visit(x, t, row, log_scale) where the
// true row P^t(x,.) - pi equals row * exp(log_scale). A zero row is passed
// with log_scale = -inf.
using RowVisitor =
    std::function<void(std::size_t, int, const Eigen::RowVectorXd&, double)>;

void iterate_rows(const TransitionMatrix& P, const std::vector<double>& pi, int T,
                  const RowVisitor& visit) {
  const auto n = static_cast<Eigen::Index>(P.n());
  Eigen::Map<const Eigen::RowVectorXd> pi_row(pi.data(), n);
  for (Eigen::Index x = 0; x < n; ++x) {
    Eigen::RowVectorXd r = -pi_row;
    r(x) += 1.0;
    double log_scale = 0.0;
    for (int t = 0; t <= T; ++t) {
      if (t > 0 && log_scale != kNegInf) {
        Eigen::RowVectorXd next = r * P.entries;
        next -= next.sum() * pi_row;
        const double m = next.cwiseAbs().maxCoeff();
        if (m == 0.0) {
          log_scale = kNegInf;
          r.setZero();
        } else {
          r = next / m;
          log_scale += std::log(m);
        }
      }
      visit(static_cast<std::size_t>(x), t, r, log_scale);
    }
  }
}

double log_half_l1(const Eigen::RowVectorXd& r, double log_scale) {
  if (log_scale == kNegInf) return kNegInf;
  const double s = 0.5 * r.cwiseAbs().sum();
  return s == 0.0 ? kNegInf : std::log(s) + log_scale;
}

}  // namespace

TransitionMatrix TransitionMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  TransitionMatrix P;
  const auto n = static_cast<Eigen::Index>(rows.size());
  P.entries.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) {
      throw Error(ErrorCode::InvalidModel, "transition matrix must be square");
    }
    for (Eigen::Index j = 0; j < n; ++j) P.entries(i, j) = rows[i][j];
  }
  P.validate();
  return P;
}

void TransitionMatrix::validate() const {
  if (entries.rows() == 0 || entries.rows() != entries.cols()) {
    throw Error(ErrorCode::InvalidModel, "transition matrix must be square and non-empty");
  }
  if (!entries.allFinite() || entries.minCoeff() < 0.0) {
    throw Error(ErrorCode::InvalidModel, "transition matrix has negative or non-finite entries");
  }
  const Vector sums = entries.rowwise().sum();
  for (Eigen::Index i = 0; i < sums.size(); ++i) {
    if (std::abs(sums(i) - 1.0) > 1e-12) {
      throw Error(ErrorCode::InvalidModel,
                  "row " + std::to_string(i + 1) + " sums to " + std::to_string(sums(i)));
    }
  }
}

TransitionMatrix build_kernel(const DiscreteModel& model) {
  const auto n = static_cast<Eigen::Index>(model.size());
  const auto& p = model.proposal();
  const auto& w = model.weight();
  TransitionMatrix P;
  P.entries.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double stay = p[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      if (w[i] > 0.0) {
        const double ratio = w[j] / w[i];
        P.entries(i, j) = p[j] * std::min(1.0, ratio);
        stay += p[j] * std::max(0.0, 1.0 - ratio);
      } else if (w[j] > 0.0) {
        P.entries(i, j) = p[j];
      } else {
        stay += p[j];
      }
    }
    P.entries(i, i) = stay;
  }
  P.validate();
  return P;
}

Matrix kernel_upper_part(const DiscreteModel& model) {
  const auto n = static_cast<Eigen::Index>(model.size());
  Eigen::Map<const Eigen::RowVectorXd> p(model.proposal().data(), n);
  return build_kernel(model).entries - Vector::Ones(n) * p;
}

SpectralDecomposition liu_spectrum(const DiscreteModel& model) {
  if (model.has_zero_weight()) {
    throw Error(ErrorCode::ZeroWeightState,
                "closed-form spectrum needs every state to carry target mass");
  }
  const std::size_t n = model.size();
  const auto& pi = model.target();
  const auto& p = model.proposal();
  const auto& w = model.weight();

  // Tail sums S_pi(k) and S_p(k) over canonical states k..n (0-based).
  std::vector<double> s_pi(n + 1, 0.0), s_p(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    s_pi[k] = s_pi[k + 1] + pi[k];
    s_p[k] = s_p[k + 1] + p[k];
  }

  SpectralDecomposition out;
  out.eigenvalues.assign(n, 0.0);
  out.eigenvalues[0] = 1.0;
  const auto m = static_cast<Eigen::Index>(n);
  out.eigenvectors.setZero(m, m - 1);
  out.normalized.setZero(m, m - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // Paper index k+1: lambda = sum_{i >= k} (p_i - pi_i / w_k).
    out.eigenvalues[k + 1] = k == 0 ? 1.0 - 1.0 / w[0] : s_p[k] - s_pi[k] / w[k];
    const auto col = static_cast<Eigen::Index>(k);
    out.eigenvectors(col, col) = s_pi[k + 1];
    for (std::size_t j = k + 1; j < n; ++j) {
      out.eigenvectors(static_cast<Eigen::Index>(j), col) = -pi[k];
    }
    double norm2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = out.eigenvectors(static_cast<Eigen::Index>(j), col);
      norm2 += v * v * pi[j];
    }
    out.normalized.col(col) = out.eigenvectors.col(col) / std::sqrt(norm2);
  }
  return out;
}

RankOneResult rank_one_eigen(const std::vector<double>& eigvals, const Matrix& eigvecs,
                             const Vector& u, bool want_vectors) {
  const auto n = static_cast<Eigen::Index>(eigvals.size());
  if (n == 0 || eigvecs.rows() != u.size() || eigvecs.cols() != n) {
    throw Error(ErrorCode::InvalidModel, "eigenpairs and perturbation have mismatched sizes");
  }
  RankOneResult out;
  out.eigenvalues = eigvals;
  const Vector un = eigvecs.col(n - 1);
  const double shift = u.dot(un);
  const double top = eigvals.back() + shift;
  out.eigenvalues.back() = top;

  Matrix vecs = eigvecs;
  const double scale = std::max({1.0, std::abs(top), u.norm() * un.norm()});
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    const double num = u.dot(eigvecs.col(j));
    const double den = top - eigvals[j];
    if (std::abs(den) <= 1e-14 * scale) {
      // With u^T u_j = 0, u_j is already an eigenvector of B.
      if (std::abs(num) > 1e-14 * scale) out.degenerate = true;
      continue;
    }
    vecs.col(j) -= (num / den) * un;
  }
  if (want_vectors) {
    if (out.degenerate) {
      throw Error(ErrorCode::DegeneratePerturbation,
                  "lambda_n + u^T u_n equals another eigenvalue with u^T u_j != 0; "
                  "the perturbed matrix is not diagonalizable");
    }
    out.eigenvectors = std::move(vecs);
  }
  return out;
}

TvTrajectory exact_tv(const TransitionMatrix& P, const std::vector<double>& pi, int T) {
  if (T < 0) throw Error(ErrorCode::InvalidModel, "horizon must be nonnegative");
  P.validate();
  check_stationary(P, pi);
  const auto n = static_cast<Eigen::Index>(P.n());
  TvTrajectory out;
  out.horizon = T;
  out.log_per_state.resize(n, T + 1);
  iterate_rows(P, pi, T, [&](std::size_t x, int t, const Eigen::RowVectorXd& r, double ls) {
    out.log_per_state(static_cast<Eigen::Index>(x), t) = log_half_l1(r, ls);
  });
  out.per_state = out.log_per_state.array().exp().matrix();
  out.d_max.resize(T + 1);
  for (int t = 0; t <= T; ++t) out.d_max[t] = out.per_state.col(t).maxCoeff();
  return out;
}

TvTrajectory exact_tv(const DiscreteModel& model, int T) {
  return exact_tv(build_kernel(model), model.target(), T);
}

std::vector<Vector> deviation_rows(const TransitionMatrix& P, const std::vector<double>& pi,
                                   std::size_t x, int T) {
  check_stationary(P, pi);
  const auto n = static_cast<Eigen::Index>(P.n());
  Eigen::Map<const Eigen::RowVectorXd> pi_row(pi.data(), n);
  Eigen::RowVectorXd r = -pi_row;
  r(static_cast<Eigen::Index>(x)) += 1.0;
  std::vector<Vector> out;
  out.push_back(r.transpose());
  for (int t = 1; t <= T; ++t) {
    r = r * P.entries;
    r -= r.sum() * pi_row;
    out.push_back(r.transpose());
  }
  return out;
}

DiscreteBounds rate_bounds_discrete(const DiscreteModel& model, int T) {
  const TvTrajectory tv = exact_tv(model, T);
  const double rate = 1.0 - 1.0 / model.weight().front();
  const double pi1 = model.target().front();
  DiscreteBounds out;
  out.d_max = tv.d_max;
  out.lower.resize(T + 1);
  out.upper.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    out.upper[t] = std::pow(rate, t);
    out.lower[t] = (1.0 - pi1) * out.upper[t];
    if (out.d_max[t] < out.lower[t] - 1e-12 || out.d_max[t] > out.upper[t] + 1e-12) {
      out.inside = false;
      throw Error(ErrorCode::SandwichViolated,
                  "d(" + std::to_string(t) + ") = " + std::to_string(out.d_max[t]) +
                      " lies outside [" + std::to_string(out.lower[t]) + ", " +
                      std::to_string(out.upper[t]) + "]");
    }
  }
  return out;
}

double l2_pi_deviation(const Vector& e, const std::vector<double>& pi) {
  double s = 0.0;
  for (Eigen::Index y = 0; y < e.size(); ++y) s += e(y) * e(y) / pi[y];
  return std::sqrt(s);
}

double linf_deviation(const Vector& e, const std::vector<double>& pi) {
  double m = 0.0;
  for (Eigen::Index y = 0; y < e.size(); ++y) m = std::max(m, std::abs(e(y)) / pi[y]);
  return m;
}

int resolving_horizon(const DiscreteModel& model, int floor, double contamination, int cap) {
  if (!(contamination > 0.0 && contamination < 1.0) || floor < 1 || cap < floor) {
    throw Error(ErrorCode::InvalidModel, "resolving_horizon needs 0 < contamination < 1 and 1 <= floor <= cap");
  }
  const Matrix D = kernel_upper_part(model);
  const double lambda1 = D.rows() > 0 ? D(0, 0) : 0.0;
  if (!(lambda1 > 0.0)) return floor;
  double ratio = 0.0;
  for (Eigen::Index k = 1; k < D.rows(); ++k) {
    const double r = D(k, k) / lambda1;
    if (r < 1.0 - 1e-9) ratio = std::max(ratio, r);
  }
  if (ratio <= 0.0) return floor;
  const double t = 2.0 * std::log(contamination) / std::log(ratio);
  return static_cast<int>(std::clamp(std::ceil(t), static_cast<double>(floor), static_cast<double>(cap)));
}

PerPointDiscrete per_point_rate_discrete(const DiscreteModel& model, int T) {
  if (T < 20) {
    throw Error(ErrorCode::InvalidModel, "per-point rate fits need a horizon of at least 20");
  }
  const TransitionMatrix P = build_kernel(model);
  const auto& pi = model.target();
  const auto n = static_cast<Eigen::Index>(model.size());
  const double lambda1 = 1.0 - 1.0 / model.weight().front();

  PerPointDiscrete out;
  out.theoretical = lambda1;
  out.chain_checked = !model.has_zero_weight();
  std::vector<double> log_c(n, 0.0);
  if (out.chain_checked) {
    const SpectralDecomposition spec = liu_spectrum(model);
    out.c_pi.resize(n);
    for (Eigen::Index x = 0; x < n; ++x) {
      out.c_pi[x] = n > 1 ? std::abs(spec.normalized(x, 0)) : 0.0;
      log_c[x] = std::log(out.c_pi[x]);
    }
  }
  const double pi_star = model.pi_min();

  Matrix log_tv(n, T + 1);
  // Rounding in the accumulated log scale grows with t and with |log scale|.
  auto slack = [&](double lhs, double rhs, double tol) {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale == 0.0) return;
    const double gap = (lhs - rhs) / scale;
    out.worst_chain_gap = std::min(out.worst_chain_gap, gap);
    if (gap < -tol) out.chain_holds = false;
  };
  iterate_rows(P, pi, T, [&](std::size_t x, int t, const Eigen::RowVectorXd& r, double ls) {
    const double tol = 1e-10 + 1e-15 * t * (1.0 + std::abs(ls));
    const auto xi = static_cast<Eigen::Index>(x);
    log_tv(xi, t) = log_half_l1(r, ls);
    if (!out.chain_checked || ls == -std::numeric_limits<double>::infinity()) return;
    const Vector e = r.transpose();
    const double tv = 0.5 * e.cwiseAbs().sum();
    const double linf = linf_deviation(e, pi);
    const double l2 = l2_pi_deviation(e, pi);
    slack(tv, 0.5 * pi_star * linf, tol);
    slack(linf, l2, tol);
    if (lambda1 > 0.0 && out.c_pi[xi] > 0.0) {
      // (pi*/2) L2 >= (pi*/2) |f_1(x)| lambda_1^t, compared on the log scale.
      const double rhs = log_c[xi] + t * std::log(lambda1) - ls;
      slack(l2, std::exp(rhs), tol);
    }
  });

  out.fits.reserve(n);
  for (Eigen::Index x = 0; x < n; ++x) {
    std::vector<double> row(T + 1);
    for (int t = 0; t <= T; ++t) row[t] = log_tv(x, t);
    out.fits.push_back(fit_tail_rate(row, 0));
  }
  return out;
}

}  // namespace imh
