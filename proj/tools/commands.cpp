// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "imh/case_studies.hpp"
#include "imh/discrete.hpp"
#include "imh/error.hpp"
#include "imh/general.hpp"
#include "imh/model_spec.hpp"
#include "imh/samplers.hpp"
#include "imh/validation.hpp"

namespace imh::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string model;
  std::string output;
  std::uint64_t seed = 1;
  int horizon = 200;
  int steps = 10000;
  int replicas = 10000;
  std::vector<double> epsilons{0.01};
  std::string x0;
  double rate_slack = 0.01;
  std::string figure;
  bool trajectory = false;
  std::string suite = "all";
};

// Shortest round-trip decimal form, so equal runs give equal bytes.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Output {
 public:
  Output(const Options& opt, std::string command_line)
      : dir_(opt.output), command_line_(std::move(command_line)), seed_(opt.seed) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw Error(ErrorCode::InvalidModel, "output directory '" + dir_.string() + "' is not writable");
    }
  }

  std::ofstream csv(const std::string& name, const std::string& columns) const {
    std::ofstream f = open(name);
    f << "# imhrate " << IMHRATE_VERSION << "\n# command: " << command_line_
      << "\n# seed: " << seed_ << "\n"
      << columns << "\n";
    return f;
  }

  void json_file(const std::string& name, json doc) const {
    doc["meta"] = {{"command", command_line_}, {"seed", seed_}, {"version", IMHRATE_VERSION}};
    std::ofstream f = open(name);
    f << doc.dump(2) << "\n";
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  std::ofstream open(const std::string& name) const {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw Error(ErrorCode::InvalidModel, "cannot write '" + (dir_ / name).string() + "'");
    return f;
  }

  fs::path dir_;
  std::string command_line_;
  std::uint64_t seed_;
};

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Point parse_point(const std::string& text) {
  Point p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto* end = item.data() + item.size();
    auto res = std::from_chars(item.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      throw Error(ErrorCode::InvalidModel, "--x0 must be a comma-separated list of numbers");
    }
    p.push_back(v);
  }
  if (p.empty()) throw Error(ErrorCode::InvalidModel, "--x0 is empty");
  return p;
}

// Discrete start states are 1-based user indices.
std::size_t discrete_start(const DiscreteModel& m, const std::string& x0) {
  std::size_t user = 1;
  if (!x0.empty()) {
    const Point p = parse_point(x0);
    if (p.size() != 1 || p[0] < 1 || p[0] != std::floor(p[0]) ||
        p[0] > static_cast<double>(m.user_size())) {
      throw Error(ErrorCode::PointOutsideSupport,
                  "--x0 must be a state index in 1.." + std::to_string(m.user_size()));
    }
    user = static_cast<std::size_t>(p[0]);
  }
  const std::size_t c = m.canonical_of(user - 1);
  if (c >= m.size()) {
    throw Error(ErrorCode::PointOutsideSupport,
                "state " + std::to_string(user) + " has zero target and proposal mass");
  }
  return c;
}

Point general_start(const GeneralModel& m, const RateReport& rep, const std::string& x0) {
  if (!x0.empty()) {
    Point p = parse_point(x0);
    if (!m.support.contains(p)) throw Error(ErrorCode::PointOutsideSupport, "--x0 outside the support");
    return p;
  }
  if (rep.argmax && m.support.contains(*rep.argmax)) return *rep.argmax;
  if (m.is_one_dimensional()) return Point{search_window(m).first};
  throw Error(ErrorCode::InvalidModel, "no default start point; pass --x0");
}

RateReportOptions report_options(const Options& opt) {
  RateReportOptions r;
  r.epsilons = opt.epsilons;
  r.rate_slack = opt.rate_slack;
  r.wstar.seed = opt.seed;
  return r;
}

json truths_json(const std::vector<Truth>& truths) {
  json arr = json::array();
  for (const Truth& t : truths) {
    json j{{"name", t.name}, {"value", t.value}, {"provenance", to_string(t.provenance)}};
    if (!t.derivation.empty()) j["derivation"] = t.derivation;
    arr.push_back(j);
  }
  return arr;
}

json report_json(const RateReport& rep) {
  json j;
  j["model"] = rep.model_name;
  j["wstar"] = finite_or_null(rep.wstar);
  j["rate"] = rep.exact_rate ? json(*rep.exact_rate) : json(nullptr);
  j["speed_kind"] = to_string(rep.speed_kind);
  j["attained"] = rep.attained;
  j["boundary_warning"] = rep.boundary_warning;
  j["wstar_method"] = to_string(rep.method);
  j["rate_slack"] = rep.rate_slack;
  if (rep.speed_kind == SpeedKind::DiscreteSandwich) j["pi1"] = rep.pi1;
  if (rep.argmax) j["argmax"] = *rep.argmax;
  if (!rep.note.empty()) j["note"] = rep.note;
  json steps = json::array();
  for (const StepsToEps& s : rep.steps) {
    steps.push_back({{"epsilon", s.epsilon},
                     {"steps", finite_or_null(s.steps)},
                     {"steps_ceil", s.steps_ceil}});
  }
  j["steps_to_eps"] = steps;
  return j;
}

void print_report(const RateReport& rep, std::ostream& out) {
  out << rep.model_name << ": w* = " << num(rep.wstar)
      << ", rate = " << (rep.exact_rate ? num(*rep.exact_rate) : "none")
      << ", speed = " << to_string(rep.speed_kind) << "\n";
  for (const StepsToEps& s : rep.steps) {
    out << "  steps to " << num(s.epsilon) << ": " << num(s.steps) << "\n";
  }
  if (!rep.note.empty()) out << "  note: " << rep.note << "\n";
}

// Least-squares rate over [n/2, n] of the prefix, or NaN when too short.
double prefix_rate(const std::vector<double>& log_tv, int n) {
  if (n < 6) return std::nan("");
  try {
    const RateFit f = fit_tail_rate(std::span<const double>(log_tv.data(), n), 1);
    return f.rate;
  } catch (const Error&) {
    return std::nan("");
  }
}

std::string blank_nan(double v) { return std::isnan(v) ? "" : num(v); }

// ---------------------------------------------------------------- analyze

int analyze_discrete(const DiscreteModel& m, const LoadedModel& lm, const Options& opt,
                     const Output& o, std::ostream& out) {
  RateReport rep = rate_report(m, report_options(opt));
  rep.model_name = lm.name;
  const int T = opt.horizon;
  const TvTrajectory tv = exact_tv(m, T);
  const Matrix P = build_kernel(m).entries;

  auto f = o.csv("tv.csv", "t,state,tv,lower,upper");
  for (int t = 0; t <= T; ++t) {
    f << t << ",0," << num(tv.d_max[t]) << "," << num(rep.lower(t)) << ","
      << num(rep.upper(t)) << "\n";
    for (std::size_t u = 0; u < m.user_size(); ++u) {
      const std::size_t c = m.canonical_of(u);
      if (c >= m.size()) continue;
      const auto ci = static_cast<Eigen::Index>(c);
      const double stay = P(ci, ci);
      const double lower = std::max(0.0, std::pow(stay, t) - m.target()[c]);
      f << t << "," << u + 1 << "," << num(tv.per_state(ci, t)) << "," << num(lower) << ","
        << num(rep.upper(t)) << "\n";
    }
  }

  json j = report_json(rep);
  if (rep.argmax) j["argmax"] = (*rep.argmax)[0] + 1.0;  // 1-based like the CSV
  j["truths"] = truths_json(lm.truths);
  if (T >= 20) {
    const PerPointDiscrete pp = per_point_rate_discrete(m, T);
    json rows = json::array();
    for (std::size_t c = 0; c < m.size(); ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      const RateFit& fit = pp.fits[c];
      rows.push_back({{"state", m.user_index()[c] + 1},
                      {"rejection", P(ci, ci) - m.proposal()[c]},
                      {"fitted_rate", fit.vanished ? json(nullptr) : json(fit.rate)},
                      {"upper", pp.theoretical}});
    }
    j["per_point"] = rows;
  }
  o.json_file("report.json", j);
  print_report(rep, out);
  out << "  d_max(" << T << ") = " << num(tv.d_max[T]) << "\n";
  return 0;
}

int analyze_general(const GeneralModel& m, const LoadedModel& lm, const Options& opt,
                    const Output& o, std::ostream& out) {
  const RateReport rep = rate_report(m, report_options(opt));
  print_report(rep, out);
  json j = report_json(rep);
  j["truths"] = truths_json(lm.truths);
  if (rep.speed_kind != SpeedKind::NotGeometric && m.is_one_dimensional()) {
    const Point x0 = general_start(m, rep, opt.x0);
    const WeightCdfPair pair = make_weight_cdf_pair(m);
    const PerPointGeneral pp = per_point_rate_general(pair, x0[0], std::max(opt.horizon, 3));
    std::vector<double> log_tv(pp.tv.size());
    for (std::size_t i = 0; i < pp.tv.size(); ++i) {
      log_tv[i] = pp.tv[i] > 0.0 ? std::log(pp.tv[i]) : -INFINITY;
    }
    auto f = o.csv("tv.csv", "n,tv,lower,upper,rate_fit");
    for (int n = 1; n <= static_cast<int>(pp.tv.size()); ++n) {
      f << n << "," << num(pp.tv[n - 1]) << "," << num(std::pow(pp.row.rejection, n)) << ","
        << num(rep.upper(n)) << "," << blank_nan(prefix_rate(log_tv, n)) << "\n";
    }
    j["per_point"] = json::array({{{"x", pp.row.x},
                                   {"rejection", pp.row.rejection},
                                   {"fitted_rate", pp.fit.vanished ? json(nullptr)
                                                                   : json(pp.fit.rate)},
                                   {"upper", pp.row.upper}}});
    out << "  TV from x0 = " << num(x0[0]) << " after " << pp.tv.size()
        << " steps: " << num(pp.tv.back()) << " (fitted rate " << num(pp.fit.rate) << ")\n";
  } else if (rep.speed_kind != SpeedKind::NotGeometric) {
    out << "  multivariate model: per-point TV is not computed\n";
  }
  o.json_file("report.json", j);
  return 0;
}

int analyze_chain(const RawChain& c, const LoadedModel& lm, const Options& opt,
                  const Output& o, std::ostream& out) {
  const int T = opt.horizon;
  const TvTrajectory tv = exact_tv(c.matrix, c.stationary, T);
  auto f = o.csv("tv.csv", "t,state,tv,lower,upper");
  for (int t = 0; t <= T; ++t) {
    f << t << ",0," << num(tv.d_max[t]) << ",,\n";
    for (std::size_t s = 0; s < c.matrix.n(); ++s) {
      f << t << "," << s + 1 << "," << num(tv.per_state(static_cast<Eigen::Index>(s), t))
        << ",,\n";
    }
  }
  json j{{"model", lm.name}, {"states", c.matrix.n()}, {"horizon", T},
         {"d_max_final", tv.d_max[T]}, {"truths", truths_json(lm.truths)}};
  o.json_file("report.json", j);
  out << lm.name << ": d_max(" << T << ") = " << num(tv.d_max[T]) << "\n";
  return 0;
}

int analyze_mh(const MhFixture& fx, const LoadedModel& lm, const Options& opt,
               const Output& o, std::ostream& out) {
  const double x0 = opt.x0.empty() ? 0.0 : parse_point(opt.x0).at(0);
  const double r0 = mh_rejection_quadrature(fx, x0);
  double lo = std::max(-50.0, fx.support.bounds[0].first);
  double hi = std::min(50.0, fx.support.bounds[0].second);
  double sup_r = 0.0, arg = lo;
  constexpr int kGrid = 2001;
  for (int i = 0; i < kGrid; ++i) {
    const double x = lo + (hi - lo) * i / (kGrid - 1);
    const double r = mh_rejection_quadrature(fx, x);
    if (r > sup_r) sup_r = r, arg = x;
  }
  json j{{"model", lm.name},
         {"x0", x0},
         {"rejection", r0},
         {"grid_sup_rejection", sup_r},
         {"grid_argsup", arg},
         {"grid", {lo, hi, kGrid}},
         {"truths", truths_json(lm.truths)}};
  if (fx.rejection) j["rejection_closed_form"] = fx.rejection(x0);
  o.json_file("report.json", j);
  out << lm.name << ": R(" << num(x0) << ") = " << num(r0) << ", sup of R on [" << num(lo)
      << ", " << num(hi) << "] = " << num(sup_r) << "\n";
  return 0;
}

int cmd_analyze(const Options& opt, const Output& o, std::ostream& out) {
  const LoadedModel lm = load_model(opt.model);
  return std::visit(
      [&](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, DiscreteModel>) return analyze_discrete(m, lm, opt, o, out);
        else if constexpr (std::is_same_v<T, GeneralModel>) return analyze_general(m, lm, opt, o, out);
        else if constexpr (std::is_same_v<T, RawChain>) return analyze_chain(m, lm, opt, o, out);
        else return analyze_mh(m, lm, opt, o, out);
      },
      lm.model);
}

// --------------------------------------------------------------- spectrum

int cmd_spectrum(const Options& opt, const Output& o, std::ostream& out) {
  const LoadedModel lm = load_model(opt.model);
  auto f = o.csv("spectrum.csv", "k,eigenvalue,state,eigenvector");
  if (const auto* m = std::get_if<DiscreteModel>(&lm.model)) {
    const SpectralDecomposition sd = liu_spectrum(*m);
    for (std::size_t c = 0; c < m->size(); ++c) {
      f << "0,1," << m->user_index()[c] + 1 << ",1\n";
    }
    for (std::size_t k = 1; k < sd.eigenvalues.size(); ++k) {
      for (std::size_t c = 0; c < m->size(); ++c) {
        f << k << "," << num(sd.eigenvalues[k]) << "," << m->user_index()[c] + 1 << ","
          << num(sd.normalized(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k - 1)))
          << "\n";
      }
    }
    out << lm.name << ": " << sd.eigenvalues.size() << " eigenvalues, lambda_1 = "
        << num(sd.eigenvalues.size() > 1 ? sd.eigenvalues[1] : 0.0) << "\n";
    return 0;
  }
  if (const auto* c = std::get_if<RawChain>(&lm.model)) {
    Eigen::EigenSolver<Matrix> es(c->matrix.entries, false);
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) ev.push_back(es.eigenvalues()[i].real());
    std::sort(ev.rbegin(), ev.rend());
    for (std::size_t k = 0; k < ev.size(); ++k) f << k << "," << num(ev[k]) << ",,\n";
    out << lm.name << ": " << ev.size() << " eigenvalues (real parts)\n";
    return 0;
  }
  throw Error(ErrorCode::InvalidModel, "spectrum needs a finite-state model");
}

// --------------------------------------------------------------- simulate

int cmd_simulate(const Options& opt, const Output& o, std::ostream& out) {
  const LoadedModel lm = load_model(opt.model);
  json j{{"model", lm.name}, {"steps", opt.steps}};
  std::vector<std::string> states;
  if (const auto* m = std::get_if<DiscreteModel>(&lm.model)) {
    const auto run = run_imh(*m, discrete_start(*m, opt.x0), opt.steps, opt.seed);
    for (std::size_t s : run.states) states.push_back(std::to_string(m->user_index()[s] + 1));
    j["acceptance_rate"] = run.acceptance_rate();
    j["final_state"] = m->user_index()[run.states.back()] + 1;
  } else if (const auto* g = std::get_if<GeneralModel>(&lm.model)) {
    const RateReport rep = rate_report(*g, report_options(opt));
    const auto run = run_imh(*g, general_start(*g, rep, opt.x0), opt.steps, opt.seed);
    for (const Point& p : run.states) {
      std::string s;
      for (double v : p) s += (s.empty() ? "" : ",") + num(v);
      states.push_back(std::move(s));
    }
    j["acceptance_rate"] = run.acceptance_rate();
    j["final_state"] = run.states.back();
  } else if (const auto* fx = std::get_if<MhFixture>(&lm.model)) {
    const double x0 = opt.x0.empty() ? 0.0 : parse_point(opt.x0).at(0);
    const auto run = run_mh(fx->log_target, fx->proposal, x0, opt.steps, opt.seed, lm.name);
    double max_abs = 0.0;
    for (double v : run.states) {
      states.push_back(num(v));
      max_abs = std::max(max_abs, std::abs(v));
    }
    j["acceptance_rate"] = run.acceptance_rate();
    j["final_state"] = run.states.back();
    j["max_abs_state"] = max_abs;
  } else {
    const auto& c = std::get<RawChain>(lm.model);
    const std::size_t n = c.matrix.n();
    std::size_t x = 0;
    if (!opt.x0.empty()) {
      const Point p = parse_point(opt.x0);
      if (p.size() != 1 || p[0] < 1 || p[0] > static_cast<double>(n) || p[0] != std::floor(p[0])) {
        throw Error(ErrorCode::PointOutsideSupport, "--x0 must be a state index in 1.." + std::to_string(n));
      }
      x = static_cast<std::size_t>(p[0]) - 1;
    }
    Rng rng(opt.seed);
    std::vector<double> row(n);
    states.push_back(std::to_string(x + 1));
    for (int s = 0; s < opt.steps; ++s) {
      for (std::size_t k = 0; k < n; ++k) row[k] = c.matrix.entries(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(k));
      x = sample_index(row, rng);
      states.push_back(std::to_string(x + 1));
    }
    j["final_state"] = x + 1;
  }
  if (opt.trajectory) {
    auto f = o.csv("trajectory.csv", "step,state");
    for (std::size_t i = 0; i < states.size(); ++i) f << i << ",\"" << states[i] << "\"\n";
  }
  o.json_file("run.json", j);
  out << lm.name << ": " << opt.steps << " steps";
  if (j.contains("acceptance_rate")) out << ", acceptance rate " << num(j["acceptance_rate"].get<double>());
  out << "\n";
  return 0;
}

// ----------------------------------------------------------------- couple

int cmd_couple(const Options& opt, const Output& o, std::ostream& out) {
  if (opt.replicas < 1) throw Error(ErrorCode::InvalidModel, "--replicas must be positive");
  const LoadedModel lm = load_model(opt.model);
  std::vector<int> times;
  double wstar = 1.0;
  if (const auto* m = std::get_if<DiscreteModel>(&lm.model)) {
    wstar = m->weight().front();
    const MeetingTimeStats st =
        coupling_replicas(*m, discrete_start(*m, opt.x0), opt.replicas, opt.seed, opt.horizon);
    times = st.times;
  } else if (const auto* g = std::get_if<GeneralModel>(&lm.model)) {
    const RateReport rep = rate_report(*g, report_options(opt));
    if (!std::isfinite(rep.wstar)) throw Error(ErrorCode::UnboundedWeight, "coupling needs a finite w*");
    wstar = rep.wstar;
    const Point x0 = general_start(*g, rep, opt.x0);
    for (int r = 0; r < opt.replicas; ++r) {
      times.push_back(run_coupling(*g, wstar, x0, stream_seed(opt.seed, r)).meeting_time);
    }
  } else {
    throw Error(ErrorCode::InvalidModel, "coupling needs an IMH model");
  }

  const int top = *std::max_element(times.begin(), times.end());
  std::vector<long long> hist(top + 1, 0);
  double mean = 0.0;
  for (int t : times) ++hist[t], mean += t;
  mean /= opt.replicas;

  auto f = o.csv("couple.csv", "n,tail,stderr,geometric");
  long long at_least = opt.replicas;
  const double r = 1.0 - 1.0 / wstar;
  for (int n = 0; n <= opt.horizon; ++n) {
    const double tail = static_cast<double>(at_least) / opt.replicas;
    const double geo = n == 0 ? 1.0 : std::pow(r, n - 1);
    f << n << "," << num(tail) << "," << num(std::sqrt(tail * (1.0 - tail) / opt.replicas)) << ","
      << num(geo) << "\n";
    if (n <= top) at_least -= hist[n];
  }
  json h = json::array();
  for (int n = 0; n <= top; ++n) {
    if (hist[n] > 0) h.push_back({n, hist[n]});
  }
  o.json_file("couple.json", {{"model", lm.name}, {"replicas", opt.replicas},
                              {"wstar", wstar}, {"mean_meeting_time", mean},
                              {"histogram", h}});
  out << lm.name << ": mean meeting time " << num(mean) << " over " << opt.replicas
      << " replicas (w* = " << num(wstar) << ")\n";
  return 0;
}

// -------------------------------------------------------------- reproduce

int cmd_reproduce(const Options& opt, const Output& o, std::ostream& out) {
  const double eps = opt.epsilons.front();
  RateReportOptions ro = report_options(opt);
  ro.epsilons = {eps};
  if (opt.figure == "steps_vs_theta") {
    auto f = o.csv("steps_vs_theta.csv", "theta,wstar,rate,steps,steps_ceil");
    for (int k = 1; k <= 99; ++k) {
      const double theta = k / 100.0;
      const RateReport rep = rate_report(exponential_exponential(theta), ro);
      const StepsToEps s = rep.steps.front();
      f << num(theta) << "," << num(rep.wstar) << "," << num(*rep.exact_rate) << ","
        << num(s.steps) << "," << s.steps_ceil << "\n";
    }
    out << "wrote " << o.path("steps_vs_theta.csv").string() << "\n";
    return 0;
  }
  // Beta-binomial: K = 2, flat prior, counts (round(pN), N - round(pN)).
  auto f = o.csv("steps_vs_N.csv", "p,N,x1,wstar,rate,steps,steps_ceil");
  for (double p : {0.5, 0.25, 0.1}) {
    for (int j = 0; j <= 13; ++j) {
      const long long n_trials = 10LL << j;
      const long long x1 = std::llround(p * static_cast<double>(n_trials));
      const DirichletCase dc = dirichlet_multinomial({1.0, 1.0}, {x1, n_trials - x1});
      const RateReport rep = rate_report(dc.model, ro);
      const StepsToEps s = rep.steps.front();
      f << num(p) << "," << n_trials << "," << x1 << "," << num(rep.wstar) << ","
        << num(*rep.exact_rate) << "," << num(s.steps) << "," << s.steps_ceil << "\n";
    }
  }
  out << "wrote " << o.path("steps_vs_N.csv").string() << "\n";
  return 0;
}

// --------------------------------------------------------------- validate

int cmd_validate(const Options& opt, std::ostream& out) {
  ValidationOptions vo;
  vo.seed = opt.seed;
  vo.replicas = opt.replicas;
  const std::vector<Check> checks = run_validation(opt.suite, vo);
  int failed = 0;
  out << "result  suite     value        tolerance  check\n";
  for (const Check& c : checks) {
    char line[64];
    std::snprintf(line, sizeof line, "%-6s  %-8s  %-11.4e  %-9.2e  ", c.passed ? "PASS" : "FAIL",
                  c.suite.c_str(), c.value, c.tolerance);
    out << line << c.name << "\n";
    failed += !c.passed;
  }
  out << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return std::min(failed, 100);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  if (const char* env = std::getenv("IMHRATE_OUTPUT"); env && *env) opt.output = env;
  else opt.output = ".";

  CLI::App app{"Convergence rates of independent Metropolis-Hastings chains", "imhrate"};
  app.set_version_flag("--version", std::string(IMHRATE_VERSION));
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* sub, bool needs_model) {
    if (needs_model) {
      sub->add_option("--model", opt.model, "registry:<name>?k=v&... or a JSON model file")
          ->required();
    }
    sub->add_option("--output", opt.output, "output directory (default $IMHRATE_OUTPUT or .)");
    sub->add_option("--seed", opt.seed, "master seed")->capture_default_str();
  };

  auto* analyze = app.add_subcommand("analyze", "rate report and TV table");
  add_common(analyze, true);
  analyze->add_option("--horizon", opt.horizon, "largest step count")->capture_default_str()
      ->check(CLI::Range(0, 1000000));
  analyze->add_option("--epsilon", opt.epsilons, "TV targets for steps-to-epsilon");
  analyze->add_option("--x0", opt.x0, "start point (state index for finite chains)");
  analyze->add_option("--rate-slack", opt.rate_slack, "slack of the rate-only lower envelope")
      ->capture_default_str();

  auto* spectrum = app.add_subcommand("spectrum", "eigen-decomposition of a finite chain");
  add_common(spectrum, true);

  auto* simulate = app.add_subcommand("simulate", "run one chain");
  add_common(simulate, true);
  simulate->add_option("--steps", opt.steps, "chain length")->capture_default_str();
  simulate->add_option("--x0", opt.x0, "start point");
  simulate->add_flag("--trajectory", opt.trajectory, "write trajectory.csv");

  auto* couple = app.add_subcommand("couple", "meeting times of the minorization coupling");
  add_common(couple, true);
  couple->add_option("--replicas", opt.replicas, "number of coupled pairs")->capture_default_str();
  couple->add_option("--x0", opt.x0, "start point");
  int couple_horizon = 30;
  couple->add_option("--horizon", couple_horizon, "largest n in the tail table")
      ->capture_default_str()->check(CLI::Range(1, 100000));

  auto* reproduce = app.add_subcommand("reproduce", "plot data for the steps-to-converge figures");
  add_common(reproduce, false);
  reproduce->add_option("--figure", opt.figure, "figure name")
      ->required()->check(CLI::IsMember({"steps_vs_theta", "steps_vs_N"}));
  reproduce->add_option("--epsilon", opt.epsilons, "TV target");

  auto* validate = app.add_subcommand("validate", "run the built-in check suites");
  validate->add_option("suite", opt.suite, "discrete, general, coupling or all")
      ->capture_default_str()->check(CLI::IsMember({"discrete", "general", "coupling", "all"}));
  validate->add_option("--seed", opt.seed, "master seed");
  validate->add_option("--replicas", opt.replicas, "Monte Carlo replicas");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  std::string command_line = "imhrate";
  for (std::size_t i = 1; i < args.size(); ++i) command_line += " " + args[i];

  try {
    for (double e : opt.epsilons) {
      if (!(e > 0.0 && e < 1.0)) throw Error(ErrorCode::InvalidModel, "--epsilon must lie in (0, 1)");
    }
    if (validate->parsed()) {
      if (!validate->count("--seed")) opt.seed = 7;
      if (!validate->count("--replicas")) opt.replicas = ValidationOptions{}.replicas;
      return cmd_validate(opt, out);
    }
    const Output o(opt, command_line);
    if (analyze->parsed()) return cmd_analyze(opt, o, out);
    if (spectrum->parsed()) return cmd_spectrum(opt, o, out);
    if (simulate->parsed()) return cmd_simulate(opt, o, out);
    if (couple->parsed()) {
      opt.horizon = couple_horizon;
      return cmd_couple(opt, o, out);
    }
    return cmd_reproduce(opt, o, out);
  } catch (const Error& e) {
    err << "imhrate: " << e.what() << "\n";
    return is_model_error(e.code()) ? 2 : 3;
  } catch (const std::exception& e) {
    err << "imhrate: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace imh::cli
