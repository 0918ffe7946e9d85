// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("IMHRATE_TEST_TMP");
  fs::path base = env ? fs::path(env) : fs::temp_directory_path() / "imhrate_cli_test";
  fs::path dir = base / name;
  fs::remove_all(dir);
  return dir;
}

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "imhrate");
  std::ostringstream out, err;
  const int code = imh::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Data rows of a CSV (header comments and the column line removed).
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::vector<std::vector<std::string>> out;
  bool columns_seen = false;
  while (std::getline(f, line)) {
    if (line.starts_with("#")) continue;
    if (!columns_seen) {
      columns_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_CASE("analyze reports the exponential steps") {
  const fs::path dir = scratch("analyze_exp");
  const Result r = run({"analyze", "--model", "registry:exponential?theta=0.5", "--epsilon", "0.01",
                        "--horizon", "30", "--output", dir.string()});
  REQUIRE(r.code == 0);
  const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(report["steps_to_eps"][0]["steps"].get<double>() == doctest::Approx(6.64).epsilon(0.001));
  CHECK(report["speed_kind"] == "exact-equality");
  CHECK(report["meta"]["seed"] == 1);
  const auto tv = rows(dir / "tv.csv");
  REQUIRE(tv.size() == 30);
  for (const auto& row : tv) {
    const int n = std::stoi(row[0]);
    CHECK(std::stod(row[1]) == doctest::Approx(std::pow(0.5, n)).epsilon(1e-6));
  }
}

TEST_CASE("non-geometric parameter exits with a model error") {
  const Result r = run({"analyze", "--model", "registry:exponential?theta=1.5", "--output",
                        scratch("analyze_bad").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("not geometrically ergodic") != std::string::npos);
}

TEST_CASE("sharpness chain d_max column") {
  const fs::path dir = scratch("phi2");
  REQUIRE(run({"analyze", "--model", "registry:sharpness_phi2", "--horizon", "20", "--output", dir.string()}).code == 0);
  int seen = 0;
  for (const auto& row : rows(dir / "tv.csv")) {
    const int t = std::stoi(row[0]);
    if (row[1] != "0" || t == 0) continue;
    CHECK(std::stod(row[2]) == doctest::Approx(std::pow(0.5, t + 1)).epsilon(1e-12));
    ++seen;
  }
  CHECK(seen == 20);
}

TEST_CASE("every output carries the metadata header") {
  const fs::path dir = scratch("header");
  REQUIRE(run({"simulate", "--model", "registry:three_point", "--steps", "50", "--seed", "9",
               "--trajectory", "--output", dir.string()}).code == 0);
  const std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.starts_with("# imhrate "));
  CHECK(csv.find("# command: imhrate simulate") != std::string::npos);
  CHECK(csv.find("# seed: 9") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "run.json"));
  CHECK(j["meta"]["seed"] == 9);
}

TEST_CASE("same command and seed give byte-identical files") {
  const fs::path a = scratch("repro"), b = scratch("repro_copy");
  for (const fs::path& dir : {a, b}) {
    REQUIRE(run({"couple", "--model", "registry:sharpness_phi1", "--replicas", "2000", "--seed", "5",
                 "--output", dir.string()}).code == 0);
  }
  // The command lines differ only in the output path, so compare data rows.
  CHECK(rows(a / "couple.csv") == rows(b / "couple.csv"));
  const fs::path c = scratch("repro_same");
  REQUIRE(run({"simulate", "--model", "registry:exponential", "--steps", "100", "--output", c.string(), "--trajectory"}).code == 0);
  const std::string first = slurp(c / "trajectory.csv") + slurp(c / "run.json");
  REQUIRE(run({"simulate", "--model", "registry:exponential", "--steps", "100", "--output", c.string(), "--trajectory"}).code == 0);
  CHECK(first == slurp(c / "trajectory.csv") + slurp(c / "run.json"));
}

TEST_CASE("reproduce steps_vs_theta") {
  const fs::path dir = scratch("theta");
  REQUIRE(run({"reproduce", "--figure", "steps_vs_theta", "--output", dir.string()}).code == 0);
  const auto tv = rows(dir / "steps_vs_theta.csv");
  CHECK(tv.size() == 99);
  for (const auto& row : tv) {
    if (row[0] == "0.5") CHECK(std::stod(row[3]) == doctest::Approx(6.64).epsilon(0.001));
    if (row[0] == "0.99") CHECK(std::stod(row[3]) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("reproduce steps_vs_N scales like sqrt(N)") {
  const fs::path dir = scratch("n");
  REQUIRE(run({"reproduce", "--figure", "steps_vs_N", "--output", dir.string()}).code == 0);
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : rows(dir / "steps_vs_N.csv")) {
    if (row[0] == "0.5") pts.emplace_back(std::stod(row[1]), std::stod(row[5]));
  }
  REQUIRE(pts.size() >= 5);
  // Slope over the top decade.
  const auto& hi = pts.back();
  const auto lo = *std::find_if(pts.begin(), pts.end(), [&](const auto& p) { return p.first * 10 >= hi.first; });
  const double slope = std::log(hi.second / lo.second) / std::log(hi.first / lo.first);
  CHECK(std::abs(slope - 0.5) < 0.05);
}

TEST_CASE("spectrum of a JSON discrete model") {
  const fs::path dir = scratch("spectrum");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "model.json");
    f << R"({"type":"discrete","target":[0.2,0.3,0.5],"proposal":[0.4,0.4,0.2]})";
  }
  REQUIRE(run({"spectrum", "--model", (dir / "model.json").string(), "--output", dir.string()}).code == 0);
  const auto r = rows(dir / "spectrum.csv");
  CHECK(r.size() == 9);
  CHECK(std::stod(r[3][1]) == doctest::Approx(1.0 - 1.0 / 2.5));
}

TEST_CASE("validate returns the failure count") {
  const Result r = run({"validate", "discrete"});
  CHECK(r.code == 0);
  CHECK(r.out.find("checks passed") != std::string::npos);
  const Result c = run({"validate", "coupling", "--replicas", "20000", "--seed", "7"});
  CHECK(c.code == 0);
}

TEST_CASE("output directory defaults to the environment variable") {
  const fs::path dir = scratch("env_default");
  setenv("IMHRATE_OUTPUT", dir.string().c_str(), 1);
  const Result r = run({"analyze", "--model", "registry:three_point", "--horizon", "5"});
  unsetenv("IMHRATE_OUTPUT");
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "tv.csv"));
}

TEST_CASE("argument and model errors") {
  CHECK(run({}).code != 0);
  CHECK(run({"analyze"}).code != 0);
  CHECK(run({"analyze", "--model", "registry:nope", "--output", scratch("e1").string()}).code == 2);
  CHECK(run({"spectrum", "--model", "registry:exponential", "--output", scratch("e2").string()}).code == 2);
  CHECK(run({"reproduce", "--figure", "nope"}).code != 0);
  CHECK(run({"analyze", "--model", "registry:three_point", "--epsilon", "2", "--output", scratch("e3").string()}).code == 2);
}
