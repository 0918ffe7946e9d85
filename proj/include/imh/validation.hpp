// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace imh {

struct Check {
  std::string suite;
  std::string name;
  double value = 0.0;      // observed discrepancy (or z-score for Monte Carlo checks)
  double tolerance = 0.0;  // passes when value <= tolerance
  bool passed = false;
};

struct ValidationOptions {
  std::uint64_t seed = 7;
  int replicas = 20000;
};

/// Suites: "discrete", "general", "coupling", "all". Throws InvalidModel on
/// an unknown suite name.
std::vector<Check> run_validation(const std::string& suite, const ValidationOptions& opt = {});

}  // namespace imh
