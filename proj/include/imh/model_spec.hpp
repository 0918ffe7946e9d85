// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <string>
#include <vector>

#include "imh/case_studies.hpp"

namespace imh {

/// A model resolved from a command-line source, with any known truths.
struct LoadedModel {
  std::string name;
  std::string source;
  RegistryModel model;
  std::vector<Truth> truths;
};

/// Splits "name?k=v&k2=v2" into the name and its parameters.
std::pair<std::string, Params> parse_registry_ref(const std::string& ref);

/// Parses a JSON model document. Accepted shapes:
///   {"type": "discrete", "target": [...], "proposal": [...]}
///   {"type": "general", "model": {"name": "...", "params": {...}}, "hints": {...}}
///   {"type": "matrix", "matrix": [[...], ...], "stationary": [...]}
/// Hints may set known_wstar, known_argmax, wstar_attained and
/// weight_monotone ("increasing", "decreasing", "none").
LoadedModel parse_model_json(const std::string& text, const std::string& source = "<json>");

/// Resolves "registry:<name>?k=v&..." or a path to a JSON model file.
LoadedModel load_model(const std::string& source);

}  // namespace imh
