// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace imh::cli {

/// Exit codes: 0 success, 2 model error, 3 numerical failure; `validate`
/// returns the number of failed checks (capped at 100). Argument errors use
/// the parser's own codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace imh::cli
