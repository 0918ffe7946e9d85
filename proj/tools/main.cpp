// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The imhrate Authors

#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  return imh::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
