// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "mvgr/cli.hpp"

int main(int argc, char** argv) {
  return mvgr::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
