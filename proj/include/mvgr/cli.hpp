// Copyright 2026 The mvgr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mvgr {

// Runs the command line tool. `args` excludes the program name. Normal
// output goes to `out`, logs and errors to `err`. Returns the exit status:
// 0 on success, 1 on a runtime error, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvgr
