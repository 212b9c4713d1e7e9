// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace leam::cli {

// Runs the leam command line. Exit codes: 0 success, 1 validation or
// domain failure, 2 configuration/usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace leam::cli
