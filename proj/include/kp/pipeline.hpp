#pragma once

#include "kp/io.hpp"

#include <string>

namespace kp {

// Exit codes: 0 success, 1 usage/configuration error, 2 numerical failure
// (blow-up guard, Newton divergence, lost bracket).
int run_pipeline(const std::string& subcommand, Config cfg);

} // namespace kp
