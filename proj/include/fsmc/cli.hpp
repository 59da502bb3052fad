#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fsmc {

/// Runs the command-line front end. Args exclude the program name.
/// Exit codes: 0 success, 1 a VIOLATED verdict was produced,
/// 2 configuration or validation error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fsmc
