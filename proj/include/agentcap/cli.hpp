#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "agentcap/error.hpp"

namespace agentcap::cli {

/// 0 ok, 2 parse, 3 validation, 4 budget, 5 empty selection, 6 convergence,
/// 7 empty feasible set, 8 degenerate input, 9 singular Jacobian,
/// 10 unsupported cost / differentiability / interiority.
int exit_code(ErrorCode code);

/// "%.12g" with the C locale's '.' separator.
std::string format_double(double v);

/// Runs `agentcap <command> ...` with argv[0] the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace agentcap::cli
