#pragma once

#include <string>
#include <vector>

namespace hartree {

/// Command-line front door; returns the process exit code.
/// 0 success, 1 invalid configuration or missing input, 2 collapse,
/// 3 non-convergence, 4 contract failure in a scan or verify run.
int run_cli(const std::vector<std::string>& args);

}  // namespace hartree
