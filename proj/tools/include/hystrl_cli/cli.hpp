#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <hystrl/error.hpp>

namespace hystrl::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRunDiverged = 3, kCheckFailed = 4 };

[[nodiscard]] int exit_code_for(Errc code) noexcept;

/// Whole command line minus argv[0]. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hystrl::cli
