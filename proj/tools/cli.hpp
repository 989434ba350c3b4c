#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "treeknap/error.hpp"

namespace treeknap::cli {

// Exit codes.
inline constexpr int kSolved = 0;
inline constexpr int kInfeasible = 1;  // also: compare found a mismatch
inline constexpr int kInvalid = 2;     // parse or validation error
inline constexpr int kContract = 3;    // internal contract violation

int exit_code_for(const Error& error);

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace treeknap::cli
