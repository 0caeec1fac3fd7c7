#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tmu::cli {

// Exit codes
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kSingular = 3;

// Runs one invocation; data goes to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tmu::cli
