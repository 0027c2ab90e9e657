#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dagbag::cli {

inline constexpr const char* kVersion = "0.1.0";

// Runs one command line (without the program name). Returns 0 on success,
// 2 on a usage error and 1 on a runtime error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dagbag::cli
