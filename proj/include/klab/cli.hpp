#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace klab::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kSelftestFailed = 1;
inline constexpr int kInvalid = 2;
inline constexpr int kUnresolved = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// Exact-module invariant suite; one line per check on `log`.
bool selftest(std::ostream& log);

}  // namespace klab::cli
