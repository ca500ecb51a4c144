#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

namespace vocablab::cli {

// Exit codes besides 0 (success) and 2 (usage). Library errors map by
// kind (3-13); pipeline stage failures map to 20 + stage position.
inline constexpr int kExitUnexpected = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitCheckFailed = 14;

int exit_code_for(const std::exception& e);

// Runs one command line (args[0] is the program name).
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, const char* const* argv);

}  // namespace vocablab::cli
