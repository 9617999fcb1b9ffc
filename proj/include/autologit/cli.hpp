#pragma once

#include <iosfwd>

namespace autologit {

// Entry point of the command-line tool. Returns the process exit status:
// 0 success, 2 configuration error, 3 data validation error, 4 numerical
// failure, 1 anything unexpected.
int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace autologit
