#pragma once

#include <iosfwd>

namespace stcmac::cli {

// Runs the stcmac command line. Returns the process exit code:
// 0 success, 2 invalid configuration or arguments, 3 numerical failure, 1 anything else.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stcmac::cli
