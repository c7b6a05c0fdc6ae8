#pragma once

#include <iosfwd>

namespace othpo::cli {

// Entry point shared by the executable and the tests. Exit codes: 0 success,
// 1 usage/configuration error, 2 when some (method, seed) run aborted.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace othpo::cli
