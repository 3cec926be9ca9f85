#pragma once

#include <iosfwd>

namespace fheston::cli {

/// Entry point of the fheston command-line tool. Results go to out as CSV
/// (default) or JSON; errors go to err as a one-line JSON object.
/// Returns 0 on success, 2 on invalid input, 1 on numerical failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fheston::cli
