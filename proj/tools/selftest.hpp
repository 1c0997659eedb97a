#pragma once

#include <iosfwd>

namespace nspf::cli {

/// Runs the quick property checks, one PASS/FAIL line each. Returns the
/// number of failures.
int run_selftest(std::ostream& out);

}  // namespace nspf::cli
