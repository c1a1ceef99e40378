#pragma once

#include <cstdint>
#include <iosfwd>

// Small-instance equivalence checks against exhaustive enumeration.
// Returns the number of failed suites.
int run_selftest(std::ostream& out, std::uint64_t seed);
