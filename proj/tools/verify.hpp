#pragma once

#include <iosfwd>

// Cross-checks the library against the independent reference computations.
// Prints one line per check; returns the number of failed checks.
int run_verify(std::ostream& out);
