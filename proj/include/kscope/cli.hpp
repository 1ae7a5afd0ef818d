#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace kscope::cli {

// Parses "2", "-0.5", "2,1", "0.5+14.13i", "3-2i". Throws DomainError otherwise.
std::complex<double> parse_complex(const std::string& text);

// Runs one subcommand. Returns 0 on success, 1 on validation errors (including
// an unknown command), 2 on capacity/precision errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace kscope::cli
