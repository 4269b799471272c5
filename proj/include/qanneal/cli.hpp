#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qanneal/hamiltonian.hpp"

namespace qanneal {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< numerical failure or I/O error
inline constexpr int kExitUsage = 2;    ///< bad arguments or invalid input

/// Runs the command line with `args` excluding the program name. Errors are reported on
/// `err` as a first line of the form "error[<code>]: <message>".
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Inline model: `i,j=coeff` and `i=coeff` items separated by ';', e.g. "1,2=-1;1=0.5".
IsingModel parse_inline_model(std::string_view spec);

/// "0.1,1,10" or "logspace:lo:hi:count".
std::vector<double> parse_time_list(std::string_view spec);

}  // namespace qanneal
