#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "icelab/correlation.hpp"

namespace icelab::cli {

enum ExitCode : int {
    kOk = 0,
    kCheckFailed = 1,
    kUsage = 2,
    kResource = 3,
};

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "C=1,A=-0.5+0.866i,T=cis(2/3)"; "roots" gives the k-th symbol the value
/// exp(2 pi i k / K) over the K non-spacer symbols.
LabelMap parse_labels(const std::string& text, const Alphabet& alphabet);

/// "1", "-2.5", "0.5-0.25i", "i", "cis(1/3)" = exp(2 pi i / 3).
std::complex<double> parse_complex(const std::string& text);

/// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace icelab::cli
