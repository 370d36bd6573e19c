#pragma once

#include <ostream>
#include <string>

namespace hmslope::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsage = 2, kIo = 3 };

/// Parses "<num>pi", "<p>/<q>pi", "pi" (optionally signed) into radians.
/// Throws std::invalid_argument on anything else.
double parse_angle(const std::string& text);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hmslope::cli
