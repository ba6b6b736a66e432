#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace derivkit::cli {

/// Exit status: 0 success, 1 a mathematical check failed, 2 bad input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace derivkit::cli
