#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spcdt {

/// Exit codes: 0 success, 2 input error (bad flags, unreadable or malformed
/// input), 1 anything else.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spcdt
