#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dsp {

enum ExitCode { kExitOk = 0, kExitVerify = 1, kExitInput = 2, kExitBudget = 3 };

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dsp
