// cli.hpp - command-line surface: automaton utilities (`ma ...`), the
// learners (`infer ...`), and the experiment harness (`experiment run`).
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsl {

// Parses and executes one command line (program name excluded).  Results
// go to out, diagnostics to err; the return value is the process exit
// code — 1 with a one-line message for any domain or file error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace rsl
