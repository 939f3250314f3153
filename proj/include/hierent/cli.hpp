#pragma once

#include <ostream>

namespace hierent {

// Exit codes: 0 success, 1 row or estimator failures, 2 usage or config errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hierent
