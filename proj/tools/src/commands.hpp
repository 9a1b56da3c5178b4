#pragma once

#include <iosfwd>

namespace smm::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kConfigError = 2,
    kNumericError = 3,
    kVersionError = 4,
};

/// Parses argv and dispatches to gen, train, eval or bench.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smm::cli
