#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace ht::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kDomain = 2,
    kCapacity = 3,
    kCheckFailed = 4,
};

/// Runs one verb. `args` excludes the program name. Results go to `out`; errors go to `err` as a JSON object.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Worker count: hardware concurrency, capped by HT_THREADS when set.
unsigned thread_budget();

}  // namespace ht::cli
