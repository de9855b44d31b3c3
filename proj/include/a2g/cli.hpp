#pragma once

#include <optional>
#include <ostream>
#include <string>

namespace a2g {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 1,
    kExitRuntime = 2,
    kExitSelftest = 3,
};

// Parses a worker-count string as read from A2G_THREADS. Empty or absent
// means "use the default". Throws ConfigError when malformed.
std::optional<unsigned> parse_thread_count(const char* text);

// Entry point behind the a2g executable. argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace a2g
