#pragma once

#include <string>

namespace cspfolio {

struct ProcessResult {
    double seconds = 0;    // wall-clock time until exit or kill
    int exit_code = -1;    // valid when exited normally
    bool timed_out = false;
    bool signaled = false; // terminated by a signal (other than our timeout kill)
};

// Runs `command` through /bin/sh -c in its own process group, measured by a
// steady clock. At `timeout_s` the whole group gets SIGTERM, then SIGKILL
// after `grace_s`. Throws std::runtime_error when the process cannot be
// spawned at all.
ProcessResult run_shell_with_timeout(const std::string& command, double timeout_s,
                                     double grace_s = 2.0);

} // namespace cspfolio
