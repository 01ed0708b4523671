#include "cspfolio/process.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <stdexcept>
#include <thread>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

namespace cspfolio {

ProcessResult run_shell_with_timeout(const std::string& command, double timeout_s,
                                     double grace_s) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();

    const pid_t pid = ::fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        ::setpgid(0, 0); // own process group so the timeout kill reaps children too
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid); // also from the parent side to avoid the startup race

    auto elapsed = [&] {
        return std::chrono::duration<double>(clock::now() - start).count();
    };

    ProcessResult res;
    bool termed = false, killed = false;
    for (;;) {
        int status = 0;
        const pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) {
            res.seconds = elapsed();
            if (WIFEXITED(status)) {
                res.exit_code = WEXITSTATUS(status);
            } else if (WIFSIGNALED(status)) {
                res.signaled = !res.timed_out;
            }
            return res;
        }
        if (r < 0 && errno != EINTR) throw std::runtime_error("waitpid failed");

        const double t = elapsed();
        if (!termed && t >= timeout_s) {
            res.timed_out = true;
            termed = true;
            ::kill(-pid, SIGTERM);
        } else if (termed && !killed && t >= timeout_s + grace_s) {
            killed = true;
            ::kill(-pid, SIGKILL);
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
}

} // namespace cspfolio
