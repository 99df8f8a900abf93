#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>

#include "subprocess.hpp"

namespace a11yens::detail {

std::string shell_quote(const std::string& raw) {
    std::string out = "'";
    for (char c : raw) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += "'";
    return out;
}

ExecResult run_with_timeout(const std::string& command, int timeoutSeconds,
                            const std::map<std::string, std::string>& env) {
    ExecResult result;
    int fds[2];
    if (pipe(fds) != 0) return result;

    pid_t pid = fork();
    if (pid < 0) {
        close(fds[0]);
        close(fds[1]);
        return result;
    }
    if (pid == 0) {
        setpgid(0, 0);  // own process group, so the whole pipeline can be killed
        close(fds[0]);
        dup2(fds[1], STDOUT_FILENO);
        close(fds[1]);
        for (const auto& [name, value] : env) {
            setenv(name.c_str(), value.c_str(), 1);
        }
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    close(fds[1]);
    auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(timeoutSeconds);
    char buffer[4096];
    bool open = true;
    while (open) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                        deadline - std::chrono::steady_clock::now())
                        .count();
        if (left <= 0) {
            result.timedOut = true;
            break;
        }
        struct pollfd pfd{fds[0], POLLIN, 0};
        int ready = poll(&pfd, 1, static_cast<int>(left));
        if (ready < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (ready == 0) {
            result.timedOut = true;
            break;
        }
        ssize_t got = read(fds[0], buffer, sizeof(buffer));
        if (got > 0) {
            result.output.append(buffer, static_cast<std::size_t>(got));
        } else if (got == 0) {
            open = false;
        } else if (errno != EINTR) {
            break;
        }
    }
    close(fds[0]);

    if (result.timedOut) {
        kill(-pid, SIGKILL);
    }
    int status = 0;
    waitpid(pid, &status, 0);
    if (!result.timedOut && WIFEXITED(status)) {
        result.exitCode = WEXITSTATUS(status);
    }
    return result;
}

}  // namespace a11yens::detail
