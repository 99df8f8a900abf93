#pragma once

#include <map>
#include <string>

namespace a11yens::detail {

struct ExecResult {
    int exitCode = -1;
    bool timedOut = false;
    std::string output;  // captured standard output
};

// Runs `command` through /bin/sh with extra environment variables, capturing
// standard output. The process group is killed after timeoutSeconds.
ExecResult run_with_timeout(const std::string& command, int timeoutSeconds,
                            const std::map<std::string, std::string>& env);

std::string shell_quote(const std::string& raw);

}  // namespace a11yens::detail
