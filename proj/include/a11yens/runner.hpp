// Job execution: performs a job's acts in order against the tool registry
// and the built-in rule engine, then elaborates the results into a report.
#pragma once

#include <string>

#include "a11yens/adapters.hpp"
#include "a11yens/core_model.hpp"
#include "a11yens/rule_engine.hpp"

namespace a11yens {

struct RunOptions {
    std::string agentID;
    int maxConcurrent = 4;  // cap on simultaneously running external tools
};

// Executes the job: launch/wait are bookkeeping, navigate fetches and parses
// the target page (file:// or http(s)://, 15 s timeout), test acts run the
// builtin engine on the cached tree or invoke and normalize an external tool.
// A failed navigate prevents every following test act until a navigate
// succeeds again. Always returns a Report.
Report run_job(const Job& job, const ToolRegistry& registry, const RuleRegistry& rules,
               const RunOptions& options = {});

}  // namespace a11yens
