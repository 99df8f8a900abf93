// Polling agent: fetches jobs from a job server, runs them, posts reports.
#pragma once

#include <atomic>
#include <string>

#include "a11yens/adapters.hpp"
#include "a11yens/rule_engine.hpp"

namespace a11yens {

struct AgentOptions {
    const ToolRegistry* registry = nullptr;  // default: embedded registry
    const RuleRegistry* rules = nullptr;     // default: builtin rule set
    std::string undeliveredDir = "undelivered";
    std::atomic<bool>* stopFlag = nullptr;   // checked between steps and while sleeping
    long long maxJobs = -1;                  // stop after this many jobs (<0: run forever)
    long long pollMillis = 0;                // overrides pollSeconds when > 0
};

// Poll loop: GET /api/job, run it, POST the report (one retry, then the
// report is written to undeliveredDir). Network errors put the agent back to
// sleep, never kill it. Returns the number of executed jobs.
long long agent_loop(const std::string& serverURL, const std::string& agentID, int pollSeconds,
                     const AgentOptions& options = {});

}  // namespace a11yens
