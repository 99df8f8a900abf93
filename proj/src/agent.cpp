#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "a11yens/agent.hpp"
#include "a11yens/default_config.hpp"
#include "a11yens/runner.hpp"
#include "net_util.hpp"

namespace a11yens {

namespace {

bool should_stop(const AgentOptions& options) {
    return options.stopFlag && options.stopFlag->load();
}

// Sleeps in short slices so a raised stop flag cuts the nap short.
void nap(long long millis, const AgentOptions& options) {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(millis);
    while (std::chrono::steady_clock::now() < deadline && !should_stop(options)) {
        std::this_thread::sleep_for(std::chrono::milliseconds(25));
    }
}

void store_undelivered(const AgentOptions& options, const std::string& jobID,
                       const std::string& body) {
    std::error_code ec;
    std::filesystem::create_directories(options.undeliveredDir, ec);
    std::ofstream out(std::filesystem::path(options.undeliveredDir) / (jobID + ".json"),
                      std::ios::binary | std::ios::trunc);
    if (out) out << body;
}

}  // namespace

long long agent_loop(const std::string& serverURL, const std::string& agentID, int pollSeconds,
                     const AgentOptions& options) {
    ToolRegistry fallbackRegistry;
    RuleRegistry fallbackRules;
    const ToolRegistry* registry = options.registry;
    const RuleRegistry* rules = options.rules;
    if (!registry) {
        fallbackRegistry = default_tool_registry();
        registry = &fallbackRegistry;
    }
    if (!rules) {
        fallbackRules = RuleRegistry::with_builtin_rules();
        rules = &fallbackRules;
    }

    long long pollMillis =
        options.pollMillis > 0 ? options.pollMillis : static_cast<long long>(pollSeconds) * 1000;
    if (pollMillis < 1) pollMillis = 1000;

    auto [base, prefix] = detail::split_url(serverURL);
    std::string root = prefix == "/" ? "" : prefix;
    httplib::Client client(base);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);

    long long executed = 0;
    while (!should_stop(options) && (options.maxJobs < 0 || executed < options.maxJobs)) {
        httplib::Result res = client.Get(root + "/api/job?agent=" + pct_encode(agentID));
        if (!res || res->status == 204) {
            nap(pollMillis, options);
            continue;
        }
        if (res->status != 200) {
            nap(pollMillis, options);
            continue;
        }
        Parsed<Job> parsed = parse_job(res->body);
        if (!parsed.ok()) {
            // Undeliverable garbage job: drop it and keep polling.
            nap(pollMillis, options);
            continue;
        }
        Report report = run_job(*parsed.value, *registry, *rules, {agentID});
        std::string body = serialize_report(report);
        ++executed;
        bool posted = false;
        for (int attempt = 0; attempt < 2 && !posted; ++attempt) {
            httplib::Result post =
                client.Post(root + "/api/reports", body, "application/json");
            posted = post && post->status < 400;
        }
        if (!posted) store_undelivered(options, parsed.value->id, body);
    }
    return executed;
}

}  // namespace a11yens
