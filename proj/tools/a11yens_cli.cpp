// Command-line front end: one subcommand per pipeline stage.
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <unistd.h>

#include "a11yens/agent.hpp"
#include "a11yens/core_model.hpp"
#include "a11yens/default_config.hpp"
#include "a11yens/jobgen.hpp"
#include "a11yens/reporting.hpp"
#include "a11yens/runner.hpp"
#include "a11yens/scoring.hpp"
#include "a11yens/server.hpp"

namespace fs = std::filesystem;
using namespace a11yens;

namespace {

constexpr int kOk = 0;
constexpr int kBadInput = 1;
constexpr int kIoError = 2;

std::atomic<bool> gStop{false};

void on_signal(int) { gStop.store(true); }

int fail(int code, const std::string& message) {
    std::cerr << "a11yens: " << message << "\n";
    return code;
}

bool read_file(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

bool write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    return bool(out);
}

void print_parse_errors(const std::string& path, const std::vector<ParseError>& errors) {
    for (const auto& e : errors) std::cerr << path << ": " << e.message << "\n";
}

// Reads + parses a report file. Returns kOk and fills `report` on success.
int load_report_file(const std::string& path, Report& report) {
    std::string text;
    if (!read_file(path, text)) return fail(kIoError, "cannot read " + path);
    Parsed<Report> parsed = parse_report(text);
    if (!parsed.ok()) {
        print_parse_errors(path, parsed.errors);
        return kBadInput;
    }
    report = std::move(*parsed.value);
    return kOk;
}

int load_job_file(const std::string& path, Job& job) {
    std::string text;
    if (!read_file(path, text)) return fail(kIoError, "cannot read " + path);
    Parsed<Job> parsed = parse_job(text);
    if (!parsed.ok()) {
        print_parse_errors(path, parsed.errors);
        return kBadInput;
    }
    job = std::move(*parsed.value);
    return kOk;
}

// Registry/catalog come from the embedded defaults unless a file was named.
int load_registry(const std::string& path, ToolRegistry& registry) {
    if (path.empty()) {
        registry = default_tool_registry();
        return kOk;
    }
    if (!fs::exists(path)) return fail(kIoError, "cannot read " + path);
    Parsed<ToolRegistry> parsed = load_tool_registry(path);
    if (!parsed.ok()) {
        print_parse_errors(path, parsed.errors);
        return kBadInput;
    }
    registry = std::move(*parsed.value);
    return kOk;
}

int load_catalog_arg(const std::string& path, IssueCatalog& catalog) {
    if (path.empty()) {
        catalog = default_catalog();
        return kOk;
    }
    if (!fs::exists(path)) return fail(kIoError, "cannot read " + path);
    Parsed<IssueCatalog> parsed = load_catalog(path);
    if (!parsed.ok()) {
        print_parse_errors(path, parsed.errors);
        return kBadInput;
    }
    catalog = std::move(*parsed.value);
    return kOk;
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return (value && *value) ? value : fallback;
}

// ---------------------------------------------------------------------------

int cmd_run(const std::string& jobPath, const std::string& outPath,
            const std::string& toolsPath) {
    Job job;
    if (int rc = load_job_file(jobPath, job)) return rc;
    ToolRegistry registry;
    if (int rc = load_registry(toolsPath, registry)) return rc;
    RuleRegistry rules = RuleRegistry::with_builtin_rules();

    auto violations = validate_job(job, make_inventory(registry, rules));
    for (const auto& v : violations) {
        std::cerr << jobPath << ": act " << v.actIndex
                  << (v.level == ViolationLevel::error ? ": " : " (warning): ") << v.message
                  << "\n";
    }
    if (has_errors(violations)) return kBadInput;

    RunOptions options;
    options.agentID = env_or("ENSEMBLE_AGENT_ID", "cli");
    Report report = run_job(job, registry, rules, options);
    if (!write_file(outPath, serialize_report(report)))
        return fail(kIoError, "cannot write " + outPath);
    return kOk;
}

int cmd_make_jobs(const std::string& scriptPath, const std::string& targetsPath,
                  const std::string& outDir) {
    std::string text;
    if (!read_file(scriptPath, text)) return fail(kIoError, "cannot read " + scriptPath);
    json rawScript = json::parse(text, nullptr, false);
    if (rawScript.is_discarded()) return fail(kBadInput, scriptPath + ": invalid JSON");
    Parsed<Script> script = parse_script(rawScript);
    if (!script.ok()) {
        print_parse_errors(scriptPath, script.errors);
        return kBadInput;
    }

    if (!read_file(targetsPath, text)) return fail(kIoError, "cannot read " + targetsPath);
    json rawTargets = json::parse(text, nullptr, false);
    if (rawTargets.is_discarded()) return fail(kBadInput, targetsPath + ": invalid JSON");
    Parsed<TargetList> targets = parse_targets(rawTargets);
    if (!targets.ok()) {
        print_parse_errors(targetsPath, targets.errors);
        return kBadInput;
    }

    std::vector<Job> jobs;
    try {
        jobs = make_jobs(*script.value, *targets.value, now_utc());
    } catch (const std::invalid_argument& e) {
        return fail(kBadInput, e.what());
    }
    std::error_code ec;
    fs::create_directories(outDir, ec);
    for (const Job& job : jobs) {
        fs::path path = fs::path(outDir) / (job.id + ".json");
        if (!write_file(path.string(), serialize_job(job)))
            return fail(kIoError, "cannot write " + path.string());
    }
    return kOk;
}

int cmd_partition(const std::string& jobPath, int shards, const std::string& outDir) {
    Job job;
    if (int rc = load_job_file(jobPath, job)) return rc;
    std::vector<Job> pieces;
    try {
        pieces = partition(job, shards);
    } catch (const std::invalid_argument& e) {
        return fail(kBadInput, e.what());
    }
    std::error_code ec;
    fs::create_directories(outDir, ec);
    for (const Job& piece : pieces) {
        fs::path path = fs::path(outDir) / (piece.id + ".json");
        if (!write_file(path.string(), serialize_job(piece)))
            return fail(kIoError, "cannot write " + path.string());
    }
    return kOk;
}

// Rebuilds the pre-partition job from the shards' sourceActIndices bookkeeping
// so `merge` does not require the original job file (it may be passed with
// --job when available).
int reconstruct_original(const std::vector<Report>& shards, Job& original) {
    if (shards.empty()) return fail(kBadInput, "no shard reports given");
    const Job& first = shards.front().job;
    std::string baseID = first.id;
    if (auto dot = baseID.rfind(".p"); dot != std::string::npos)
        baseID = baseID.substr(0, dot);

    std::vector<std::optional<Act>> slots;
    for (const Report& shard : shards) {
        const json& extras = shard.job.extras;
        if (!extras.contains("sourceActIndices") || !extras["sourceActIndices"].is_array())
            return fail(kBadInput,
                        "shard " + shard.job.id +
                            " has no sourceActIndices; pass the original with --job");
        const json& indices = extras["sourceActIndices"];
        if (indices.size() != shard.job.acts.size())
            return fail(kBadInput, "shard " + shard.job.id + ": sourceActIndices misaligned");
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (!indices[i].is_number_unsigned())
                return fail(kBadInput, "shard " + shard.job.id + ": bad sourceActIndices");
            auto slot = indices[i].get<std::size_t>();
            if (slot >= slots.size()) slots.resize(slot + 1);
            if (!slots[slot]) slots[slot] = shard.job.acts[i];
        }
    }
    std::vector<Act> acts;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i])
            return fail(kBadInput, "act " + std::to_string(i) +
                                       " is covered by no shard; pass the original with --job");
        acts.push_back(std::move(*slots[i]));
    }
    original = first;
    original.id = baseID;
    original.acts = std::move(acts);
    original.extras.erase("sourceActIndices");
    return kOk;
}

int cmd_merge(const std::string& outPath, const std::vector<std::string>& shardPaths,
              const std::string& jobPath) {
    std::vector<Report> shards;
    for (const auto& path : shardPaths) {
        Report report;
        if (int rc = load_report_file(path, report)) return rc;
        shards.push_back(std::move(report));
    }
    Job original;
    if (!jobPath.empty()) {
        if (int rc = load_job_file(jobPath, original)) return rc;
    } else if (int rc = reconstruct_original(shards, original)) {
        return rc;
    }
    Report merged;
    try {
        merged = merge(shards, original);
    } catch (const std::invalid_argument& e) {
        return fail(kBadInput, e.what());
    }
    if (!write_file(outPath, serialize_report(merged)))
        return fail(kIoError, "cannot write " + outPath);
    return kOk;
}

int cmd_digest(const std::string& reportPath, const std::string& outPath,
               const std::string& catalogPath) {
    Report report;
    if (int rc = load_report_file(reportPath, report)) return rc;
    IssueCatalog catalog;
    if (int rc = load_catalog_arg(catalogPath, catalog)) return rc;
    if (!write_file(outPath, digest_html(report, catalog)))
        return fail(kIoError, "cannot write " + outPath);
    return kOk;
}

int cmd_compare(const std::string& outPath, const std::vector<std::string>& reportPaths,
                const std::string& catalogPath, const std::string& csvPath) {
    IssueCatalog catalog;
    if (int rc = load_catalog_arg(catalogPath, catalog)) return rc;
    std::vector<ScoreEntry> entries;
    for (const auto& path : reportPaths) {
        Report report;
        if (int rc = load_report_file(path, report)) return rc;
        ScoreEntry entry;
        entry.targetID = report.job.id;
        entry.url = report.job.target.url;
        entry.score = score_report(report, catalog);
        entry.errorCount = report.jobData.errorCount;
        entries.push_back(std::move(entry));
    }
    std::vector<ScoreEntry> ranking;
    try {
        ranking = compare_scores(std::move(entries));
    } catch (const std::invalid_argument& e) {
        return fail(kBadInput, e.what());
    }
    std::string html;
    try {
        html = compare_html(ranking);
    } catch (const std::invalid_argument& e) {
        return fail(kBadInput, e.what());
    }
    if (!write_file(outPath, html)) return fail(kIoError, "cannot write " + outPath);
    if (!csvPath.empty() && !write_file(csvPath, export_scores(ranking)))
        return fail(kIoError, "cannot write " + csvPath);
    return kOk;
}

int cmd_score(const std::string& reportPath, const std::string& catalogPath) {
    Report report;
    if (int rc = load_report_file(reportPath, report)) return rc;
    IssueCatalog catalog;
    if (int rc = load_catalog_arg(catalogPath, catalog)) return rc;
    std::cout << score_to_json(score_report(report, catalog)).dump(2) << "\n";
    return kOk;
}

int cmd_agent(const std::string& server, std::string id, int poll,
              const std::string& toolsPath, long long maxJobs) {
    if (id.empty()) id = "agent-" + std::to_string(getpid());
    ToolRegistry registry;
    if (int rc = load_registry(toolsPath, registry)) return rc;
    RuleRegistry rules = RuleRegistry::with_builtin_rules();
    AgentOptions options;
    options.registry = &registry;
    options.rules = &rules;
    options.stopFlag = &gStop;
    options.maxJobs = maxJobs;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    agent_loop(server, id, poll, options);
    return kOk;
}

int cmd_serve(int port, const std::string& dataDir) {
    JobServer server;
    if (!server.start(port, dataDir))
        return fail(kIoError, "cannot serve on port " + std::to_string(port));
    std::cout << "listening on " << server.port() << "\n" << std::flush;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!gStop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ensemble web accessibility audit engine"};
    app.require_subcommand(1);
    int rc = kOk;

    std::string jobPath, outPath, toolsPath, catalogPath, scriptPath, targetsPath, outDir;
    std::string reportPath, csvPath, serverURL, agentID, dataDir;
    std::vector<std::string> manyPaths;
    int shards = 1, poll = 30, port = 0;
    long long maxJobs = -1;

    auto* run = app.add_subcommand("run", "execute a job and write its report");
    run->add_option("--job", jobPath, "job JSON file")->required();
    run->add_option("--out", outPath, "report output file")->required();
    run->add_option("--tools", toolsPath, "tool registry JSON (default: embedded)");
    run->callback([&] { rc = cmd_run(jobPath, outPath, toolsPath); });

    auto* makeJobs = app.add_subcommand("make-jobs", "expand a script across targets");
    makeJobs->add_option("--script", scriptPath, "script JSON file")->required();
    makeJobs->add_option("--targets", targetsPath, "target list JSON file")->required();
    makeJobs->add_option("--out-dir", outDir, "directory for generated jobs")->required();
    makeJobs->callback([&] { rc = cmd_make_jobs(scriptPath, targetsPath, outDir); });

    auto* part = app.add_subcommand("partition", "split a job into shards");
    part->add_option("--job", jobPath, "job JSON file")->required();
    part->add_option("--shards", shards, "number of shards")->required();
    part->add_option("--out-dir", outDir, "directory for shard jobs")->required();
    part->callback([&] { rc = cmd_partition(jobPath, shards, outDir); });

    auto* mergeCmd = app.add_subcommand("merge", "merge shard reports into one report");
    mergeCmd->add_option("--out", outPath, "merged report output file")->required();
    mergeCmd->add_option("--job", jobPath, "original (pre-partition) job file");
    mergeCmd->add_option("shards", manyPaths, "shard report files")->required();
    mergeCmd->callback([&] { rc = cmd_merge(outPath, manyPaths, jobPath); });

    auto* digest = app.add_subcommand("digest", "render an HTML digest of a report");
    digest->add_option("--report", reportPath, "report JSON file")->required();
    digest->add_option("--out", outPath, "HTML output file")->required();
    digest->add_option("--catalog", catalogPath, "issue catalog JSON (default: embedded)");
    digest->callback([&] { rc = cmd_digest(reportPath, outPath, catalogPath); });

    auto* compare = app.add_subcommand("compare", "rank reports into a comparative page");
    compare->add_option("--out", outPath, "HTML output file")->required();
    compare->add_option("--catalog", catalogPath, "issue catalog JSON (default: embedded)");
    compare->add_option("--csv", csvPath, "also export the ranking as CSV");
    compare->add_option("reports", manyPaths, "report JSON files")->required();
    compare->callback([&] { rc = cmd_compare(outPath, manyPaths, catalogPath, csvPath); });

    auto* score = app.add_subcommand("score", "print a report's score as JSON");
    score->add_option("--report", reportPath, "report JSON file")->required();
    score->add_option("--catalog", catalogPath, "issue catalog JSON (default: embedded)");
    score->callback([&] { rc = cmd_score(reportPath, catalogPath); });

    auto* agent = app.add_subcommand("agent", "poll a job server and execute jobs");
    agent->add_option("--server", serverURL, "job server URL")
        ->envname("ENSEMBLE_SERVER_URL")
        ->required();
    agent->add_option("--id", agentID, "agent identifier")->envname("ENSEMBLE_AGENT_ID");
    agent->add_option("--poll", poll, "poll interval in seconds")
        ->envname("ENSEMBLE_POLL_SECONDS");
    agent->add_option("--tools", toolsPath, "tool registry JSON (default: embedded)");
    agent->add_option("--max-jobs", maxJobs, "exit after this many jobs (testing aid)");
    agent->callback([&] { rc = cmd_agent(serverURL, agentID, poll, toolsPath, maxJobs); });

    auto* serve = app.add_subcommand("serve", "run the job server");
    serve->add_option("--port", port, "TCP port (0 picks a free port)")->required();
    serve->add_option("--data", dataDir, "directory for received reports")->required();
    serve->callback([&] { rc = cmd_serve(port, dataDir); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    } catch (const std::exception& e) {
        std::cerr << "a11yens: " << e.what() << "\n";
        return kBadInput;
    }
    return rc;
}
