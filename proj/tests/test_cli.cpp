// Drives the installed CLI binary end to end. The binary path arrives via the
// A11YENS_CLI environment variable (set by the ctest target).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "a11yens/default_config.hpp"
#include "a11yens/reporting.hpp"
#include "a11yens/rule_engine.hpp"
#include "a11yens/scoring.hpp"
#include "test_support.hpp"

using namespace a11yens;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int exit = -1;
    std::string output;  // stdout and stderr combined
};

std::string cli_path() {
    const char* path = std::getenv("A11YENS_CLI");
    REQUIRE_MESSAGE(path != nullptr,
                    "A11YENS_CLI must point at the CLI binary (run via ctest)");
    return path;
}

CliRun run_cli(const std::string& args) {
    std::string cmd = "env -u ENSEMBLE_AGENT_ID \"" + cli_path() + "\" " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliRun result;
    std::array<char, 4096> chunk{};
    std::size_t got = 0;
    while ((got = fread(chunk.data(), 1, chunk.size(), pipe)) > 0) {
        result.output.append(chunk.data(), got);
    }
    int status = pclose(pipe);
    result.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string scratch_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("a11yens-cli-" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

Report read_report(const std::string& path) {
    auto parsed = parse_report(testsup::slurp(path));
    REQUIRE_MESSAGE(parsed.ok(), (path + " should hold a valid report"));
    return *parsed.value;
}

}  // namespace

TEST_CASE("run executes a fixture job and writes a valid report") {
    std::string dir = scratch_dir("run");
    CliRun run = run_cli("run --job fixtures/jobs/sample_job.json --out " + dir +
                         "/sample-bad.json");
    CHECK_MESSAGE(run.exit == 0, run.output);

    Report report = read_report(dir + "/sample-bad.json");
    CHECK(report.job.id == "sample-bad");
    CHECK(report.jobData.agent == "cli");
    const ToolResult& native = std::get<ToolResult>(report.actResults[2]);
    CHECK(native.standard.totals == std::array<long long, 4>{0, 1, 5, 5});
}

TEST_CASE("score prints the score JSON for a report") {
    std::string dir = scratch_dir("score");
    REQUIRE(run_cli("run --job fixtures/jobs/sample_job.json --out " + dir +
                    "/sample-bad.json").exit == 0);

    CliRun score = run_cli("score --report " + dir + "/sample-bad.json");
    CHECK(score.exit == 0);
    Report report = read_report(dir + "/sample-bad.json");
    std::string expected =
        score_to_json(score_report(report, default_catalog())).dump(2) + "\n";
    CHECK(score.output == expected);
    CHECK(score.output.find("87.01955") != std::string::npos);
}

TEST_CASE("score of a zero-instance report prints total 0") {
    std::string dir = scratch_dir("score-zero");
    std::ofstream(dir + "/job.json") << R"({
      "id": "zero",
      "timeStamp": "2025-06-01T12:00:00Z",
      "target": {"url": "file://fixtures/html/clean.html", "what": "clean"},
      "acts": [
        {"type": "navigate", "which": "file://fixtures/html/clean.html"},
        {"type": "test", "which": "native"}
      ]})";
    REQUIRE(run_cli("run --job " + dir + "/job.json --out " + dir + "/zero.json").exit == 0);

    CliRun score = run_cli("score --report " + dir + "/zero.json");
    CHECK(score.exit == 0);
    CHECK(score.output.find("\"total\": 0.0") != std::string::npos);
}

TEST_CASE("argument and input errors map to exit codes 1 and 2") {
    CHECK(run_cli("--help").exit == 0);
    CHECK(run_cli("run --help").exit == 0);

    CliRun missing = run_cli("run --out /tmp/x.json");
    CHECK(missing.exit == 1);
    CHECK(missing.output.find("--job") != std::string::npos);

    CliRun unknown = run_cli("frobnicate");
    CHECK(unknown.exit == 1);

    CliRun none = run_cli("");
    CHECK(none.exit == 1);

    std::string dir = scratch_dir("errors");
    CliRun unreadable = run_cli("run --job " + dir + "/not-there.json --out " + dir +
                                "/x.json");
    CHECK(unreadable.exit == 2);
    CHECK(unreadable.output.find("cannot read") != std::string::npos);

    std::ofstream(dir + "/garbage.json") << "this is not json";
    CliRun invalid = run_cli("run --job " + dir + "/garbage.json --out " + dir + "/x.json");
    CHECK(invalid.exit == 1);

    std::ofstream(dir + "/badjob.json") << R"({"id":"x","timeStamp":"t","acts":[]})";
    CHECK(run_cli("run --job " + dir + "/badjob.json --out " + dir + "/x.json").exit == 1);

    CHECK(run_cli("digest --report " + dir + "/not-there.json --out " + dir + "/d.html")
              .exit == 2);
    CHECK(run_cli("merge --out " + dir + "/m.json").exit == 1);  // no shard reports
}

TEST_CASE("digest renders a self-auditing HTML file") {
    std::string dir = scratch_dir("digest");
    REQUIRE(run_cli("run --job fixtures/jobs/sample_job.json --out " + dir +
                    "/sample-bad.json").exit == 0);
    CliRun digest = run_cli("digest --report " + dir + "/sample-bad.json --out " + dir +
                            "/sample-bad.html");
    CHECK_MESSAGE(digest.exit == 0, digest.output);

    std::string html = testsup::slurp(dir + "/sample-bad.html");
    CHECK(html.find("Accessibility digest: sample-bad") != std::string::npos);
    StandardResult audit = RuleRegistry::with_builtin_rules().run_rules(parse_html(html));
    CHECK(audit.totals == std::array<long long, 4>{0, 0, 0, 0});
}

TEST_CASE("make-jobs expands the script across the local target list") {
    std::string dir = scratch_dir("make-jobs");
    CliRun made = run_cli("make-jobs --script fixtures/jobs/script.json "
                          "--targets fixtures/jobs/targets.local.json --out-dir " + dir);
    CHECK_MESSAGE(made.exit == 0, made.output);
    for (const std::string id : {"audit-bad", "audit-clean", "audit-sunset", "audit-form"}) {
        CHECK_MESSAGE(fs::exists(dir + "/" + id + ".json"), (id + ".json should exist"));
    }
    auto parsed = parse_job(testsup::slurp(dir + "/audit-bad.json"));
    REQUIRE(parsed.ok());
    CHECK(parsed.value->acts[1].which == "file://fixtures/html/bad.html");
}

TEST_CASE("partition, run the shards, merge: same report as the direct run") {
    std::string dir = scratch_dir("shards");
    REQUIRE(run_cli("run --job fixtures/jobs/sample_job.json --out " + dir +
                    "/direct.json").exit == 0);

    CliRun split = run_cli("partition --job fixtures/jobs/sample_job.json --shards 2 "
                           "--out-dir " + dir);
    CHECK_MESSAGE(split.exit == 0, split.output);
    REQUIRE(fs::exists(dir + "/sample-bad.p1.json"));
    REQUIRE(fs::exists(dir + "/sample-bad.p2.json"));

    REQUIRE(run_cli("run --job " + dir + "/sample-bad.p1.json --out " + dir +
                    "/r1.json").exit == 0);
    REQUIRE(run_cli("run --job " + dir + "/sample-bad.p2.json --out " + dir +
                    "/r2.json").exit == 0);

    // Without --job the original is reconstructed from shard bookkeeping.
    CliRun merged = run_cli("merge --out " + dir + "/merged.json " + dir + "/r1.json " +
                            dir + "/r2.json");
    CHECK_MESSAGE(merged.exit == 0, merged.output);

    Report direct = read_report(dir + "/direct.json");
    Report recombined = read_report(dir + "/merged.json");
    testsup::erase_timing(direct);
    testsup::erase_timing(recombined);
    CHECK(serialize_report(recombined) == serialize_report(direct));

    // Passing the original job explicitly gives the same answer.
    CliRun viaJob = run_cli("merge --job fixtures/jobs/sample_job.json --out " + dir +
                            "/merged2.json " + dir + "/r1.json " + dir + "/r2.json");
    CHECK(viaJob.exit == 0);
    Report recombined2 = read_report(dir + "/merged2.json");
    testsup::erase_timing(recombined2);
    CHECK(serialize_report(recombined2) == serialize_report(direct));
}

TEST_CASE("compare renders the ranking page and the CSV export") {
    std::string dir = scratch_dir("compare");
    REQUIRE(run_cli("run --job fixtures/jobs/sample_job.json --out " + dir +
                    "/bad.json").exit == 0);
    std::ofstream(dir + "/cleanjob.json") << R"({
      "id": "clean-run",
      "timeStamp": "2025-06-01T12:00:00Z",
      "target": {"url": "file://fixtures/html/clean.html", "what": "clean"},
      "acts": [
        {"type": "navigate", "which": "file://fixtures/html/clean.html"},
        {"type": "test", "which": "native"}
      ]})";
    REQUIRE(run_cli("run --job " + dir + "/cleanjob.json --out " + dir +
                    "/clean.json").exit == 0);

    CliRun compared = run_cli("compare --out " + dir + "/compare.html --csv " + dir +
                              "/scores.csv " + dir + "/bad.json " + dir + "/clean.json");
    CHECK_MESSAGE(compared.exit == 0, compared.output);

    std::string html = testsup::slurp(dir + "/compare.html");
    // Ranked ascending: the clean run comes first.
    CHECK(html.find("<tr><td>1</td><td>clean-run</td>") != std::string::npos);
    CHECK(html.find("<tr><td>2</td><td>sample-bad</td>") != std::string::npos);
    StandardResult audit = RuleRegistry::with_builtin_rules().run_rules(parse_html(html));
    CHECK(audit.totals == std::array<long long, 4>{0, 0, 0, 0});

    std::string csv = testsup::slurp(dir + "/scores.csv");
    CHECK(csv.rfind("target,url,score,errorCount\r\n", 0) == 0);
    CHECK(csv.find("clean-run,file://fixtures/html/clean.html,0,0\r\n") != std::string::npos);
    CHECK(csv.find("sample-bad,") != std::string::npos);

    CHECK(run_cli("compare --out " + dir + "/empty.html").exit == 1);
}
