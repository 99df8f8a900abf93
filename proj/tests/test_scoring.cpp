#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "a11yens/default_config.hpp"
#include "a11yens/rule_engine.hpp"
#include "a11yens/scoring.hpp"
#include "test_support.hpp"

using namespace a11yens;

namespace {

IssueGroup group_with(int maxSeverity, long long maxCount) {
    IssueGroup group;
    group.issueID = "g";
    group.maxSeverity = maxSeverity;
    group.maxCount = maxCount;
    return group;
}

// Native-only report over a fixture page, built without any subprocesses.
Report native_report(const std::string& htmlPath, const std::string& targetID) {
    Report report;
    report.job.id = "score-" + targetID;
    report.job.timeStamp = "2025-06-01T12:00:00Z";
    report.job.target = {"file://" + htmlPath, targetID};
    report.job.acts.push_back({ActType::navigate, "file://" + htmlPath, "", std::nullopt,
                               "", {}});
    report.job.acts.push_back({ActType::test, "native", "", std::nullopt, "", {}});
    report.actResults.emplace_back(NavOutcome{true, "loaded", 12});

    DocTree tree = parse_html(testsup::slurp(htmlPath));
    ToolResult tool;
    tool.toolCode = "native";
    tool.native = json::object();
    tool.standard = RuleRegistry::with_builtin_rules().run_rules(tree);
    report.actResults.emplace_back(std::move(tool));
    report.jobData = {"2025-06-01T12:00:00Z", "2025-06-01T12:00:01Z", 1, "t", 0};
    return report;
}

IssueCatalog scaled_catalog(double factor) {
    json config = json::parse(testsup::slurp("config/catalog.json"));
    for (json& issue : config["issues"]) {
        issue["weight"] = issue.value("weight", 1.0) * factor;
    }
    auto parsed = parse_catalog(config);
    REQUIRE(parsed.ok());
    return *parsed.value;
}

}  // namespace

TEST_CASE("score_issue evaluates the documented formula") {
    CHECK(score_issue(group_with(3, 0), 1.0) == 0.0);
    CHECK(score_issue(group_with(3, 1), 1.0) == doctest::Approx(4.0));
    CHECK(score_issue(group_with(2, 3), 2.0) == doctest::Approx(12.0));
    CHECK(score_issue(group_with(0, 1), 1.0) == doctest::Approx(1.0));
    // Count damping is logarithmic: 240 findings score ~7.9x one finding.
    CHECK(score_issue(group_with(0, 240), 1.0) ==
          doctest::Approx(std::log2(241.0)));
}

TEST_CASE("scoring an empty report yields zero") {
    Report report = native_report("fixtures/html/clean.html", "clean");
    Score score = score_report(report, default_catalog());
    CHECK(score.total == 0.0);
    CHECK(score.components.empty());
    CHECK(score.formulaVersion == std::string(kScoreFormulaVersion));
    CHECK(score.catalogVersion == default_catalog().version);
}

TEST_CASE("bad.html scores to the hand-computed ledger") {
    Report report = native_report("fixtures/html/bad.html", "bad");
    Score score = score_report(report, default_catalog());

    // Spreadsheet over the audited groups (weight x (1+sev) x log2(1+count)):
    const double imageNoAlt = 3 * 4 * std::log2(3.0);  // two images, severity 3
    const double buttonNoName = 3 * 4 * 1;
    const double inputNoLabel = 3 * 4 * 1;
    const double linkNoName = 3 * 4 * 1;
    const double docLangMissing = 2 * 3 * 1;
    const double duplicateID = 2 * 3 * 1;
    const double iframeNoTitle = 2 * 3 * 1;
    const double internalLinkBroken = 2 * 3 * 1;
    const double titleMissing = 2 * 3 * 1;
    const double headingSkip = 1 * 2 * 1;

    CHECK(score.components.size() == 10);
    CHECK(score.components.at("imageNoAlt") == doctest::Approx(imageNoAlt).epsilon(1e-12));
    CHECK(score.components.at("headingSkip") == doctest::Approx(headingSkip));
    CHECK(score.total ==
          doctest::Approx(imageNoAlt + buttonNoName + inputNoLabel + linkNoName +
                          docLangMissing + duplicateID + iframeNoTitle +
                          internalLinkBroken + titleMissing + headingSkip)
              .epsilon(1e-12));
    CHECK(format_score(score.total) == "87.0195500086539");

    // Determinism: scoring twice gives the identical Score.
    Score again = score_report(report, default_catalog());
    CHECK(again.total == score.total);
    CHECK(again.components == score.components);

    // Totals are the sum of components.
    double sum = 0.0;
    for (const auto& [id, value] : score.components) sum += value;
    CHECK(score.total == doctest::Approx(sum).epsilon(1e-9));
}

TEST_CASE("score ignores native payloads and prevented results") {
    Report report = native_report("fixtures/html/bad.html", "bad");
    double before = score_report(report, default_catalog()).total;

    ToolResult& tool = std::get<ToolResult>(report.actResults[1]);
    tool.native = json{{"garbage", {1, 2, 3}}, {"score", 1e9}};
    CHECK(score_report(report, default_catalog()).total == before);

    tool.standard.prevented = true;
    tool.error = "timeout";
    CHECK(score_report(report, default_catalog()).total == 0.0);
}

TEST_CASE("score_to_json carries total, components, parameters") {
    Report report = native_report("fixtures/html/bad.html", "bad");
    Score score = score_report(report, default_catalog());
    ojson out = score_to_json(score);
    CHECK(out["total"].get<double>() == score.total);
    CHECK(out["components"].size() == 10);
    CHECK(out["components"]["imageNoAlt"].get<double>() ==
          score.components.at("imageNoAlt"));
    CHECK(out["parameters"]["formulaVersion"] == "1");
    CHECK(out["parameters"]["catalogVersion"] == default_catalog().version);
}

TEST_CASE("compare_scores ranks ascending with lexicographic ties") {
    auto entry = [](const std::string& id, double total) {
        ScoreEntry e;
        e.targetID = id;
        e.url = "https://example.org/" + id;
        e.score.total = total;
        return e;
    };

    auto ranked = compare_scores({entry("a", 5), entry("b", 3)});
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].targetID == "b");
    CHECK(ranked[1].targetID == "a");

    ranked = compare_scores({entry("b", 5), entry("a", 5)});
    CHECK(ranked[0].targetID == "a");
    CHECK(ranked[1].targetID == "b");

    ranked = compare_scores({entry("solo", 7)});
    REQUIRE(ranked.size() == 1);
    CHECK(ranked[0].targetID == "solo");
    CHECK(ranked[0].url == "https://example.org/solo");

    CHECK(compare_scores({}).empty());
    CHECK_THROWS_AS(compare_scores({entry("dup", 1), entry("dup", 2)}),
                    std::invalid_argument);
}

TEST_CASE("adding an instance never lowers the total (fuzzed)") {
    IssueCatalog catalog = default_catalog();
    std::mt19937 rng(271828);
    int mutated = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Report report = testsup::random_report(rng);
        double before = score_report(report, catalog).total;

        std::vector<ToolResult*> live;
        for (ActResult& result : report.actResults) {
            ToolResult* tool = std::get_if<ToolResult>(&result);
            if (tool && !tool->standard.prevented) live.push_back(tool);
        }
        if (live.empty()) continue;
        ToolResult* victim = live[rng() % live.size()];
        victim->standard.instances.push_back(testsup::random_instance(rng));
        recompute_totals(victim->standard);
        ++mutated;

        double after = score_report(report, catalog).total;
        CHECK(after >= before - 1e-9);
    }
    CHECK(mutated > 100);  // the fuzz actually exercised the mutation
}

TEST_CASE("weights scale the total and never reorder the ranking") {
    IssueCatalog base = default_catalog();
    IssueCatalog doubled = scaled_catalog(2.0);
    IssueCatalog tenx = scaled_catalog(10.0);

    std::vector<std::string> pages = {"fixtures/html/bad.html",
                                      "fixtures/html/form.html",
                                      "fixtures/html/sunset.html",
                                      "fixtures/html/clean.html"};
    std::vector<ScoreEntry> plain, scaled;
    for (const std::string& page : pages) {
        std::string id = page.substr(page.rfind('/') + 1);
        Report report = native_report(page, id);
        double total = score_report(report, base).total;
        CHECK(score_report(report, doubled).total ==
              doctest::Approx(2.0 * total).epsilon(1e-9));
        plain.push_back({id, page, score_report(report, base), 0});
        scaled.push_back({id, page, score_report(report, tenx), 0});
    }
    auto rankedPlain = compare_scores(plain);
    auto rankedScaled = compare_scores(scaled);
    REQUIRE(rankedPlain.size() == rankedScaled.size());
    for (std::size_t i = 0; i < rankedPlain.size(); ++i) {
        CHECK(rankedPlain[i].targetID == rankedScaled[i].targetID);
    }
    // Sanity on the fixture ordering itself: clean is best, bad is worst.
    CHECK(rankedPlain.front().targetID == "clean.html");
    CHECK(rankedPlain.back().targetID == "bad.html");
}

TEST_CASE("format_score renders stable short decimals") {
    CHECK(format_score(0.0) == "0");
    CHECK(format_score(12.0) == "12");
    CHECK(format_score(0.5) == "0.5");
    CHECK(format_score(4 * std::log2(3.0)) == "6.33985000288462");
    // Round-trip: the rendering carries enough digits to reparse exactly
    // for typical score magnitudes.
    for (double value : {87.01955000865388, 1e-3, 123456.789}) {
        CHECK(std::stod(format_score(value)) == doctest::Approx(value).epsilon(1e-14));
    }
}
