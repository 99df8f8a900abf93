#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>

#include "a11yens/default_config.hpp"
#include "a11yens/ensemble.hpp"
#include "test_support.hpp"

using namespace a11yens;

namespace {

IssueCatalog catalog_from(const char* text) {
    auto parsed = parse_catalog(json::parse(text));
    REQUIRE_MESSAGE(parsed.ok(), "catalog should load");
    return *parsed.value;
}

Instance simple_instance(const std::string& ruleID, int severity, long long count = 1) {
    Instance inst;
    inst.ruleID = ruleID;
    inst.what = ruleID;
    inst.count = count;
    inst.ordinalSeverity = severity;
    inst.location = {LocationDoc::dom, LocationType::none, ""};
    inst.excerpt = "<div data-rule=\"" + ruleID + "\">";
    return inst;
}

// A one-navigate report with one ToolResult per (tool, instances) pair.
Report report_with(const std::vector<std::pair<std::string, std::vector<Instance>>>& tools) {
    Report report;
    report.job.id = "synthetic";
    report.job.timeStamp = "2025-06-01T12:00:00Z";
    report.job.target = {"https://example.org/", "synthetic"};
    for (const auto& [tool, instances] : tools) {
        report.job.acts.push_back({ActType::test, tool, "", std::nullopt, "", {}});
        ToolResult result;
        result.toolCode = tool;
        result.native = json::object();
        result.standard.instances = instances;
        recompute_totals(result.standard);
        report.actResults.emplace_back(std::move(result));
    }
    report.jobData = {"2025-06-01T12:00:00Z", "2025-06-01T12:00:01Z", 1, "t", 0};
    return report;
}

}  // namespace

TEST_CASE("the starter catalog carries the documented classifier mappings") {
    IssueCatalog catalog = default_catalog();
    const IssueMapEntry* entry = catalog.find("internalLinkBroken");
    REQUIRE(entry != nullptr);
    CHECK(entry->wcag == "1.3.1");

    CHECK(classify(catalog, "htmlcs", "AAA.2_4_1.G1,G123,G124.NoSuchID") ==
          "internalLinkBroken");
    CHECK(classify(catalog, "wave", "link_internal_broken") == "internalLinkBroken");
    CHECK(classify(catalog, "native", "internalLinkBroken") == "internalLinkBroken");

    // config/catalog.json carries the identical content.
    auto fromFile = load_catalog("config/catalog.json");
    REQUIRE(fromFile.ok());
    CHECK(fromFile.value->issues.size() == catalog.issues.size());
    CHECK(fromFile.value->version == catalog.version);
}

TEST_CASE("classify falls back to synthetic unclassified ids") {
    IssueCatalog catalog = default_catalog();
    CHECK(classify(catalog, "axe", "made-up-rule") == "unclassified:axe:made-up-rule");
    // Tool identity matters: another tool's literal does not leak across.
    CHECK(classify(catalog, "axe", "link_internal_broken") ==
          "unclassified:axe:link_internal_broken");
}

TEST_CASE("an empty catalog classifies everything unclassified") {
    IssueCatalog catalog = catalog_from(R"({"issues": []})");
    CHECK(classify(catalog, "axe", "image-alt") == "unclassified:axe:image-alt");
    CHECK(catalog.jaccardThreshold == doctest::Approx(0.8));
}

TEST_CASE("exact patterns beat prefixes") {
    // A literal claim inside a prefix's shadow is legal and takes precedence;
    // nested prefixes may only coexist inside one issue (see ambiguity test).
    IssueCatalog catalog = catalog_from(R"({
      "issues": [
        {"issueID": "general", "ruleRefs": [{"tool": "t", "pattern": "AAA.*"},
                                             {"tool": "t", "pattern": "AAA.1_1_1.*"}]},
        {"issueID": "exactly", "ruleRefs": [{"tool": "t", "pattern": "AAA.1_1_1.H37"}]}
      ]})");
    CHECK(classify(catalog, "t", "AAA.1_1_1.H37") == "exactly");
    CHECK(classify(catalog, "t", "AAA.1_1_1.H36") == "general");
    CHECK(classify(catalog, "t", "AAA.9_9_9.X") == "general");
    CHECK(classify(catalog, "t", "AAA.1_1_1.H37x") == "general");  // not exact
    CHECK(classify(catalog, "t", "BBB") == "unclassified:t:BBB");
}

TEST_CASE("catalog load rejects ambiguity and malformed entries") {
    auto ambiguous = parse_catalog(json::parse(R"({
      "issues": [
        {"issueID": "a", "ruleRefs": [{"tool": "wave", "pattern": "link_internal_broken"}]},
        {"issueID": "b", "ruleRefs": [{"tool": "wave", "pattern": "link_internal_broken"}]}
      ]})"));
    CHECK_FALSE(ambiguous.ok());
    REQUIRE_FALSE(ambiguous.errors.empty());
    CHECK(ambiguous.errors[0].message.find("ambiguous") != std::string::npos);

    // Overlapping prefixes across issues are also ambiguous.
    auto prefixes = parse_catalog(json::parse(R"({
      "issues": [
        {"issueID": "a", "ruleRefs": [{"tool": "t", "pattern": "AAA.*"}]},
        {"issueID": "b", "ruleRefs": [{"tool": "t", "pattern": "AAA.1_1_1.*"}]}
      ]})"));
    CHECK_FALSE(prefixes.ok());

    // ...but inside one issue they are fine.
    CHECK(parse_catalog(json::parse(R"({
      "issues": [
        {"issueID": "a", "ruleRefs": [{"tool": "t", "pattern": "AAA.*"},
                                       {"tool": "t", "pattern": "AAA.1_1_1.*"}]}
      ]})")).ok());

    auto dupID = parse_catalog(json::parse(R"({
      "issues": [{"issueID": "a"}, {"issueID": "a"}]})"));
    CHECK_FALSE(dupID.ok());

    CHECK_FALSE(parse_catalog(json::parse(R"({"issues": [
      {"issueID": "a", "weight": -1}]})")).ok());
    CHECK_FALSE(parse_catalog(json::parse(R"({"issues": [
      {"issueID": "a", "ruleRefs": [{"tool": "t", "pattern": "a*b"}]}]})")).ok());
    CHECK_FALSE(parse_catalog(json::parse(R"({"issues": [
      {"issueID": "a", "ruleRefs": [{"pattern": "x"}]}]})")).ok());
    CHECK_FALSE(parse_catalog(json::parse(R"({"jaccardThreshold": 2, "issues": []})")).ok());
}

TEST_CASE("classification is stable under catalog re-serialization") {
    json config = json::parse(testsup::slurp("config/catalog.json"));
    IssueCatalog first = *parse_catalog(config).value;
    IssueCatalog second = *parse_catalog(json::parse(config.dump())).value;
    for (const IssueMapEntry& issue : first.issues) {
        for (const RuleRef& ref : issue.ruleRefs) {
            if (ref.pattern.find('*') != std::string::npos) continue;
            CHECK(classify(first, ref.tool, ref.pattern) ==
                  classify(second, ref.tool, ref.pattern));
            CHECK(classify(first, ref.tool, ref.pattern) == issue.issueID);
        }
    }
}

TEST_CASE("gather keeps divergent per-tool counts side by side") {
    IssueCatalog catalog = catalog_from(R"({
      "issues": [{"issueID": "contrastLow", "wcag": "1.4.3",
                  "ruleRefs": [{"tool": "toolA", "pattern": "contrast-a"},
                               {"tool": "toolB", "pattern": "contrast-b"}]}]})");
    Report report = report_with({
        {"toolA", {simple_instance("contrast-a", 2, 2)}},
        {"toolB", {simple_instance("contrast-b", 2, 240)}},
    });
    std::vector<IssueGroup> groups = gather(report, catalog);
    REQUIRE(groups.size() == 1);
    const IssueGroup& group = groups[0];
    CHECK(group.issueID == "contrastLow");
    CHECK(group.perToolCounts == std::map<std::string, long long>{{"toolA", 2},
                                                                  {"toolB", 240}});
    CHECK(group.maxCount == 240);
    CHECK(group.maxSeverity == 2);
}

TEST_CASE("gather skips prevented tools and merges same-issue rules") {
    IssueCatalog catalog = default_catalog();
    Report report = report_with({
        {"native", {simple_instance("imageNoAlt", 3), simple_instance("imageNoAlt", 3)}},
        {"axe", {simple_instance("image-alt", 3)}},
        {"wave", {}},
    });
    // Make the wave result prevented with a finding that must NOT count.
    ToolResult& wave = std::get<ToolResult>(report.actResults[2]);
    wave.standard.instances.push_back(simple_instance("alt_missing", 3));
    recompute_totals(wave.standard);
    wave.standard.prevented = true;
    wave.error = "timeout";

    std::vector<IssueGroup> groups = gather(report, catalog);
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].issueID == "imageNoAlt");
    CHECK(groups[0].perToolCounts ==
          std::map<std::string, long long>{{"native", 2}, {"axe", 1}});
    CHECK(groups[0].maxCount == 2);
    CHECK(groups[0].instances.size() == 3);

    // All tools prevented -> nothing to report.
    for (ActResult& result : report.actResults) {
        std::get<ToolResult>(result).standard.prevented = true;
    }
    CHECK(gather(report, catalog).empty());
}

TEST_CASE("gather sorts by descending severity then issueID") {
    IssueCatalog catalog = catalog_from(R"({
      "issues": [
        {"issueID": "zAlpha", "ruleRefs": [{"tool": "t", "pattern": "z"}]},
        {"issueID": "aAlpha", "ruleRefs": [{"tool": "t", "pattern": "a"}]},
        {"issueID": "hot", "ruleRefs": [{"tool": "t", "pattern": "h"}]}
      ]})");
    Report report = report_with({{"t", {simple_instance("z", 1), simple_instance("a", 1),
                                        simple_instance("h", 3)}}});
    std::vector<IssueGroup> groups = gather(report, catalog);
    REQUIRE(groups.size() == 3);
    CHECK(groups[0].issueID == "hot");
    CHECK(groups[1].issueID == "aAlpha");
    CHECK(groups[2].issueID == "zAlpha");
}

TEST_CASE("gather conserves counts per tool (fuzzed)") {
    IssueCatalog catalog = default_catalog();
    std::mt19937 rng(31337);
    for (int trial = 0; trial < 100; ++trial) {
        Report report = testsup::random_report(rng);
        std::map<std::string, long long> direct;
        for (const ActResult& result : report.actResults) {
            const ToolResult* tool = std::get_if<ToolResult>(&result);
            if (!tool || tool->standard.prevented) continue;
            for (const Instance& inst : tool->standard.instances) {
                direct[tool->toolCode] += inst.count;
            }
        }
        std::map<std::string, long long> gathered;
        for (const IssueGroup& group : gather(report, catalog)) {
            for (const auto& [tool, count] : group.perToolCounts) gathered[tool] += count;
        }
        CHECK(gathered == direct);
    }
}

TEST_CASE("ensemble complementarity: two one-eyed tools beat either alone") {
    IssueCatalog catalog = catalog_from(R"({
      "issues": [
        {"issueID": "left", "ruleRefs": [{"tool": "toolA", "pattern": "only-a"}]},
        {"issueID": "right", "ruleRefs": [{"tool": "toolB", "pattern": "only-b"}]}
      ]})");
    Report onlyA = report_with({{"toolA", {simple_instance("only-a", 2)}}});
    Report onlyB = report_with({{"toolB", {simple_instance("only-b", 2)}}});
    Report both = report_with({{"toolA", {simple_instance("only-a", 2)}},
                               {"toolB", {simple_instance("only-b", 2)}}});
    std::size_t a = gather(onlyA, catalog).size();
    std::size_t b = gather(onlyB, catalog).size();
    std::size_t ab = gather(both, catalog).size();
    CHECK(ab > a);
    CHECK(ab > b);
    CHECK(ab == 2);
}

TEST_CASE("excerpt_jaccard is token-set based") {
    CHECK(excerpt_jaccard("", "") == doctest::Approx(0.0));
    CHECK(excerpt_jaccard("<img src=\"x.jpg\">", "<img src=\"x.jpg\">") ==
          doctest::Approx(1.0));
    // Tokens {a,b,c} vs {b,c,d}: intersection 2, union 4.
    CHECK(excerpt_jaccard("a b c", "b c d") == doctest::Approx(0.5));
    // Case and punctuation are normalized away.
    CHECK(excerpt_jaccard("<IMG SRC='x'>", "img src x") == doctest::Approx(1.0));
}

TEST_CASE("match_instances clusters by xpath or by tag+excerpt") {
    IssueGroup group;
    group.issueID = "imageNoAlt";

    Instance byPath = simple_instance("imageNoAlt", 3);
    byPath.tagName = "IMG";
    byPath.location = {LocationDoc::dom, LocationType::xpath, "/html/body/img[1]"};
    byPath.excerpt = "";

    Instance byPathOther = byPath;
    byPathOther.location.spec = "/HTML/BODY/IMG";  // same node, sloppier spelling

    Instance byExcerpt = simple_instance("image-alt", 3);
    byExcerpt.tagName = "IMG";
    byExcerpt.location = {LocationDoc::dom, LocationType::none, ""};
    byExcerpt.excerpt = "<img src=\"x.jpg\">";

    Instance anchor = simple_instance("link-name", 3);
    anchor.tagName = "A";
    anchor.location = {LocationDoc::dom, LocationType::none, ""};
    anchor.excerpt = "<img src=\"x.jpg\">";  // same text, different tag

    group.instances = {{"native", byPath}, {"alfa", byPathOther}, {"axe", byExcerpt},
                       {"axe", anchor}};
    // Give the xpath-located native instance the same excerpt so the
    // excerpt-only axe instance can join its cluster.
    group.instances[0].instance.excerpt = "<img src=\"x.jpg\">";

    auto clusters = match_instances(group, 0.8);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0] == std::vector<std::size_t>{0, 1, 2});
    CHECK(clusters[1] == std::vector<std::size_t>{3});
}

TEST_CASE("unlocatable empty instances never co-cluster") {
    IssueGroup group;
    Instance blank = simple_instance("x", 1);
    blank.tagName = "";
    blank.location = {LocationDoc::dom, LocationType::none, ""};
    blank.excerpt = "";
    group.instances = {{"a", blank}, {"b", blank}, {"c", blank}};
    auto clusters = match_instances(group, 0.8);
    CHECK(clusters.size() == 3);
}

TEST_CASE("clusters always partition the instance indices (fuzzed)") {
    std::mt19937 rng(5150);
    for (int trial = 0; trial < 100; ++trial) {
        IssueGroup group;
        int n = static_cast<int>(rng() % 8);
        for (int i = 0; i < n; ++i) {
            group.instances.push_back({"tool" + std::to_string(rng() % 3),
                                       testsup::random_instance(rng)});
        }
        auto clusters = match_instances(group, 0.8);
        std::vector<bool> seen(group.instances.size(), false);
        for (const auto& cluster : clusters) {
            CHECK_FALSE(cluster.empty());
            for (std::size_t index : cluster) {
                REQUIRE(index < seen.size());
                CHECK_FALSE(seen[index]);
                seen[index] = true;
            }
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    }
}

TEST_CASE("gather fills clusters using the catalog threshold") {
    IssueCatalog catalog = default_catalog();
    Report report = report_with({
        {"native", {simple_instance("imageNoAlt", 3)}},
        {"axe", {simple_instance("image-alt", 3)}},
    });
    // Same tag + same excerpt -> the two tools' findings collapse into one cluster.
    for (ActResult& result : report.actResults) {
        ToolResult& tool = std::get<ToolResult>(result);
        tool.standard.instances[0].tagName = "IMG";
        tool.standard.instances[0].excerpt = "<img src=\"shared.png\">";
    }
    std::vector<IssueGroup> groups = gather(report, catalog);
    REQUIRE(groups.size() == 1);
    REQUIRE(groups[0].clusters.size() == 1);
    CHECK(groups[0].clusters[0].size() == 2);
}
