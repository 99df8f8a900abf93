#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "a11yens/ensemble.hpp"
#include "a11yens/rule_engine.hpp"
#include "text_util.hpp"

namespace a11yens {

namespace {

bool is_prefix_pattern(const std::string& pattern) {
    return !pattern.empty() && pattern.back() == '*';
}

}  // namespace

const IssueMapEntry* IssueCatalog::find(const std::string& issueID) const {
    for (const IssueMapEntry& issue : issues) {
        if (issue.issueID == issueID) return &issue;
    }
    return nullptr;
}

Parsed<IssueCatalog> parse_catalog(const json& config) {
    Parsed<IssueCatalog> out;
    IssueCatalog catalog;
    if (!config.is_object() || !config.contains("issues") || !config["issues"].is_array()) {
        out.errors.push_back({"catalog must be an object with an 'issues' array"});
        return out;
    }
    if (config.contains("jaccardThreshold")) {
        if (!config["jaccardThreshold"].is_number()) {
            out.errors.push_back({"jaccardThreshold must be a number"});
        } else {
            catalog.jaccardThreshold = config["jaccardThreshold"].get<double>();
            if (catalog.jaccardThreshold < 0 || catalog.jaccardThreshold > 1) {
                out.errors.push_back({"jaccardThreshold outside [0,1]"});
            }
        }
    }
    if (config.contains("version") && config["version"].is_string()) {
        catalog.version = config["version"].get<std::string>();
    }

    std::set<std::string> ids;
    std::size_t index = 0;
    for (const json& raw : config["issues"]) {
        std::string where = "issues[" + std::to_string(index++) + "]";
        if (!raw.is_object()) {
            out.errors.push_back({where + ": not an object"});
            continue;
        }
        IssueMapEntry issue;
        issue.issueID = raw.value("issueID", "");
        if (issue.issueID.empty()) {
            out.errors.push_back({where + ": missing issueID"});
            continue;
        }
        where += " (" + issue.issueID + ")";
        if (!ids.insert(issue.issueID).second) {
            out.errors.push_back({where + ": duplicate issueID"});
            continue;
        }
        issue.wcag = raw.value("wcag", "");
        issue.advice = raw.value("advice", "");
        if (raw.contains("weight")) {
            if (!raw["weight"].is_number() || raw["weight"].get<double>() <= 0) {
                out.errors.push_back({where + ": weight must be a positive number"});
            } else {
                issue.weight = raw["weight"].get<double>();
            }
        }
        if (raw.contains("ruleRefs")) {
            if (!raw["ruleRefs"].is_array()) {
                out.errors.push_back({where + ": ruleRefs must be an array"});
            } else {
                for (const json& ref : raw["ruleRefs"]) {
                    RuleRef rule;
                    rule.tool = ref.is_object() ? ref.value("tool", "") : "";
                    rule.pattern = ref.is_object() ? ref.value("pattern", "") : "";
                    if (rule.tool.empty() || rule.pattern.empty()) {
                        out.errors.push_back({where + ": ruleRef needs tool and pattern"});
                        continue;
                    }
                    std::size_t star = rule.pattern.find('*');
                    if (star != std::string::npos && star != rule.pattern.size() - 1) {
                        out.errors.push_back({where + ": '*' is only valid as a trailing "
                                              "wildcard in '" + rule.pattern + "'"});
                        continue;
                    }
                    issue.ruleRefs.push_back(std::move(rule));
                }
            }
        }
        catalog.issues.push_back(std::move(issue));
    }

    // Ambiguity: a (tool, ruleID) must never match two different issues.
    // Literal claims are checked exactly; prefix claims pairwise (one prefix
    // subsuming another means some ruleID would match both). Literal-vs-prefix
    // conflicts are legal and resolved by exact-beats-prefix at classify time.
    std::map<std::pair<std::string, std::string>, std::string> literal_claims;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> prefix_claims;
    for (const IssueMapEntry& issue : catalog.issues) {
        for (const RuleRef& ref : issue.ruleRefs) {
            if (is_prefix_pattern(ref.pattern)) {
                prefix_claims[ref.tool].push_back(
                    {ref.pattern.substr(0, ref.pattern.size() - 1), issue.issueID});
            } else {
                auto key = std::make_pair(ref.tool, ref.pattern);
                auto [it, inserted] = literal_claims.insert({key, issue.issueID});
                if (!inserted && it->second != issue.issueID) {
                    out.errors.push_back({"ambiguous: (" + ref.tool + ", " + ref.pattern +
                                          ") claimed by issues '" + it->second + "' and '" +
                                          issue.issueID + "'"});
                }
            }
        }
    }
    for (const auto& [tool, prefixes] : prefix_claims) {
        for (std::size_t i = 0; i < prefixes.size(); ++i) {
            for (std::size_t j = i + 1; j < prefixes.size(); ++j) {
                const auto& [pa, issue_a] = prefixes[i];
                const auto& [pb, issue_b] = prefixes[j];
                if (issue_a == issue_b) continue;
                const std::string& shorter = pa.size() <= pb.size() ? pa : pb;
                const std::string& longer = pa.size() <= pb.size() ? pb : pa;
                if (longer.compare(0, shorter.size(), shorter) == 0) {
                    out.errors.push_back({"ambiguous: (" + tool + ", " + shorter + "*) and (" +
                                          tool + ", " + longer + "*) claimed by issues '" +
                                          issue_a + "' and '" + issue_b + "'"});
                }
            }
        }
    }

    if (out.errors.empty()) out.value = std::move(catalog);
    return out;
}

Parsed<IssueCatalog> load_catalog(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        Parsed<IssueCatalog> out;
        out.errors.push_back({"cannot read " + path});
        return out;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    json config = json::parse(buffer.str(), nullptr, false);
    if (config.is_discarded()) {
        Parsed<IssueCatalog> out;
        out.errors.push_back({path + ": invalid JSON"});
        return out;
    }
    return parse_catalog(config);
}

std::string classify(const IssueCatalog& catalog, const std::string& toolCode,
                     const std::string& ruleID) {
    const IssueMapEntry* best = nullptr;
    std::size_t best_len = 0;
    for (const IssueMapEntry& issue : catalog.issues) {
        for (const RuleRef& ref : issue.ruleRefs) {
            if (ref.tool != toolCode) continue;
            if (is_prefix_pattern(ref.pattern)) {
                std::string_view prefix(ref.pattern.data(), ref.pattern.size() - 1);
                if (ruleID.compare(0, prefix.size(), prefix) == 0 &&
                    (!best || prefix.size() + 1 > best_len)) {
                    best = &issue;
                    best_len = prefix.size() + 1;
                }
            } else if (ref.pattern == ruleID) {
                return issue.issueID;  // exact beats prefix
            }
        }
    }
    if (best) return best->issueID;
    return "unclassified:" + toolCode + ":" + ruleID;
}

// ---------------------------------------------------------------------------
// Gathering and instance matching

namespace {

std::set<std::string> token_set(const std::string& text) {
    std::set<std::string> out;
    std::string token;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            token += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!token.empty()) {
            out.insert(token);
            token.clear();
        }
    }
    if (!token.empty()) out.insert(token);
    return out;
}

bool unmatchable(const Instance& instance) {
    return instance.location.type == LocationType::none && instance.excerpt.empty();
}

bool co_cluster(const Instance& a, const Instance& b, double threshold) {
    if (unmatchable(a) || unmatchable(b)) return false;
    if (a.location.type == LocationType::xpath && b.location.type == LocationType::xpath &&
        normalize_xpath(a.location.spec) == normalize_xpath(b.location.spec)) {
        return true;
    }
    if (a.tagName != b.tagName) return false;
    return excerpt_jaccard(a.excerpt, b.excerpt) >= threshold;
}

}  // namespace

double excerpt_jaccard(const std::string& a, const std::string& b) {
    std::set<std::string> sa = token_set(a);
    std::set<std::string> sb = token_set(b);
    if (sa.empty() && sb.empty()) return 0.0;
    std::size_t common = 0;
    for (const std::string& token : sa) common += sb.count(token);
    std::size_t all = sa.size() + sb.size() - common;
    return static_cast<double>(common) / static_cast<double>(all);
}

std::vector<std::vector<std::size_t>> match_instances(const IssueGroup& group,
                                                      double jaccardThreshold) {
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < group.instances.size(); ++i) {
        const Instance& candidate = group.instances[i].instance;
        bool placed = false;
        for (auto& cluster : clusters) {
            const Instance& representative = group.instances[cluster.front()].instance;
            if (co_cluster(representative, candidate, jaccardThreshold)) {
                cluster.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) clusters.push_back({i});
    }
    return clusters;
}

std::vector<IssueGroup> gather(const Report& report, const IssueCatalog& catalog) {
    std::map<std::string, IssueGroup> by_issue;
    for (const ActResult& result : report.actResults) {
        const ToolResult* tool = std::get_if<ToolResult>(&result);
        if (!tool || tool->standard.prevented) continue;
        for (const Instance& instance : tool->standard.instances) {
            std::string issueID = classify(catalog, tool->toolCode, instance.ruleID);
            IssueGroup& group = by_issue[issueID];
            if (group.issueID.empty()) {
                group.issueID = issueID;
                if (const IssueMapEntry* entry = catalog.find(issueID)) group.wcag = entry->wcag;
            }
            group.perToolCounts[tool->toolCode] += instance.count;
            group.maxSeverity = std::max(group.maxSeverity, instance.ordinalSeverity);
            group.instances.push_back({tool->toolCode, instance});
        }
    }
    std::vector<IssueGroup> groups;
    groups.reserve(by_issue.size());
    for (auto& [issueID, group] : by_issue) {
        for (const auto& [tool, count] : group.perToolCounts) {
            group.maxCount = std::max(group.maxCount, count);
        }
        group.clusters = match_instances(group, catalog.jaccardThreshold);
        groups.push_back(std::move(group));
    }
    std::sort(groups.begin(), groups.end(), [](const IssueGroup& a, const IssueGroup& b) {
        if (a.maxSeverity != b.maxSeverity) return a.maxSeverity > b.maxSeverity;
        return a.issueID < b.issueID;
    });
    return groups;
}

}  // namespace a11yens
