// Issue catalog: classifies tool rules onto tool-agnostic issues, gathers all
// tools' complaints per issue, and clusters instances that likely denote the
// same page defect.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "a11yens/core_model.hpp"

namespace a11yens {

struct RuleRef {
    std::string tool;
    std::string pattern;  // exact ruleID, or prefix ending in '*'

    bool operator==(const RuleRef&) const = default;
};

struct IssueMapEntry {
    std::string issueID;
    std::string wcag;
    double weight = 1.0;
    std::string advice;  // remediation text; the starter catalog ships none
    std::vector<RuleRef> ruleRefs;

    bool operator==(const IssueMapEntry&) const = default;
};

struct IssueCatalog {
    std::vector<IssueMapEntry> issues;
    double jaccardThreshold = 0.8;
    std::string version;

    const IssueMapEntry* find(const std::string& issueID) const;
};

// catalog.json: {issues:[{issueID, wcag, weight, ruleRefs:[{tool, pattern}]}],
// header {jaccardThreshold, version}}.
Parsed<IssueCatalog> parse_catalog(const json& config);
Parsed<IssueCatalog> load_catalog(const std::string& path);

// Longest-match classification (exact beats prefix); unmatched rules map to
// the synthetic issue id "unclassified:<tool>:<ruleID>".
std::string classify(const IssueCatalog& catalog, const std::string& toolCode,
                     const std::string& ruleID);

struct TaggedInstance {
    std::string toolCode;
    Instance instance;

    bool operator==(const TaggedInstance&) const = default;
};

struct IssueGroup {
    std::string issueID;
    std::string wcag;
    std::map<std::string, long long> perToolCounts;
    long long maxCount = 0;
    int maxSeverity = 0;
    std::vector<TaggedInstance> instances;
    std::vector<std::vector<std::size_t>> clusters;  // partition of instance indices
};

// Groups every instance of every non-prevented tool result by issue; groups
// are sorted by (descending maxSeverity, issueID) and come with clusters
// filled in.
std::vector<IssueGroup> gather(const Report& report, const IssueCatalog& catalog);

// Greedy clustering in instance order: same normalized XPath, or same tag
// with excerpt token-set Jaccard >= threshold.
std::vector<std::vector<std::size_t>> match_instances(const IssueGroup& group,
                                                      double jaccardThreshold = 0.8);

// Token-set Jaccard similarity of two excerpts (lowercased alphanumeric
// tokens); 0 when both token sets are empty.
double excerpt_jaccard(const std::string& a, const std::string& b);

}  // namespace a11yens
