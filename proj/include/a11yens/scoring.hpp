// Deterministic accessibility scoring over gathered issue groups, plus
// cross-target ranking. Higher score = worse.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "a11yens/core_model.hpp"
#include "a11yens/ensemble.hpp"

namespace a11yens {

inline constexpr const char* kScoreFormulaVersion = "1";

struct Score {
    double total = 0.0;
    std::map<std::string, double> components;  // issueID -> contribution
    std::string formulaVersion = kScoreFormulaVersion;
    std::string catalogVersion;
};

// weight x (1 + maxSeverity) x log2(1 + maxCount). maxCount (not the sum
// across tools) keeps one tool's inflated count from multiplying another's.
double score_issue(const IssueGroup& group, double weight);

// Gathers and sums score_issue over all groups; unclassified issues score at
// weight 1.
Score score_report(const Report& report, const IssueCatalog& catalog);

ojson score_to_json(const Score& score);

struct ScoreEntry {
    std::string targetID;
    std::string url;
    Score score;
    long long errorCount = 0;
};

// Ascending by total (lower is better), ties by targetID. Throws
// std::invalid_argument on duplicate target IDs.
std::vector<ScoreEntry> compare_scores(std::vector<ScoreEntry> entries);

// Fixed-precision decimal rendering used everywhere a score is printed.
std::string format_score(double value);

}  // namespace a11yens
