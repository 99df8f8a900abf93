#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "a11yens/scoring.hpp"

namespace a11yens {

double score_issue(const IssueGroup& group, double weight) {
    return weight * (1.0 + group.maxSeverity) *
           std::log2(1.0 + static_cast<double>(group.maxCount));
}

Score score_report(const Report& report, const IssueCatalog& catalog) {
    Score score;
    score.catalogVersion = catalog.version;
    for (const IssueGroup& group : gather(report, catalog)) {
        const IssueMapEntry* entry = catalog.find(group.issueID);
        double weight = entry ? entry->weight : 1.0;
        double component = score_issue(group, weight);
        score.components[group.issueID] = component;
        score.total += component;
    }
    return score;
}

ojson score_to_json(const Score& score) {
    ojson out;
    out["total"] = score.total;
    out["components"] = ojson::object();
    for (const auto& [issueID, value] : score.components) out["components"][issueID] = value;
    out["parameters"] = {{"formulaVersion", score.formulaVersion},
                         {"catalogVersion", score.catalogVersion}};
    return out;
}

std::vector<ScoreEntry> compare_scores(std::vector<ScoreEntry> entries) {
    std::set<std::string> ids;
    for (const ScoreEntry& entry : entries) {
        if (!ids.insert(entry.targetID).second) {
            throw std::invalid_argument("duplicate target id '" + entry.targetID + "'");
        }
    }
    std::sort(entries.begin(), entries.end(), [](const ScoreEntry& a, const ScoreEntry& b) {
        if (a.score.total != b.score.total) return a.score.total < b.score.total;
        return a.targetID < b.targetID;
    });
    return entries;
}

std::string format_score(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.15g", value);
    return buffer;
}

}  // namespace a11yens
