// Report assembly and rendering: the elaborated JSON report, the single-file
// HTML digest, the comparative HTML page, and the score CSV export.
#pragma once

#include <string>
#include <vector>

#include "a11yens/core_model.hpp"
#include "a11yens/ensemble.hpp"
#include "a11yens/scoring.hpp"

namespace a11yens {

struct ElaborateEnv {
    std::string agentID;
    // Injectable clock for deterministic output; empty fields fall back to
    // the current UTC time.
    std::string startTime;
    std::string endTime;
};

// Wraps acts and their results into a Report with whole-job data. Throws
// std::invalid_argument when actResults does not align with job.acts.
Report elaborate(const Job& job, std::vector<ActResult> actResults, const ElaborateEnv& env);

// Self-contained HTML summary: total score, per-issue table, per-tool
// instance appendix. The output itself passes the native rule engine clean.
std::string digest_html(const Report& report, const IssueCatalog& catalog);

// Comparative page over ranked score entries (see compare_scores). Throws
// std::invalid_argument on empty input.
std::string compare_html(const std::vector<ScoreEntry>& ranking);

// CSV export, header `target,url,score,errorCount`, RFC-4180 quoting.
std::string export_scores(const std::vector<ScoreEntry>& ranking);

std::string html_escape(std::string_view raw);

}  // namespace a11yens
