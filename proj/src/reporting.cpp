#include <sstream>
#include <stdexcept>

#include "a11yens/reporting.hpp"

namespace a11yens {

namespace {

const char* kDigestStyle =
    "body{font-family:system-ui,sans-serif;margin:2em;max-width:70em}"
    "table{border-collapse:collapse;margin:1em 0}"
    "th,td{border:1px solid #999;padding:0.3em 0.6em;text-align:left;"
    "vertical-align:top}"
    "th{background:#eee}"
    "code{background:#f4f4f4;padding:0 0.2em}";

std::string location_text(const Location& location) {
    if (location.type == LocationType::none) return "-";
    return to_string(location.doc) + " " + to_string(location.type) + " " + location.spec;
}

void open_page(std::ostringstream& out, const std::string& title) {
    out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n"
        << "<meta charset=\"utf-8\">\n"
        << "<title>" << html_escape(title) << "</title>\n"
        << "<style>" << kDigestStyle << "</style>\n"
        << "</head>\n<body>\n";
}

void close_page(std::ostringstream& out) { out << "</body>\n</html>\n"; }

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

std::string html_escape(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

Report elaborate(const Job& job, std::vector<ActResult> actResults, const ElaborateEnv& env) {
    if (actResults.size() != job.acts.size()) {
        throw std::invalid_argument("act results misaligned: " +
                                    std::to_string(job.acts.size()) + " acts, " +
                                    std::to_string(actResults.size()) + " results");
    }
    Report report;
    report.job = job;
    report.actResults = std::move(actResults);
    report.jobData.startTime = env.startTime.empty() ? now_utc() : env.startTime;
    report.jobData.endTime = env.endTime.empty() ? now_utc() : env.endTime;
    auto begin = parse_utc(report.jobData.startTime);
    auto end = parse_utc(report.jobData.endTime);
    if (begin && end && *end > *begin) {
        report.jobData.elapsedSeconds =
            std::chrono::duration_cast<std::chrono::seconds>(*end - *begin).count();
    }
    report.jobData.agent = env.agentID;
    for (const ActResult& result : report.actResults) {
        if (const auto* tool = std::get_if<ToolResult>(&result)) {
            if (tool->standard.prevented) ++report.jobData.errorCount;
        }
    }
    return report;
}

std::string digest_html(const Report& report, const IssueCatalog& catalog) {
    std::vector<IssueGroup> groups = gather(report, catalog);
    Score score = score_report(report, catalog);

    std::ostringstream out;
    open_page(out, "Accessibility digest: " + report.job.id);
    out << "<h1>Accessibility digest: " << html_escape(report.job.id) << "</h1>\n";
    out << "<p>Target: " << html_escape(report.job.target.url);
    if (!report.job.target.what.empty()) {
        out << " (" << html_escape(report.job.target.what) << ")";
    }
    out << "</p>\n";
    out << "<p>Run " << html_escape(report.jobData.startTime) << " to "
        << html_escape(report.jobData.endTime) << ", " << report.jobData.elapsedSeconds
        << " s, agent " << html_escape(report.jobData.agent.empty() ? "-" : report.jobData.agent)
        << ", " << report.jobData.errorCount << " prevented tool runs.</p>\n";

    out << "<h2>Score</h2>\n";
    out << "<p>Total <strong>" << format_score(score.total)
        << "</strong> (higher is worse; formula v" << html_escape(score.formulaVersion)
        << ", catalog v" << html_escape(score.catalogVersion) << ").</p>\n";

    out << "<h2>Issues</h2>\n";
    out << "<table>\n<thead>\n<tr><th>Issue</th><th>WCAG</th><th>Max severity</th>"
        << "<th>Max count</th><th>Per-tool counts</th><th>Contribution</th></tr>\n"
        << "</thead>\n<tbody>\n";
    for (const IssueGroup& group : groups) {
        out << "<tr><td>" << html_escape(group.issueID);
        if (const IssueMapEntry* entry = catalog.find(group.issueID);
            entry && !entry->advice.empty()) {
            out << "<br>" << html_escape(entry->advice);
        }
        out << "</td><td>"
            << html_escape(group.wcag.empty() ? "-" : group.wcag) << "</td><td>"
            << group.maxSeverity << "</td><td>" << group.maxCount << "</td><td>";
        bool first = true;
        for (const auto& [tool, count] : group.perToolCounts) {
            if (!first) out << ", ";
            out << html_escape(tool) << ": " << count;
            first = false;
        }
        double contribution = 0;
        if (auto it = score.components.find(group.issueID); it != score.components.end()) {
            contribution = it->second;
        }
        out << "</td><td>" << format_score(contribution) << "</td></tr>\n";
    }
    out << "</tbody>\n</table>\n";

    out << "<h2>Instances by tool</h2>\n";
    for (const ActResult& result : report.actResults) {
        const ToolResult* tool = std::get_if<ToolResult>(&result);
        if (!tool) continue;
        out << "<h3>" << html_escape(tool->toolCode) << "</h3>\n";
        if (tool->standard.prevented) {
            out << "<p>Prevented: "
                << html_escape(tool->error.value_or("no result")) << "</p>\n";
            continue;
        }
        if (tool->standard.instances.empty()) {
            out << "<p>No findings.</p>\n";
            continue;
        }
        out << "<table>\n<thead>\n<tr><th>Rule</th><th>What</th><th>Severity</th>"
            << "<th>Count</th><th>Location</th><th>Excerpt</th></tr>\n</thead>\n<tbody>\n";
        for (const Instance& instance : tool->standard.instances) {
            out << "<tr><td>" << html_escape(instance.ruleID) << "</td><td>"
                << html_escape(instance.what) << "</td><td>" << instance.ordinalSeverity
                << "</td><td>" << instance.count << "</td><td>"
                << html_escape(location_text(instance.location)) << "</td><td><code>"
                << html_escape(instance.excerpt) << "</code></td></tr>\n";
        }
        out << "</tbody>\n</table>\n";
    }
    close_page(out);
    return out.str();
}

std::string compare_html(const std::vector<ScoreEntry>& ranking) {
    if (ranking.empty()) throw std::invalid_argument("nothing to compare");
    std::ostringstream out;
    open_page(out, "Accessibility comparison");
    out << "<h1>Accessibility comparison</h1>\n";
    out << "<p>" << ranking.size()
        << " targets, ranked by total score (lower is better).</p>\n";
    out << "<table>\n<thead>\n<tr><th>Rank</th><th>Target</th><th>URL</th>"
        << "<th>Score</th></tr>\n</thead>\n<tbody>\n";
    std::size_t rank = 1;
    for (const ScoreEntry& entry : ranking) {
        out << "<tr><td>" << rank++ << "</td><td>" << html_escape(entry.targetID) << "</td><td>"
            << html_escape(entry.url) << "</td><td>" << format_score(entry.score.total)
            << "</td></tr>\n";
    }
    out << "</tbody>\n</table>\n";
    close_page(out);
    return out.str();
}

std::string export_scores(const std::vector<ScoreEntry>& ranking) {
    std::string out = "target,url,score,errorCount\r\n";
    for (const ScoreEntry& entry : ranking) {
        out += csv_field(entry.targetID) + "," + csv_field(entry.url) + "," +
               format_score(entry.score.total) + "," + std::to_string(entry.errorCount) + "\r\n";
    }
    return out;
}

}  // namespace a11yens
