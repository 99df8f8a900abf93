// Core data model: the job language, standard results, and the report
// envelope. Every other component consumes these types.
#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace a11yens {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

enum class ActType { launch, navigate, wait, test };

std::string to_string(ActType type);
std::optional<ActType> act_type_from_string(const std::string& name);

// One instruction in a job. `which` carries the act argument: the tool code
// for test acts, the URL for navigate acts.
struct Act {
    ActType type = ActType::test;
    std::string which;
    std::string what;
    std::optional<std::vector<std::string>> rules;
    std::string browser;
    std::map<std::string, std::string> options;

    bool operator==(const Act&) const = default;
};

struct Target {
    std::string url;
    std::string what;

    bool operator==(const Target&) const = default;
};

struct Job {
    std::string id;
    std::string what;
    std::string timeStamp;
    Target target;
    std::vector<Act> acts;
    // Unknown top-level fields, preserved verbatim through parse/serialize.
    json extras = json::object();

    bool operator==(const Job&) const = default;
};

enum class LocationDoc { dom, source };
enum class LocationType { xpath, selector, line, box, none };

std::string to_string(LocationDoc doc);
std::string to_string(LocationType type);

struct Location {
    LocationDoc doc = LocationDoc::dom;
    LocationType type = LocationType::none;
    std::string spec;

    bool operator==(const Location&) const = default;
};

inline constexpr std::size_t kExcerptLimit = 400;

// Truncates to kExcerptLimit bytes, marking truncation with a trailing
// ellipsis and never splitting a UTF-8 sequence.
std::string clip_excerpt(std::string_view raw);

struct Instance {
    std::string ruleID;
    std::string what;
    long long count = 1;
    int ordinalSeverity = 0;
    std::string tagName;
    std::string id;
    Location location;
    std::string excerpt;

    bool operator==(const Instance&) const = default;
};

struct StandardResult {
    std::array<long long, 4> totals{0, 0, 0, 0};
    std::vector<Instance> instances;
    bool prevented = false;
    bool capped = false;

    bool operator==(const StandardResult&) const = default;
};

// Recomputes totals from the instance list so the totals law holds.
void recompute_totals(StandardResult& result);

struct ToolResult {
    std::string toolCode;
    json native;
    StandardResult standard;
    long long elapsedMillis = 0;
    std::optional<std::string> error;

    bool operator==(const ToolResult&) const = default;
};

// Outcome of a non-test act (launch, navigate, wait).
struct NavOutcome {
    bool ok = true;
    std::string detail;
    long long elapsedMillis = 0;

    bool operator==(const NavOutcome&) const = default;
};

using ActResult = std::variant<NavOutcome, ToolResult>;

struct JobData {
    std::string startTime;
    std::string endTime;
    long long elapsedSeconds = 0;
    std::string agent;
    long long errorCount = 0;

    bool operator==(const JobData&) const = default;
};

struct Report {
    Job job;
    std::vector<ActResult> actResults;
    JobData jobData;

    bool operator==(const Report&) const = default;
};

// ---------------------------------------------------------------------------
// Parsing and serialization

struct ParseError {
    std::string message;
};

template <typename T>
struct Parsed {
    std::optional<T> value;
    std::vector<ParseError> errors;

    bool ok() const { return value.has_value() && errors.empty(); }
};

Parsed<Job> parse_job(const std::string& text);
Parsed<Report> parse_report(const std::string& text);
Parsed<std::vector<Act>> parse_acts(const json& raw);

std::string serialize_job(const Job& job);
std::string serialize_report(const Report& report);

ojson job_to_json(const Job& job);
ojson report_to_json(const Report& report);
ojson standard_result_to_json(const StandardResult& result);
ojson instance_to_json(const Instance& instance);

// ---------------------------------------------------------------------------
// Validation against a tool inventory

struct ToolInventory {
    // tool code -> enumerable rule IDs, or nullopt when the tool's rule set
    // cannot be enumerated (external tools without a shipped rule list).
    std::map<std::string, std::optional<std::set<std::string>>> tools;
};

enum class ViolationLevel { error, warning };

struct Violation {
    ViolationLevel level = ViolationLevel::error;
    std::size_t actIndex = 0;
    std::string message;
};

std::vector<Violation> validate_job(const Job& job, const ToolInventory& inventory);

inline bool has_errors(const std::vector<Violation>& violations) {
    for (const auto& v : violations) {
        if (v.level == ViolationLevel::error) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Time helpers (ISO-8601 UTC, seconds precision)

std::string format_utc(std::chrono::system_clock::time_point tp);
std::optional<std::chrono::system_clock::time_point> parse_utc(const std::string& text);
std::string now_utc();

bool is_valid_job_id(const std::string& id);

}  // namespace a11yens
