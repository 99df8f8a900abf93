#include "a11yens/core_model.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>

namespace a11yens {

namespace {

const std::set<std::string> kJobFields = {"id", "what", "timeStamp", "target", "acts"};
const std::set<std::string> kBrowsers = {"chromium", "webkit", "firefox"};

void add_error(std::vector<ParseError>& errors, std::string message) {
    errors.push_back(ParseError{std::move(message)});
}

std::string act_prefix(std::size_t index) {
    return "act " + std::to_string(index) + ": ";
}

std::optional<std::string> get_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) return std::nullopt;
    return it->get<std::string>();
}

// Parses one act object, appending any violations of the act invariants.
std::optional<Act> parse_act(const json& raw, std::size_t index, std::vector<ParseError>& errors) {
    if (!raw.is_object()) {
        add_error(errors, act_prefix(index) + "act must be an object");
        return std::nullopt;
    }
    Act act;
    auto type_str = get_string(raw, "type");
    if (!type_str) {
        add_error(errors, act_prefix(index) + "missing act type");
        return std::nullopt;
    }
    auto type = act_type_from_string(*type_str);
    if (!type) {
        add_error(errors, act_prefix(index) + "unsupported act type '" + *type_str + "'");
        return std::nullopt;
    }
    act.type = *type;
    act.which = get_string(raw, "which").value_or("");
    act.what = get_string(raw, "what").value_or("");
    act.browser = get_string(raw, "browser").value_or("");

    if (act.type == ActType::test && act.which.empty()) {
        add_error(errors, act_prefix(index) + "test act requires a non-empty 'which'");
    }
    if (!act.browser.empty() && !kBrowsers.count(act.browser)) {
        add_error(errors, act_prefix(index) + "unknown browser '" + act.browser + "'");
    }
    if (auto it = raw.find("rules"); it != raw.end()) {
        if (!it->is_array()) {
            add_error(errors, act_prefix(index) + "rules must be an array of strings");
        } else {
            std::vector<std::string> rules;
            std::set<std::string> seen;
            for (const auto& r : *it) {
                if (!r.is_string()) {
                    add_error(errors, act_prefix(index) + "rules must be an array of strings");
                    break;
                }
                auto rule = r.get<std::string>();
                if (!seen.insert(rule).second) {
                    add_error(errors, act_prefix(index) + "duplicate rule ID '" + rule + "'");
                }
                rules.push_back(std::move(rule));
            }
            if (rules.empty()) {
                add_error(errors, act_prefix(index) + "rules must be non-empty when present");
            }
            act.rules = std::move(rules);
        }
    }
    if (auto it = raw.find("options"); it != raw.end()) {
        if (!it->is_object()) {
            add_error(errors, act_prefix(index) + "options must be a string map");
        } else {
            for (auto& [key, value] : it->items()) {
                if (!value.is_string()) {
                    add_error(errors, act_prefix(index) + "option '" + key + "' must be a string");
                    continue;
                }
                act.options[key] = value.get<std::string>();
            }
        }
    }
    return act;
}

std::optional<Job> parse_job_object(const json& raw, std::vector<ParseError>& errors) {
    if (!raw.is_object()) {
        add_error(errors, "job must be a JSON object");
        return std::nullopt;
    }
    Job job;
    auto id = get_string(raw, "id");
    if (!id || id->empty()) {
        add_error(errors, "job id is required");
    } else if (!is_valid_job_id(*id)) {
        add_error(errors, "job id '" + *id + "' is not filesystem-safe");
    } else {
        job.id = *id;
    }
    job.what = get_string(raw, "what").value_or("");
    auto stamp = get_string(raw, "timeStamp");
    if (!stamp) {
        add_error(errors, "missing timeStamp");
    } else if (!parse_utc(*stamp)) {
        add_error(errors, "timeStamp '" + *stamp + "' is not ISO-8601 UTC");
    } else {
        job.timeStamp = *stamp;
    }
    if (auto it = raw.find("target"); it != raw.end()) {
        if (!it->is_object()) {
            add_error(errors, "target must be an object");
        } else {
            job.target.url = get_string(*it, "url").value_or("");
            job.target.what = get_string(*it, "what").value_or("");
        }
    }
    auto acts_it = raw.find("acts");
    if (acts_it == raw.end() || !acts_it->is_array() || acts_it->empty()) {
        add_error(errors, "acts must be non-empty");
    } else {
        for (std::size_t i = 0; i < acts_it->size(); ++i) {
            if (auto act = parse_act((*acts_it)[i], i, errors)) {
                job.acts.push_back(std::move(*act));
            }
        }
    }
    for (auto& [key, value] : raw.items()) {
        if (!kJobFields.count(key)) job.extras[key] = value;
    }
    return job;
}

std::string instance_prefix(std::size_t index) {
    return "instance " + std::to_string(index) + ": ";
}

std::optional<Location> parse_location(const json& raw, std::size_t index,
                                        std::vector<ParseError>& errors) {
    if (!raw.is_object()) {
        add_error(errors, instance_prefix(index) + "location must be an object");
        return std::nullopt;
    }
    Location loc;
    auto doc = get_string(raw, "doc").value_or("dom");
    if (doc == "dom") {
        loc.doc = LocationDoc::dom;
    } else if (doc == "source") {
        loc.doc = LocationDoc::source;
    } else {
        add_error(errors, instance_prefix(index) + "unknown location doc '" + doc + "'");
    }
    auto type = get_string(raw, "type").value_or("none");
    if (type == "xpath") {
        loc.type = LocationType::xpath;
    } else if (type == "selector") {
        loc.type = LocationType::selector;
    } else if (type == "line") {
        loc.type = LocationType::line;
    } else if (type == "box") {
        loc.type = LocationType::box;
    } else if (type == "none") {
        loc.type = LocationType::none;
    } else {
        add_error(errors, instance_prefix(index) + "unknown location type '" + type + "'");
        return std::nullopt;
    }
    loc.spec = get_string(raw, "spec").value_or("");
    if (loc.type == LocationType::none && !loc.spec.empty()) {
        add_error(errors, instance_prefix(index) + "location spec must be empty when type is none");
    }
    if (loc.type != LocationType::none && loc.spec.empty()) {
        add_error(errors, instance_prefix(index) + "location spec is required");
    }
    if (loc.type == LocationType::line) {
        long long value = 0;
        bool numeric = !loc.spec.empty() &&
                       loc.spec.find_first_not_of("0123456789") == std::string::npos;
        if (numeric) value = std::stoll(loc.spec);
        if (!numeric || value < 1) {
            add_error(errors,
                      instance_prefix(index) + "line location spec must be a positive integer");
        }
    }
    return loc;
}

std::optional<Instance> parse_instance(const json& raw, std::size_t index,
                                        std::vector<ParseError>& errors) {
    if (!raw.is_object()) {
        add_error(errors, instance_prefix(index) + "instance must be an object");
        return std::nullopt;
    }
    Instance inst;
    inst.ruleID = get_string(raw, "ruleID").value_or("");
    inst.what = get_string(raw, "what").value_or("");
    inst.count = raw.value("count", 1LL);
    inst.ordinalSeverity = raw.value("ordinalSeverity", 0);
    inst.tagName = get_string(raw, "tagName").value_or("");
    inst.id = get_string(raw, "id").value_or("");
    inst.excerpt = get_string(raw, "excerpt").value_or("");
    if (inst.count < 1) {
        add_error(errors, instance_prefix(index) + "count must be >= 1");
    }
    if (inst.ordinalSeverity < 0 || inst.ordinalSeverity > 3) {
        add_error(errors, instance_prefix(index) + "ordinalSeverity must be 0-3");
    }
    if (inst.excerpt.size() > kExcerptLimit) {
        add_error(errors, instance_prefix(index) + "excerpt exceeds " +
                              std::to_string(kExcerptLimit) + " characters");
    }
    if (auto it = raw.find("location"); it != raw.end()) {
        if (auto loc = parse_location(*it, index, errors)) inst.location = *loc;
    }
    return inst;
}

std::optional<StandardResult> parse_standard_result(const json& raw,
                                                    std::vector<ParseError>& errors) {
    if (!raw.is_object()) {
        add_error(errors, "standard result must be an object");
        return std::nullopt;
    }
    StandardResult result;
    auto totals_it = raw.find("totals");
    if (totals_it == raw.end() || !totals_it->is_array() || totals_it->size() != 4) {
        add_error(errors, "totals must be an array of 4 counts");
        return std::nullopt;
    }
    for (std::size_t s = 0; s < 4; ++s) {
        if (!(*totals_it)[s].is_number_integer() || (*totals_it)[s].get<long long>() < 0) {
            add_error(errors, "totals entries must be non-negative integers");
            return std::nullopt;
        }
        result.totals[s] = (*totals_it)[s].get<long long>();
    }
    result.prevented = raw.value("prevented", false);
    result.capped = raw.value("capped", false);
    if (auto it = raw.find("instances"); it != raw.end() && it->is_array()) {
        for (std::size_t i = 0; i < it->size(); ++i) {
            if (auto inst = parse_instance((*it)[i], i, errors)) {
                result.instances.push_back(std::move(*inst));
            }
        }
    }
    std::array<long long, 4> sums{0, 0, 0, 0};
    for (const auto& inst : result.instances) {
        if (inst.ordinalSeverity >= 0 && inst.ordinalSeverity <= 3) {
            sums[static_cast<std::size_t>(inst.ordinalSeverity)] += inst.count;
        }
    }
    for (std::size_t s = 0; s < 4; ++s) {
        if (result.capped ? result.totals[s] < sums[s] : result.totals[s] != sums[s]) {
            add_error(errors, "totals[" + std::to_string(s) + "] violate the totals law");
        }
    }
    return result;
}

std::optional<ActResult> parse_act_result(const json& raw, std::size_t index,
                                          std::vector<ParseError>& errors) {
    std::string prefix = "actResult " + std::to_string(index) + ": ";
    if (!raw.is_object()) {
        add_error(errors, prefix + "must be an object");
        return std::nullopt;
    }
    if (raw.contains("toolCode")) {
        ToolResult tool;
        tool.toolCode = get_string(raw, "toolCode").value_or("");
        if (tool.toolCode.empty()) {
            add_error(errors, prefix + "toolCode must be a non-empty string");
            return std::nullopt;
        }
        tool.native = raw.value("native", json());
        tool.elapsedMillis = raw.value("elapsedMillis", 0LL);
        if (auto err = get_string(raw, "error")) tool.error = *err;
        auto standard_it = raw.find("standard");
        if (standard_it == raw.end()) {
            add_error(errors, prefix + "missing standard result");
            return std::nullopt;
        }
        std::vector<ParseError> inner;
        auto standard = parse_standard_result(*standard_it, inner);
        for (auto& e : inner) add_error(errors, prefix + e.message);
        if (!standard) return std::nullopt;
        tool.standard = std::move(*standard);
        if (tool.error && !tool.standard.prevented) {
            add_error(errors, prefix + "error implies prevented");
        }
        return ActResult{std::move(tool)};
    }
    auto outcome = get_string(raw, "outcome");
    if (!outcome || (*outcome != "ok" && *outcome != "error")) {
        add_error(errors, prefix + "outcome must be 'ok' or 'error'");
        return std::nullopt;
    }
    NavOutcome nav;
    nav.ok = *outcome == "ok";
    nav.detail = get_string(raw, "detail").value_or("");
    nav.elapsedMillis = raw.value("elapsedMillis", 0LL);
    return ActResult{std::move(nav)};
}

ojson act_to_json(const Act& act) {
    ojson out;
    out["type"] = to_string(act.type);
    if (!act.which.empty()) out["which"] = act.which;
    if (!act.what.empty()) out["what"] = act.what;
    if (act.rules) out["rules"] = *act.rules;
    if (!act.browser.empty()) out["browser"] = act.browser;
    if (!act.options.empty()) out["options"] = act.options;
    return out;
}

ojson location_to_json(const Location& loc) {
    ojson out;
    out["doc"] = to_string(loc.doc);
    out["type"] = to_string(loc.type);
    out["spec"] = loc.spec;
    return out;
}

ojson act_result_to_json(const ActResult& result) {
    ojson out;
    if (const auto* tool = std::get_if<ToolResult>(&result)) {
        out["toolCode"] = tool->toolCode;
        out["native"] = tool->native;
        out["standard"] = standard_result_to_json(tool->standard);
        out["elapsedMillis"] = tool->elapsedMillis;
        if (tool->error) out["error"] = *tool->error;
    } else {
        const auto& nav = std::get<NavOutcome>(result);
        out["outcome"] = nav.ok ? "ok" : "error";
        out["detail"] = nav.detail;
        out["elapsedMillis"] = nav.elapsedMillis;
    }
    return out;
}

void append_extras(ojson& out, const json& extras) {
    if (!extras.is_object()) return;
    for (auto& [key, value] : extras.items()) out[key] = value;
}

}  // namespace

std::string to_string(ActType type) {
    switch (type) {
        case ActType::launch: return "launch";
        case ActType::navigate: return "navigate";
        case ActType::wait: return "wait";
        case ActType::test: return "test";
    }
    return "test";
}

std::optional<ActType> act_type_from_string(const std::string& name) {
    if (name == "launch") return ActType::launch;
    if (name == "navigate") return ActType::navigate;
    if (name == "wait") return ActType::wait;
    if (name == "test") return ActType::test;
    return std::nullopt;
}

std::string to_string(LocationDoc doc) {
    return doc == LocationDoc::dom ? "dom" : "source";
}

std::string to_string(LocationType type) {
    switch (type) {
        case LocationType::xpath: return "xpath";
        case LocationType::selector: return "selector";
        case LocationType::line: return "line";
        case LocationType::box: return "box";
        case LocationType::none: return "none";
    }
    return "none";
}

std::string clip_excerpt(std::string_view raw) {
    if (raw.size() <= kExcerptLimit) return std::string(raw);
    std::size_t cut = kExcerptLimit - 3;
    while (cut > 0 && (static_cast<unsigned char>(raw[cut]) & 0xC0) == 0x80) --cut;
    return std::string(raw.substr(0, cut)) + "…";
}

void recompute_totals(StandardResult& result) {
    result.totals = {0, 0, 0, 0};
    for (const auto& inst : result.instances) {
        result.totals[static_cast<std::size_t>(inst.ordinalSeverity)] += inst.count;
    }
}

bool is_valid_job_id(const std::string& id) {
    if (id.empty()) return false;
    auto safe = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-' || c == '.';
    };
    if (id.front() == '.') return false;
    return std::all_of(id.begin(), id.end(), safe);
}

Parsed<Job> parse_job(const std::string& text) {
    Parsed<Job> out;
    json raw = json::parse(text, nullptr, false);
    if (raw.is_discarded()) {
        add_error(out.errors, "malformed JSON");
        return out;
    }
    auto job = parse_job_object(raw, out.errors);
    if (job && out.errors.empty()) out.value = std::move(*job);
    return out;
}

Parsed<std::vector<Act>> parse_acts(const json& raw) {
    Parsed<std::vector<Act>> out;
    if (!raw.is_array() || raw.empty()) {
        add_error(out.errors, "acts must be non-empty");
        return out;
    }
    std::vector<Act> acts;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (auto act = parse_act(raw[i], i, out.errors)) acts.push_back(std::move(*act));
    }
    if (out.errors.empty()) out.value = std::move(acts);
    return out;
}

Parsed<Report> parse_report(const std::string& text) {
    Parsed<Report> out;
    json raw = json::parse(text, nullptr, false);
    if (raw.is_discarded()) {
        add_error(out.errors, "malformed JSON");
        return out;
    }
    if (!raw.is_object()) {
        add_error(out.errors, "report must be a JSON object");
        return out;
    }
    Report report;
    json job_part = raw;
    job_part.erase("actResults");
    job_part.erase("jobData");
    if (auto job = parse_job_object(job_part, out.errors)) report.job = std::move(*job);

    auto results_it = raw.find("actResults");
    if (results_it == raw.end() || !results_it->is_array()) {
        add_error(out.errors, "missing actResults");
    } else {
        for (std::size_t i = 0; i < results_it->size(); ++i) {
            if (auto result = parse_act_result((*results_it)[i], i, out.errors)) {
                report.actResults.push_back(std::move(*result));
            }
        }
        if (results_it->size() != report.job.acts.size()) {
            add_error(out.errors, "actResults length must equal acts length");
        }
    }

    auto data_it = raw.find("jobData");
    if (data_it == raw.end() || !data_it->is_object()) {
        add_error(out.errors, "missing jobData");
    } else {
        report.jobData.startTime = get_string(*data_it, "startTime").value_or("");
        report.jobData.endTime = get_string(*data_it, "endTime").value_or("");
        report.jobData.elapsedSeconds = data_it->value("elapsedSeconds", 0LL);
        report.jobData.agent = get_string(*data_it, "agent").value_or("");
        report.jobData.errorCount = data_it->value("errorCount", 0LL);
        auto start = parse_utc(report.jobData.startTime);
        auto end = parse_utc(report.jobData.endTime);
        if (!start || !end) {
            add_error(out.errors, "jobData times must be ISO-8601 UTC");
        } else if (*end < *start) {
            add_error(out.errors, "endTime must not precede startTime");
        }
    }

    if (out.errors.empty()) out.value = std::move(report);
    return out;
}

ojson standard_result_to_json(const StandardResult& result) {
    ojson out;
    out["totals"] = result.totals;
    ojson instances = ojson::array();
    for (const auto& inst : result.instances) instances.push_back(instance_to_json(inst));
    out["instances"] = std::move(instances);
    out["prevented"] = result.prevented;
    out["capped"] = result.capped;
    return out;
}

ojson instance_to_json(const Instance& instance) {
    ojson out;
    out["ruleID"] = instance.ruleID;
    out["what"] = instance.what;
    out["count"] = instance.count;
    out["ordinalSeverity"] = instance.ordinalSeverity;
    out["tagName"] = instance.tagName;
    out["id"] = instance.id;
    out["location"] = location_to_json(instance.location);
    out["excerpt"] = instance.excerpt;
    return out;
}

ojson job_to_json(const Job& job) {
    ojson out;
    out["id"] = job.id;
    out["what"] = job.what;
    out["timeStamp"] = job.timeStamp;
    out["target"] = ojson{{"url", job.target.url}, {"what", job.target.what}};
    ojson acts = ojson::array();
    for (const auto& act : job.acts) acts.push_back(act_to_json(act));
    out["acts"] = std::move(acts);
    append_extras(out, job.extras);
    return out;
}

ojson report_to_json(const Report& report) {
    ojson out = job_to_json(report.job);
    ojson results = ojson::array();
    for (const auto& result : report.actResults) results.push_back(act_result_to_json(result));
    out["actResults"] = std::move(results);
    out["jobData"] = ojson{{"startTime", report.jobData.startTime},
                           {"endTime", report.jobData.endTime},
                           {"elapsedSeconds", report.jobData.elapsedSeconds},
                           {"agent", report.jobData.agent},
                           {"errorCount", report.jobData.errorCount}};
    return out;
}

std::string serialize_job(const Job& job) { return job_to_json(job).dump(2) + "\n"; }

std::string serialize_report(const Report& report) { return report_to_json(report).dump(2) + "\n"; }

std::vector<Violation> validate_job(const Job& job, const ToolInventory& inventory) {
    std::vector<Violation> violations;
    for (std::size_t i = 0; i < job.acts.size(); ++i) {
        const Act& act = job.acts[i];
        if (act.type != ActType::test) continue;
        auto it = inventory.tools.find(act.which);
        if (it == inventory.tools.end()) {
            violations.push_back({ViolationLevel::error, i, "unknown tool '" + act.which + "'"});
            continue;
        }
        if (!act.rules || !it->second) continue;
        for (const auto& rule : *act.rules) {
            if (!it->second->count(rule)) {
                violations.push_back({ViolationLevel::warning, i, "unknown rule " + rule});
            }
        }
    }
    return violations;
}

std::string format_utc(std::chrono::system_clock::time_point tp) {
    std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

std::optional<std::chrono::system_clock::time_point> parse_utc(const std::string& text) {
    std::tm tm_utc{};
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ%n", &tm_utc.tm_year, &tm_utc.tm_mon,
                    &tm_utc.tm_mday, &tm_utc.tm_hour, &tm_utc.tm_min, &tm_utc.tm_sec,
                    &consumed) != 6 ||
        static_cast<std::size_t>(consumed) != text.size()) {
        return std::nullopt;
    }
    if (tm_utc.tm_mon < 1 || tm_utc.tm_mon > 12 || tm_utc.tm_mday < 1 || tm_utc.tm_mday > 31 ||
        tm_utc.tm_hour > 23 || tm_utc.tm_min > 59 || tm_utc.tm_sec > 60) {
        return std::nullopt;
    }
    tm_utc.tm_year -= 1900;
    tm_utc.tm_mon -= 1;
    std::time_t t = timegm(&tm_utc);
    return std::chrono::system_clock::from_time_t(t);
}

std::string now_utc() { return format_utc(std::chrono::system_clock::now()); }

}  // namespace a11yens
