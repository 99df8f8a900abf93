#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "a11yens/jobgen.hpp"

namespace a11yens {

namespace {

constexpr const char* kPlaceholder = "__TARGET__";

json read_json_file(const std::string& path, std::vector<ParseError>& errors) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        errors.push_back({"cannot read " + path});
        return json();
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    json raw = json::parse(buffer.str(), nullptr, false);
    if (raw.is_discarded()) {
        errors.push_back({path + ": invalid JSON"});
        return json();
    }
    return raw;
}

std::string replace_all(std::string text, const std::string& needle, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return text;
}

}  // namespace

Parsed<Script> parse_script(const json& raw) {
    Parsed<Script> out;
    if (!raw.is_object()) {
        out.errors.push_back({"script must be a JSON object"});
        return out;
    }
    Script script;
    script.id = raw.value("id", "");
    if (!is_valid_job_id(script.id)) {
        out.errors.push_back({"script id '" + script.id + "' is not filesystem-safe"});
    }
    script.what = raw.value("what", "");
    Parsed<std::vector<Act>> acts = parse_acts(raw.contains("acts") ? raw["acts"] : json());
    for (const ParseError& error : acts.errors) out.errors.push_back(error);
    if (acts.value) {
        script.acts = std::move(*acts.value);
        bool has_test = std::any_of(script.acts.begin(), script.acts.end(),
                                    [](const Act& act) { return act.type == ActType::test; });
        if (!has_test) out.errors.push_back({"script needs at least one test act"});
    }
    if (out.errors.empty()) out.value = std::move(script);
    return out;
}

Parsed<Script> load_script(const std::string& path) {
    Parsed<Script> out;
    json raw = read_json_file(path, out.errors);
    if (!out.errors.empty()) return out;
    return parse_script(raw);
}

Parsed<TargetList> parse_targets(const json& raw) {
    Parsed<TargetList> out;
    if (!raw.is_object() || !raw.contains("targets") || !raw["targets"].is_array()) {
        out.errors.push_back({"targets file must be an object with a 'targets' array"});
        return out;
    }
    TargetList list;
    std::set<std::string> ids;
    std::size_t index = 0;
    for (const json& entry : raw["targets"]) {
        std::string where = "targets[" + std::to_string(index++) + "]";
        if (!entry.is_object()) {
            out.errors.push_back({where + ": not an object"});
            continue;
        }
        TargetEntry target;
        target.id = entry.value("id", "");
        target.what = entry.value("what", "");
        target.url = entry.value("url", "");
        if (!is_valid_job_id(target.id)) {
            out.errors.push_back({where + ": id '" + target.id + "' is not filesystem-safe"});
            continue;
        }
        if (!ids.insert(target.id).second) {
            out.errors.push_back({where + ": duplicate id '" + target.id + "'"});
            continue;
        }
        if (target.url.find("://") == std::string::npos) {
            out.errors.push_back({where + ": url '" + target.url + "' is not absolute"});
            continue;
        }
        list.targets.push_back(std::move(target));
    }
    if (out.errors.empty()) out.value = std::move(list);
    return out;
}

Parsed<TargetList> load_targets(const std::string& path) {
    Parsed<TargetList> out;
    json raw = read_json_file(path, out.errors);
    if (!out.errors.empty()) return out;
    return parse_targets(raw);
}

std::vector<Job> make_jobs(const Script& script, const TargetList& targets,
                           const std::string& timeStamp) {
    std::vector<Job> jobs;
    if (targets.targets.empty()) return jobs;
    bool has_placeholder =
        std::any_of(script.acts.begin(), script.acts.end(), [](const Act& act) {
            return act.type == ActType::navigate &&
                   act.which.find(kPlaceholder) != std::string::npos;
        });
    if (!has_placeholder) {
        throw std::invalid_argument("script has no " + std::string(kPlaceholder) +
                                    " navigate placeholder");
    }
    for (const TargetEntry& target : targets.targets) {
        Job job;
        job.id = script.id + "-" + target.id;
        job.what = script.what;
        job.timeStamp = timeStamp;
        job.target = {target.url, target.what};
        job.acts = script.acts;
        for (Act& act : job.acts) {
            if (act.type == ActType::navigate) {
                act.which = replace_all(act.which, kPlaceholder, target.url);
            }
        }
        jobs.push_back(std::move(job));
    }
    return jobs;
}

std::vector<Job> partition(const Job& job, int shards) {
    if (shards < 1) throw std::invalid_argument("shards must be >= 1");
    std::size_t last_test = job.acts.size();  // one past the last test act
    for (std::size_t i = job.acts.size(); i > 0; --i) {
        if (job.acts[i - 1].type == ActType::test) {
            last_test = i - 1;
            break;
        }
    }
    if (last_test == job.acts.size()) return {};  // no test acts, nothing to shard

    std::vector<Job> out;
    for (int k = 0; k < shards; ++k) {
        Job shard;
        shard.id = job.id + ".p" + std::to_string(k + 1);
        shard.what = job.what;
        shard.timeStamp = job.timeStamp;
        shard.target = job.target;
        shard.extras = job.extras;
        json indices = json::array();
        std::size_t test_index = 0;
        for (std::size_t i = 0; i < job.acts.size(); ++i) {
            const Act& act = job.acts[i];
            if (act.type == ActType::test) {
                if (static_cast<int>(test_index % shards) == k) {
                    shard.acts.push_back(act);
                    indices.push_back(i);
                }
                ++test_index;
            } else if (i < last_test) {
                shard.acts.push_back(act);
                indices.push_back(i);
            }
        }
        bool has_test = std::any_of(shard.acts.begin(), shard.acts.end(),
                                    [](const Act& act) { return act.type == ActType::test; });
        if (!has_test) continue;
        shard.extras["sourceActIndices"] = std::move(indices);
        out.push_back(std::move(shard));
    }
    return out;
}

Report merge(const std::vector<Report>& shardReports, const Job& original) {
    std::vector<std::optional<ActResult>> slots(original.acts.size());
    std::string startTime;
    std::string endTime;
    long long errorCount = 0;
    std::string agent;

    for (const Report& shard : shardReports) {
        if (shard.actResults.size() != shard.job.acts.size()) {
            throw std::invalid_argument("shard report '" + shard.job.id +
                                        "' has misaligned act results");
        }
        std::vector<std::size_t> mapping;
        json indices = shard.job.extras.is_object()
                           ? shard.job.extras.value("sourceActIndices", json())
                           : json();
        if (indices.is_array()) {
            for (const json& value : indices) {
                if (!value.is_number_unsigned() && !value.is_number_integer()) {
                    throw std::invalid_argument("shard report '" + shard.job.id +
                                                "' has a malformed sourceActIndices entry");
                }
                mapping.push_back(value.get<std::size_t>());
            }
        } else if (shard.job.acts == original.acts) {
            for (std::size_t i = 0; i < original.acts.size(); ++i) mapping.push_back(i);
        } else {
            throw std::invalid_argument("shard report '" + shard.job.id +
                                        "' lacks sourceActIndices");
        }
        if (mapping.size() != shard.job.acts.size()) {
            throw std::invalid_argument("shard report '" + shard.job.id +
                                        "' sourceActIndices length mismatch");
        }
        for (std::size_t j = 0; j < mapping.size(); ++j) {
            std::size_t oi = mapping[j];
            if (oi >= original.acts.size()) {
                throw std::invalid_argument("shard report '" + shard.job.id +
                                            "' maps to act " + std::to_string(oi) +
                                            " outside the original job");
            }
            if (original.acts[oi].type == ActType::test) {
                if (slots[oi]) {
                    throw std::invalid_argument("duplicate act coverage for test act " +
                                                std::to_string(oi));
                }
                slots[oi] = shard.actResults[j];
            } else if (!slots[oi]) {
                slots[oi] = shard.actResults[j];
            }
        }
        const std::string& s = shard.jobData.startTime;
        const std::string& e = shard.jobData.endTime;
        if (!s.empty() && (startTime.empty() || s < startTime)) startTime = s;
        if (!e.empty() && (endTime.empty() || e > endTime)) endTime = e;
        errorCount += shard.jobData.errorCount;
        if (agent.empty()) agent = shard.jobData.agent;
    }

    Report merged;
    merged.job = original;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) {
            merged.actResults.push_back(std::move(*slots[i]));
        } else if (original.acts[i].type == ActType::test) {
            throw std::invalid_argument("missing act coverage for test act " +
                                        std::to_string(i));
        } else {
            merged.actResults.push_back(NavOutcome{true, "not executed", 0});
        }
    }
    merged.jobData.startTime = startTime;
    merged.jobData.endTime = endTime;
    auto begin = parse_utc(startTime);
    auto end = parse_utc(endTime);
    if (begin && end && *end > *begin) {
        merged.jobData.elapsedSeconds =
            std::chrono::duration_cast<std::chrono::seconds>(*end - *begin).count();
    }
    merged.jobData.agent = agent;
    merged.jobData.errorCount = errorCount;
    return merged;
}

}  // namespace a11yens
