// Job generation (script x targets), round-robin partitioning across shards,
// and deterministic merging of shard reports.
#pragma once

#include <string>
#include <vector>

#include "a11yens/core_model.hpp"

namespace a11yens {

struct Script {
    std::string id;
    std::string what;
    std::vector<Act> acts;  // navigate acts may use the __TARGET__ placeholder
};

struct TargetEntry {
    std::string id;
    std::string what;
    std::string url;
};

struct TargetList {
    std::vector<TargetEntry> targets;
};

// script.json: {id, what, acts}; needs at least one test act.
Parsed<Script> parse_script(const json& raw);
Parsed<Script> load_script(const std::string& path);

// targets.json: {targets:[{id, what, url}]}; ids unique, urls absolute.
Parsed<TargetList> parse_targets(const json& raw);
Parsed<TargetList> load_targets(const std::string& path);

// One job per target; `__TARGET__` in navigate acts replaced by the target
// URL; job id `<script.id>-<target.id>`. Throws std::invalid_argument when
// targets are present but no navigate act carries the placeholder.
std::vector<Job> make_jobs(const Script& script, const TargetList& targets,
                           const std::string& timeStamp);

// Round-robin split of test acts across shards; non-test acts preceding any
// test act are replicated into every shard; empty shards are dropped. Shard
// ids are `<job.id>.p<k>`; each shard records its original act indices under
// the `sourceActIndices` extra for merging.
std::vector<Job> partition(const Job& job, int shards);

// Reassembles shard reports into a report over the original job. Throws
// std::invalid_argument on missing or duplicate coverage of a test act.
Report merge(const std::vector<Report>& shardReports, const Job& original);

}  // namespace a11yens
