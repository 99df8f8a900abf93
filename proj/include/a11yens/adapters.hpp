// Tool registry and adapters: invocation of external tools (subprocess or
// remote HTTP) and normalization of their native report shapes into
// standard results.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "a11yens/core_model.hpp"
#include "a11yens/rule_engine.hpp"

namespace a11yens {

enum class ToolKind { builtin, subprocess, remote };

std::string to_string(ToolKind kind);

struct ToolSpec {
    std::string code;
    ToolKind kind = ToolKind::subprocess;
    std::string commandTemplate;   // subprocess: shell command with {url}
    std::string endpointTemplate;  // remote: HTTP endpoint
    std::string parser;            // shape id, e.g. "axe-shape"
    std::map<std::string, int> severityMap;
    int timeoutSeconds = 30;
    bool supportsRules = false;

    bool operator==(const ToolSpec&) const = default;
};

class ToolRegistry {
public:
    void add(ToolSpec spec);  // throws std::invalid_argument on duplicate code
    const ToolSpec* find(const std::string& code) const;
    std::size_t size() const { return specs_.size(); }
    const std::map<std::string, ToolSpec>& tools() const { return specs_; }

private:
    std::map<std::string, ToolSpec> specs_;
};

// Registry config: {"tools":[{code, kind, commandTemplate | endpointTemplate,
// parser, severityMap, timeoutSeconds}]}.
Parsed<ToolRegistry> parse_tool_registry(const json& config);
Parsed<ToolRegistry> load_tool_registry(const std::string& path);

// Inventory for job validation: builtin tools enumerate their rules, external
// tools accept any rule list.
ToolInventory make_inventory(const ToolRegistry& registry, const RuleRegistry& rules);

// Severity lookup with the degrade-to-1 fallback for unmapped levels; the
// fallback appends a note to `warnings` when given.
int severity_of(const ToolSpec& spec, const std::string& nativeLevel,
                std::vector<std::string>* warnings = nullptr);
int severity_of(const ToolRegistry& registry, const std::string& toolCode,
                const std::string& nativeLevel, std::vector<std::string>* warnings = nullptr);

struct NativeReport {
    std::string toolCode;
    json payload;
    std::string fetchedAt;
};

// Raw outcome of one tool invocation.
struct Invocation {
    bool ok = false;
    std::string error;  // "timeout", "connection failed", "exit status N", ...
    NativeReport report;
    long long elapsedMillis = 0;
};

// Runs a non-builtin tool against a target URL. Never throws; failures are
// reported through `ok`/`error`.
Invocation invoke_tool(const ToolSpec& spec, const std::string& targetURL, const Act& act);

struct Normalized {
    StandardResult standard;
    std::vector<std::string> warnings;
    std::optional<std::string> error;  // set iff standard.prevented
};

// Converts a native payload into a StandardResult using the tool's shape parser.
// Never throws: payloads that do not match the declared shape come back
// prevented with a diagnostic.
Normalized normalize(const ToolSpec& spec, const json& payload);
Normalized normalize(const ToolRegistry& registry, const std::string& toolCode,
                     const json& payload);

std::string pct_encode(std::string_view raw);

}  // namespace a11yens
