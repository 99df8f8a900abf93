#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <httplib.h>

#include "a11yens/adapters.hpp"
#include "net_util.hpp"
#include "subprocess.hpp"
#include "text_util.hpp"

namespace a11yens {

namespace {

using detail::upper_ascii;

std::string str_or(const json& value, const std::string& fallback = "") {
    return value.is_string() ? value.get<std::string>() : fallback;
}

long long int_or(const json& value, long long fallback = 0) {
    if (value.is_number_integer()) return value.get<long long>();
    if (value.is_number()) return std::llround(value.get<double>());
    return fallback;
}

json field(const json& obj, const char* key) {
    if (obj.is_object() && obj.contains(key)) return obj[key];
    return json();
}

// Uppercase element name from a leading tag in an HTML snippet, if any.
std::string tag_from_html(const std::string& html) {
    if (html.size() < 2 || html[0] != '<' || !std::isalpha(static_cast<unsigned char>(html[1]))) {
        return "";
    }
    std::size_t end = 1;
    while (end < html.size() && (std::isalnum(static_cast<unsigned char>(html[end])) ||
                                 html[end] == '-')) {
        ++end;
    }
    return upper_ascii(html.substr(1, end - 1));
}

std::string substitute(const std::string& tmpl, const std::string& placeholder,
                       const std::string& value) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
        std::size_t hit = tmpl.find(placeholder, pos);
        if (hit == std::string::npos) {
            out += tmpl.substr(pos);
            return out;
        }
        out += tmpl.substr(pos, hit - pos);
        out += value;
        pos = hit + placeholder.size();
    }
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

}  // namespace

std::string to_string(ToolKind kind) {
    switch (kind) {
        case ToolKind::builtin: return "builtin";
        case ToolKind::subprocess: return "subprocess";
        case ToolKind::remote: return "remote";
    }
    return "subprocess";
}

void ToolRegistry::add(ToolSpec spec) {
    if (specs_.count(spec.code)) {
        throw std::invalid_argument("duplicate tool code '" + spec.code + "'");
    }
    specs_[spec.code] = std::move(spec);
}

const ToolSpec* ToolRegistry::find(const std::string& code) const {
    auto it = specs_.find(code);
    return it == specs_.end() ? nullptr : &it->second;
}

Parsed<ToolRegistry> parse_tool_registry(const json& config) {
    Parsed<ToolRegistry> out;
    ToolRegistry registry;
    if (!config.is_object() || !config.contains("tools") || !config["tools"].is_array()) {
        out.errors.push_back({"registry config must be an object with a 'tools' array"});
        return out;
    }
    std::size_t index = 0;
    for (const json& raw : config["tools"]) {
        std::string where = "tools[" + std::to_string(index++) + "]";
        if (!raw.is_object()) {
            out.errors.push_back({where + ": not an object"});
            continue;
        }
        ToolSpec spec;
        spec.code = str_or(field(raw, "code"));
        if (spec.code.empty()) {
            out.errors.push_back({where + ": missing code"});
            continue;
        }
        where += " (" + spec.code + ")";
        std::string kind = str_or(field(raw, "kind"));
        if (kind == "builtin") {
            spec.kind = ToolKind::builtin;
        } else if (kind == "subprocess") {
            spec.kind = ToolKind::subprocess;
        } else if (kind == "remote") {
            spec.kind = ToolKind::remote;
        } else {
            out.errors.push_back({where + ": unknown kind '" + kind + "'"});
            continue;
        }
        spec.commandTemplate = str_or(field(raw, "commandTemplate"));
        spec.endpointTemplate = str_or(field(raw, "endpointTemplate"));
        spec.parser = str_or(field(raw, "parser"));
        if (spec.kind == ToolKind::subprocess &&
            spec.commandTemplate.find("{url}") == std::string::npos) {
            out.errors.push_back({where + ": commandTemplate must contain {url}"});
        }
        if (spec.kind == ToolKind::remote && spec.endpointTemplate.empty()) {
            out.errors.push_back({where + ": remote tool needs endpointTemplate"});
        }
        if (spec.kind != ToolKind::builtin && spec.parser.empty()) {
            out.errors.push_back({where + ": missing parser"});
        }
        json map = field(raw, "severityMap");
        if (map.is_object()) {
            for (auto& [level, value] : map.items()) {
                long long severity = int_or(value, -1);
                if (severity < 0 || severity > 3) {
                    out.errors.push_back({where + ": severityMap value for '" + level +
                                          "' outside 0-3"});
                    continue;
                }
                spec.severityMap[level] = static_cast<int>(severity);
            }
        } else if (!map.is_null()) {
            out.errors.push_back({where + ": severityMap must be an object"});
        }
        json timeout = field(raw, "timeoutSeconds");
        if (!timeout.is_null()) {
            long long seconds = int_or(timeout, -1);
            if (seconds < 1) {
                out.errors.push_back({where + ": timeoutSeconds must be a positive integer"});
            } else {
                spec.timeoutSeconds = static_cast<int>(seconds);
            }
        }
        json rules = field(raw, "supportsRules");
        if (rules.is_boolean()) spec.supportsRules = rules.get<bool>();
        try {
            registry.add(std::move(spec));
        } catch (const std::invalid_argument& e) {
            out.errors.push_back({where + ": " + e.what()});
        }
    }
    if (out.errors.empty()) out.value = std::move(registry);
    return out;
}

Parsed<ToolRegistry> load_tool_registry(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        Parsed<ToolRegistry> out;
        out.errors.push_back({"cannot read " + path});
        return out;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    json config = json::parse(buffer.str(), nullptr, false);
    if (config.is_discarded()) {
        Parsed<ToolRegistry> out;
        out.errors.push_back({path + ": invalid JSON"});
        return out;
    }
    return parse_tool_registry(config);
}

ToolInventory make_inventory(const ToolRegistry& registry, const RuleRegistry& rules) {
    ToolInventory inventory;
    for (const auto& [code, spec] : registry.tools()) {
        if (spec.kind == ToolKind::builtin) {
            inventory.tools[code] = rules.rule_ids();
        } else {
            inventory.tools[code] = std::nullopt;
        }
    }
    return inventory;
}

int severity_of(const ToolSpec& spec, const std::string& nativeLevel,
                std::vector<std::string>* warnings) {
    auto it = spec.severityMap.find(nativeLevel);
    if (it != spec.severityMap.end()) return it->second;
    if (warnings) {
        warnings->push_back("unmapped severity '" + nativeLevel + "' for tool '" + spec.code +
                            "', using 1");
    }
    return 1;
}

int severity_of(const ToolRegistry& registry, const std::string& toolCode,
                const std::string& nativeLevel, std::vector<std::string>* warnings) {
    const ToolSpec* spec = registry.find(toolCode);
    if (!spec) throw std::invalid_argument("unknown tool '" + toolCode + "'");
    return severity_of(*spec, nativeLevel, warnings);
}

std::string pct_encode(std::string_view raw) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : raw) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Invocation

namespace {

Invocation invoke_subprocess(const ToolSpec& spec, const std::string& targetURL,
                             const Act& act) {
    Invocation inv;
    std::string command =
        substitute(spec.commandTemplate, "{url}", detail::shell_quote(targetURL));
    if (spec.supportsRules && act.rules && !act.rules->empty()) {
        command += " --rules " + detail::shell_quote(join(*act.rules, ","));
    }
    std::map<std::string, std::string> env;
    if (!act.browser.empty()) env["TARGET_BROWSER"] = act.browser;
    detail::ExecResult run = detail::run_with_timeout(command, spec.timeoutSeconds, env);
    if (run.timedOut) {
        inv.error = "timeout";
        return inv;
    }
    if (run.exitCode != 0) {
        inv.error = "exit status " + std::to_string(run.exitCode);
        return inv;
    }
    json payload = json::parse(run.output, nullptr, false);
    if (payload.is_discarded()) {
        inv.error = "invalid JSON output";
        return inv;
    }
    inv.ok = true;
    inv.report = {spec.code, std::move(payload), now_utc()};
    return inv;
}

Invocation invoke_remote(const ToolSpec& spec, const std::string& targetURL, const Act& act) {
    Invocation inv;
    std::string endpoint = spec.endpointTemplate;
    if (endpoint.find("{url}") != std::string::npos) {
        endpoint = substitute(endpoint, "{url}", pct_encode(targetURL));
    } else {
        endpoint += endpoint.find('?') == std::string::npos ? "?" : "&";
        endpoint += "url=" + pct_encode(targetURL);
    }
    if (spec.supportsRules && act.rules && !act.rules->empty()) {
        endpoint += "&rules=" + pct_encode(join(*act.rules, ","));
    }
    auto [base, path] = detail::split_url(endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(spec.timeoutSeconds, 0);
    client.set_read_timeout(spec.timeoutSeconds, 0);
    httplib::Result res = client.Get(path);
    if (!res) {
        inv.error = res.error() == httplib::Error::ConnectionTimeout ||
                            res.error() == httplib::Error::Read
                        ? "timeout"
                        : "connection failed";
        return inv;
    }
    if (res->status >= 400) {
        inv.error = "HTTP status " + std::to_string(res->status);
        return inv;
    }
    json payload = json::parse(res->body, nullptr, false);
    if (payload.is_discarded()) {
        inv.error = "invalid JSON output";
        return inv;
    }
    inv.ok = true;
    inv.report = {spec.code, std::move(payload), now_utc()};
    return inv;
}

}  // namespace

Invocation invoke_tool(const ToolSpec& spec, const std::string& targetURL, const Act& act) {
    auto start = std::chrono::steady_clock::now();
    Invocation inv;
    if (spec.kind == ToolKind::builtin) {
        inv.error = "builtin tool is not invocable";
    } else if (spec.kind == ToolKind::subprocess) {
        inv = invoke_subprocess(spec, targetURL, act);
    } else {
        inv = invoke_remote(spec, targetURL, act);
    }
    inv.elapsedMillis = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    return inv;
}

// ---------------------------------------------------------------------------
// Shape normalizers

namespace {

Normalized shape_mismatch(const std::string& parser, const std::string& detail) {
    Normalized out;
    out.standard.prevented = true;
    out.error = "payload does not match " + parser + ": " + detail;
    return out;
}

Normalized normalize_axe(const ToolSpec& spec, const json& payload) {
    Normalized out;
    json violations = field(payload, "violations");
    if (!violations.is_array()) return shape_mismatch(spec.parser, "missing violations array");
    for (const json& violation : violations) {
        if (!violation.is_object()) return shape_mismatch(spec.parser, "violation not an object");
        json nodes = field(violation, "nodes");
        if (!nodes.is_array()) return shape_mismatch(spec.parser, "violation without nodes array");
        std::string ruleID = str_or(field(violation, "id"));
        std::string what = str_or(field(violation, "description"));
        int severity = severity_of(spec, str_or(field(violation, "impact")), &out.warnings);
        for (const json& node : nodes) {
            if (!node.is_object()) return shape_mismatch(spec.parser, "node not an object");
            std::string selector;
            json target = field(node, "target");
            if (target.is_array() && !target.empty()) selector = str_or(target[0]);
            std::string html = str_or(field(node, "html"));
            Instance instance;
            instance.ruleID = ruleID;
            instance.what = what;
            instance.count = 1;
            instance.ordinalSeverity = severity;
            instance.tagName = tag_from_html(html);
            instance.location = selector.empty()
                                    ? Location{LocationDoc::dom, LocationType::none, ""}
                                    : Location{LocationDoc::dom, LocationType::selector, selector};
            instance.excerpt = clip_excerpt(html);
            out.standard.instances.push_back(std::move(instance));
        }
    }
    recompute_totals(out.standard);
    return out;
}

Normalized normalize_htmlcs(const ToolSpec& spec, const json& payload) {
    Normalized out;
    json messages = field(payload, "messages");
    if (!messages.is_array()) return shape_mismatch(spec.parser, "missing messages array");
    for (const json& message : messages) {
        if (!message.is_object()) return shape_mismatch(spec.parser, "message not an object");
        Instance instance;
        instance.ruleID = str_or(field(message, "code"));
        instance.what = str_or(field(message, "msg"));
        instance.count = 1;
        long long type = int_or(field(message, "type"), -1);
        instance.ordinalSeverity = severity_of(spec, std::to_string(type), &out.warnings);
        instance.tagName = upper_ascii(str_or(field(message, "element")));
        instance.location = {LocationDoc::dom, LocationType::none, ""};
        instance.excerpt = clip_excerpt(str_or(field(message, "excerpt")));
        out.standard.instances.push_back(std::move(instance));
    }
    recompute_totals(out.standard);
    return out;
}

Normalized normalize_nu(const ToolSpec& spec, const json& payload) {
    Normalized out;
    json messages = field(payload, "messages");
    if (!messages.is_array()) return shape_mismatch(spec.parser, "missing messages array");
    for (const json& message : messages) {
        if (!message.is_object()) return shape_mismatch(spec.parser, "message not an object");
        std::string type = str_or(field(message, "type"));
        std::string subType = str_or(field(message, "subType"));
        Instance instance;
        instance.ruleID = subType.empty() ? type : subType;
        instance.what = str_or(field(message, "message"));
        instance.count = 1;
        std::string level = !subType.empty() && spec.severityMap.count(subType) ? subType : type;
        instance.ordinalSeverity = severity_of(spec, level, &out.warnings);
        long long line = int_or(field(message, "lastLine"), 0);
        instance.location = line > 0
                                ? Location{LocationDoc::source, LocationType::line,
                                           std::to_string(line)}
                                : Location{LocationDoc::source, LocationType::none, ""};
        instance.excerpt = clip_excerpt(str_or(field(message, "extract")));
        out.standard.instances.push_back(std::move(instance));
    }
    recompute_totals(out.standard);
    return out;
}

Normalized normalize_wave(const ToolSpec& spec, const json& payload) {
    Normalized out;
    json categories = field(payload, "categories");
    if (!categories.is_object()) return shape_mismatch(spec.parser, "missing categories object");
    for (const char* category : {"error", "contrast", "alert"}) {
        if (!categories.contains(category)) continue;
        json items = field(categories[category], "items");
        if (!items.is_object()) return shape_mismatch(spec.parser,
                                                      "category without items object");
        int severity = severity_of(spec, category, &out.warnings);
        for (auto& [ruleID, item] : items.items()) {
            if (!item.is_object()) return shape_mismatch(spec.parser, "item not an object");
            long long count = int_or(field(item, "count"), 1);
            if (count < 1) continue;
            Instance instance;
            instance.ruleID = ruleID;
            instance.what = str_or(field(item, "description"));
            instance.count = count;
            instance.ordinalSeverity = severity;
            instance.location = {LocationDoc::dom, LocationType::none, ""};
            out.standard.instances.push_back(std::move(instance));
        }
    }
    recompute_totals(out.standard);
    return out;
}

// ibm-shape, qualweb-shape, alfa-shape: {results:[{ruleID, verdict, level,
// path?, snippet?}]} with per-tool severity vocabularies.
Normalized normalize_family(const ToolSpec& spec, const json& payload) {
    static const std::set<std::string> kPassVerdicts = {"pass", "passed", "inapplicable",
                                                        "notApplicable"};
    Normalized out;
    json results = field(payload, "results");
    if (!results.is_array()) return shape_mismatch(spec.parser, "missing results array");
    for (const json& result : results) {
        if (!result.is_object()) return shape_mismatch(spec.parser, "result not an object");
        std::string verdict = str_or(field(result, "verdict"));
        if (kPassVerdicts.count(verdict)) continue;
        std::string level = str_or(field(result, "level"));
        std::string key = !level.empty() && spec.severityMap.count(level) ? level
                          : spec.severityMap.count(verdict)              ? verdict
                          : !level.empty()                               ? level
                                                                         : verdict;
        Instance instance;
        instance.ruleID = str_or(field(result, "ruleID"));
        instance.what = instance.ruleID;
        instance.count = 1;
        instance.ordinalSeverity = severity_of(spec, key, &out.warnings);
        std::string path = str_or(field(result, "path"));
        instance.location = path.empty()
                                ? Location{LocationDoc::dom, LocationType::none, ""}
                                : Location{LocationDoc::dom, LocationType::xpath, path};
        instance.excerpt = clip_excerpt(str_or(field(result, "snippet")));
        out.standard.instances.push_back(std::move(instance));
    }
    recompute_totals(out.standard);
    return out;
}

}  // namespace

Normalized normalize(const ToolSpec& spec, const json& payload) {
    if (!payload.is_object()) return shape_mismatch(spec.parser, "payload is not an object");
    if (spec.parser == "axe-shape") return normalize_axe(spec, payload);
    if (spec.parser == "htmlcs-shape") return normalize_htmlcs(spec, payload);
    if (spec.parser == "nu-shape") return normalize_nu(spec, payload);
    if (spec.parser == "wave-shape") return normalize_wave(spec, payload);
    if (spec.parser == "ibm-shape" || spec.parser == "qualweb-shape" ||
        spec.parser == "alfa-shape") {
        return normalize_family(spec, payload);
    }
    Normalized out;
    out.standard.prevented = true;
    out.error = "unknown parser shape '" + spec.parser + "'";
    return out;
}

Normalized normalize(const ToolRegistry& registry, const std::string& toolCode,
                     const json& payload) {
    const ToolSpec* spec = registry.find(toolCode);
    if (!spec) throw std::invalid_argument("unknown tool '" + toolCode + "'");
    return normalize(*spec, payload);
}

}  // namespace a11yens
