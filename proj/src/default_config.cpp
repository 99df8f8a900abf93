#include <stdexcept>

#include "a11yens/default_config.hpp"

namespace a11yens {

ToolRegistry default_tool_registry() {
    Parsed<ToolRegistry> parsed = parse_tool_registry(json::parse(default_tools_json()));
    if (!parsed.ok()) throw std::logic_error("embedded tools config is invalid");
    return std::move(*parsed.value);
}

IssueCatalog default_catalog() {
    Parsed<IssueCatalog> parsed = parse_catalog(json::parse(default_catalog_json()));
    if (!parsed.ok()) throw std::logic_error("embedded catalog is invalid");
    return std::move(*parsed.value);
}

}  // namespace a11yens
