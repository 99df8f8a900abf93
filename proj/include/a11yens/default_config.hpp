// Embedded default configuration: the shipped tool registry and issue
// catalog. config/tools.json and config/catalog.json carry the same content
// for users who want to start from a file.
#pragma once

#include <string>

#include "a11yens/adapters.hpp"
#include "a11yens/ensemble.hpp"

namespace a11yens {

const std::string& default_tools_json();
const std::string& default_catalog_json();

// Parsed forms; throw std::logic_error if the embedded text is invalid.
ToolRegistry default_tool_registry();
IssueCatalog default_catalog();

}  // namespace a11yens
