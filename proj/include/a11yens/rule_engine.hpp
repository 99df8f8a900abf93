// Built-in accessibility rule engine (tool code "native"): a tag-soup
// tolerant HTML parser, XPath generation for element nodes, and a registry
// of document checks that emit standard results.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "a11yens/core_model.hpp"

namespace a11yens {

struct HtmlNode {
    std::string tag;  // uppercase element name
    std::map<std::string, std::string> attrs;  // lowercase attribute names
    std::vector<std::unique_ptr<HtmlNode>> children;
    std::string text;  // direct text content, entity-decoded
    HtmlNode* parent = nullptr;
    std::size_t sourceLine = 1;
    std::size_t sourceBegin = 0;  // byte offset of the opening '<'
    std::size_t sourceEnd = 0;    // one past the element's last source byte
    std::size_t order = 0;        // preorder document position

    bool has_attr(const std::string& name) const { return attrs.count(name) != 0; }
    std::string attr(const std::string& name) const {
        auto it = attrs.find(name);
        return it == attrs.end() ? std::string() : it->second;
    }
    std::string id() const { return attr("id"); }
};

class DocTree {
public:
    const HtmlNode& root() const { return *root_; }
    const std::string& source() const { return source_; }
    const std::vector<const HtmlNode*>& nodes() const { return preorder_; }

    // Raw outer HTML of the node, clipped to the excerpt limit.
    std::string excerpt_of(const HtmlNode& node) const;
    // Concatenated text of the node and its descendants.
    static std::string inner_text(const HtmlNode& node);

private:
    friend DocTree parse_html(const std::string& text);
    std::string source_;
    std::unique_ptr<HtmlNode> root_;
    std::vector<const HtmlNode*> preorder_;
};

// Lenient parse: unclosed tags are auto-closed, unknown elements kept, void
// elements never take children. Throws std::invalid_argument on an empty
// document.
DocTree parse_html(const std::string& text);

// Absolute XPath for a node of the tree. Positional predicates are 1-based
// among same-tag siblings and omitted when the element is the only child of
// its tag. Throws std::invalid_argument if the node is not in the tree.
std::string xpath_of(const DocTree& tree, const HtmlNode& node);

// Resolves an XPath produced by xpath_of back to its node; bare steps are
// read as [1]. Returns nullptr when no node matches.
const HtmlNode* resolve_xpath(const DocTree& tree, const std::string& path);

// Rewrites an XPath with lowercase tags and explicit [1] indices on bare
// steps, the canonical form used for cross-tool location comparison.
std::string normalize_xpath(const std::string& path);

struct RuleDef {
    std::string ruleID;
    std::string what;
    int ordinalSeverity = 1;
    std::function<std::vector<const HtmlNode*>(const DocTree&)> evaluate;
};

class RuleRegistry {
public:
    // Registry preloaded with the built-in rule set.
    static RuleRegistry with_builtin_rules();

    // Throws std::invalid_argument on a duplicate ruleID.
    void register_rule(RuleDef def);

    bool has_rule(const std::string& ruleID) const { return rules_.count(ruleID) != 0; }
    std::set<std::string> rule_ids() const;

    // Evaluates the selected rules (default: all) over the tree. Throws
    // std::invalid_argument on an unknown ruleID.
    StandardResult run_rules(const DocTree& tree,
                             const std::optional<std::vector<std::string>>& ruleIDs = {}) const;

private:
    std::map<std::string, RuleDef> rules_;
};

}  // namespace a11yens
