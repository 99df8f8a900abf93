#include <algorithm>
#include <set>
#include <stdexcept>

#include "a11yens/rule_engine.hpp"
#include "text_util.hpp"

namespace a11yens {

namespace {

using detail::is_blank;
using detail::lower_ascii;

template <typename Pred>
std::vector<const HtmlNode*> collect(const DocTree& tree, Pred pred) {
    std::vector<const HtmlNode*> out;
    for (const HtmlNode* node : tree.nodes()) {
        if (pred(*node)) out.push_back(node);
    }
    return out;
}

bool named_by_attr(const HtmlNode& node, const char* name) {
    return !is_blank(node.attr(name));
}

bool has_descendant_img_alt(const HtmlNode& node) {
    for (const auto& child : node.children) {
        if (child->tag == "IMG" && !is_blank(child->attr("alt"))) return true;
        if (has_descendant_img_alt(*child)) return true;
    }
    return false;
}

bool has_label_ancestor(const HtmlNode& node) {
    for (const HtmlNode* cur = node.parent; cur; cur = cur->parent) {
        if (cur->tag == "LABEL") return true;
    }
    return false;
}

int heading_level(const std::string& tag) {
    if (tag.size() == 2 && tag[0] == 'H' && tag[1] >= '1' && tag[1] <= '6') return tag[1] - '0';
    return 0;
}

const HtmlNode* first_of_tag(const DocTree& tree, const std::string& tag) {
    for (const HtmlNode* node : tree.nodes()) {
        if (node->tag == tag) return node;
    }
    return nullptr;
}

std::vector<const HtmlNode*> eval_image_no_alt(const DocTree& tree) {
    return collect(tree, [](const HtmlNode& n) { return n.tag == "IMG" && !n.has_attr("alt"); });
}

std::vector<const HtmlNode*> eval_link_no_name(const DocTree& tree) {
    return collect(tree, [](const HtmlNode& n) {
        if (n.tag != "A" || !n.has_attr("href")) return false;
        if (!is_blank(DocTree::inner_text(n))) return false;
        if (named_by_attr(n, "aria-label") || named_by_attr(n, "title")) return false;
        return !has_descendant_img_alt(n);
    });
}

std::vector<const HtmlNode*> eval_internal_link_broken(const DocTree& tree) {
    std::set<std::string> ids;
    for (const HtmlNode* node : tree.nodes()) {
        if (!node->id().empty()) ids.insert(node->id());
    }
    return collect(tree, [&ids](const HtmlNode& n) {
        if (n.tag != "A") return false;
        std::string href = n.attr("href");
        return href.size() > 1 && href[0] == '#' && ids.count(href.substr(1)) == 0;
    });
}

// Flags the second and later occurrences of each shared id value.
std::vector<const HtmlNode*> eval_duplicate_id(const DocTree& tree) {
    std::set<std::string> seen;
    std::vector<const HtmlNode*> out;
    for (const HtmlNode* node : tree.nodes()) {
        std::string id = node->id();
        if (id.empty()) continue;
        if (!seen.insert(id).second) out.push_back(node);
    }
    return out;
}

std::vector<const HtmlNode*> eval_heading_skip(const DocTree& tree) {
    std::vector<const HtmlNode*> out;
    int previous = 0;
    for (const HtmlNode* node : tree.nodes()) {
        int level = heading_level(node->tag);
        if (level == 0) continue;
        if (previous != 0 && level > previous + 1) out.push_back(node);
        previous = level;
    }
    return out;
}

std::vector<const HtmlNode*> eval_doc_lang_missing(const DocTree& tree) {
    const HtmlNode* html = first_of_tag(tree, "HTML");
    const HtmlNode* subject = html ? html : &tree.root();
    if (is_blank(subject->attr("lang"))) return {subject};
    return {};
}

std::vector<const HtmlNode*> eval_title_missing(const DocTree& tree) {
    for (const HtmlNode* node : tree.nodes()) {
        if (node->tag == "TITLE" && !is_blank(DocTree::inner_text(*node))) return {};
    }
    const HtmlNode* head = first_of_tag(tree, "HEAD");
    return {head ? head : &tree.root()};
}

std::vector<const HtmlNode*> eval_button_no_name(const DocTree& tree) {
    return collect(tree, [](const HtmlNode& n) {
        if (n.tag != "BUTTON") return false;
        return is_blank(DocTree::inner_text(n)) && !named_by_attr(n, "aria-label");
    });
}

std::vector<const HtmlNode*> eval_input_no_label(const DocTree& tree) {
    std::set<std::string> labeled_ids;
    for (const HtmlNode* node : tree.nodes()) {
        if (node->tag == "LABEL" && !node->attr("for").empty()) {
            labeled_ids.insert(node->attr("for"));
        }
    }
    return collect(tree, [&labeled_ids](const HtmlNode& n) {
        if (n.tag != "INPUT" || lower_ascii(n.attr("type")) == "hidden") return false;
        if (named_by_attr(n, "aria-label") || named_by_attr(n, "title")) return false;
        if (!n.id().empty() && labeled_ids.count(n.id())) return false;
        return !has_label_ancestor(n);
    });
}

std::vector<const HtmlNode*> eval_iframe_no_title(const DocTree& tree) {
    return collect(tree, [](const HtmlNode& n) {
        return n.tag == "IFRAME" && is_blank(n.attr("title"));
    });
}

}  // namespace

RuleRegistry RuleRegistry::with_builtin_rules() {
    RuleRegistry registry;
    registry.register_rule({"imageNoAlt", "img element has no text alternative", 3,
                            eval_image_no_alt});
    registry.register_rule({"linkNoName", "link has no accessible name", 3, eval_link_no_name});
    registry.register_rule({"internalLinkBroken", "same-page link points to a missing fragment",
                            2, eval_internal_link_broken});
    registry.register_rule({"duplicateID", "id value is used by more than one element", 2,
                            eval_duplicate_id});
    registry.register_rule({"headingSkip", "heading level skips one or more levels", 1,
                            eval_heading_skip});
    registry.register_rule({"docLangMissing", "document has no declared language", 2,
                            eval_doc_lang_missing});
    registry.register_rule({"titleMissing", "document has no non-empty title", 2,
                            eval_title_missing});
    registry.register_rule({"buttonNoName", "button has no accessible name", 3,
                            eval_button_no_name});
    registry.register_rule({"inputNoLabel", "form input has no label", 3, eval_input_no_label});
    registry.register_rule({"iframeNoTitle", "iframe has no title attribute", 2,
                            eval_iframe_no_title});
    return registry;
}

void RuleRegistry::register_rule(RuleDef def) {
    if (rules_.count(def.ruleID)) {
        throw std::invalid_argument("duplicate rule '" + def.ruleID + "'");
    }
    rules_[def.ruleID] = std::move(def);
}

std::set<std::string> RuleRegistry::rule_ids() const {
    std::set<std::string> out;
    for (const auto& [id, def] : rules_) out.insert(id);
    return out;
}

StandardResult RuleRegistry::run_rules(
    const DocTree& tree, const std::optional<std::vector<std::string>>& ruleIDs) const {
    std::vector<const RuleDef*> selected;
    if (ruleIDs) {
        std::set<std::string> picked;
        for (const std::string& id : *ruleIDs) {
            auto it = rules_.find(id);
            if (it == rules_.end()) throw std::invalid_argument("unknown rule '" + id + "'");
            if (picked.insert(id).second) selected.push_back(&it->second);
        }
    } else {
        for (const auto& [id, def] : rules_) selected.push_back(&def);
    }

    struct Hit {
        const HtmlNode* node;
        const RuleDef* def;
    };
    std::vector<Hit> hits;
    for (const RuleDef* def : selected) {
        for (const HtmlNode* node : def->evaluate(tree)) hits.push_back({node, def});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        if (a.node->order != b.node->order) return a.node->order < b.node->order;
        return a.def->ruleID < b.def->ruleID;
    });

    StandardResult result;
    for (const Hit& hit : hits) {
        Instance instance;
        instance.ruleID = hit.def->ruleID;
        instance.what = hit.def->what;
        instance.count = 1;
        instance.ordinalSeverity = hit.def->ordinalSeverity;
        instance.tagName = hit.node->tag;
        instance.id = hit.node->id();
        instance.location = {LocationDoc::dom, LocationType::xpath, xpath_of(tree, *hit.node)};
        instance.excerpt = tree.excerpt_of(*hit.node);
        result.instances.push_back(std::move(instance));
    }
    recompute_totals(result);
    return result;
}

}  // namespace a11yens
