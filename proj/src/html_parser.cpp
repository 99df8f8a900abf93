#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "a11yens/rule_engine.hpp"
#include "text_util.hpp"

namespace a11yens {

namespace {

using detail::is_blank;
using detail::lower_ascii;
using detail::upper_ascii;

const std::unordered_set<std::string> kVoidElements = {
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr"};

// Elements whose content is raw text up to the matching close tag.
const std::unordered_set<std::string> kRawTextElements = {"script", "style", "title", "textarea"};

const std::unordered_set<std::string> kClosesP = {
    "address", "article", "aside", "blockquote", "details", "dialog", "div", "dl",
    "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3", "h4",
    "h5", "h6", "header", "hgroup", "hr", "main", "menu", "nav", "ol", "p", "pre",
    "section", "table", "ul", "li", "dd", "dt", "td", "th", "tr", "option", "optgroup"};

// True when an open element with tag `open_tag` is implicitly closed by an
// incoming start tag `incoming` (both lowercase).
bool auto_closes(const std::string& open_tag, const std::string& incoming) {
    if (open_tag == "p") return kClosesP.count(incoming) != 0;
    if (open_tag == "li") return incoming == "li";
    if (open_tag == "dt" || open_tag == "dd") return incoming == "dt" || incoming == "dd";
    if (open_tag == "tr") return incoming == "tr";
    if (open_tag == "td" || open_tag == "th")
        return incoming == "td" || incoming == "th" || incoming == "tr";
    if (open_tag == "thead" || open_tag == "tbody")
        return incoming == "tbody" || incoming == "tfoot";
    if (open_tag == "option") return incoming == "option" || incoming == "optgroup";
    if (open_tag == "optgroup") return incoming == "optgroup";
    if (open_tag == "head") return incoming == "body";
    return false;
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

const std::unordered_map<std::string, const char*> kNamedEntities = {
    {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""},
    {"apos", "'"}, {"nbsp", "\xC2\xA0"}};

std::string decode_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out += text[i++];
            continue;
        }
        std::size_t semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out += text[i++];
            continue;
        }
        std::string_view name = text.substr(i + 1, semi - i - 1);
        if (!name.empty() && name[0] == '#') {
            bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
            std::string digits(name.substr(hex ? 2 : 1));
            char* end = nullptr;
            unsigned long cp = std::strtoul(digits.c_str(), &end, hex ? 16 : 10);
            if (end && *end == '\0' && !digits.empty() && cp > 0 && cp <= 0x10FFFF) {
                append_utf8(out, cp);
                i = semi + 1;
                continue;
            }
        } else if (auto it = kNamedEntities.find(std::string(name)); it != kNamedEntities.end()) {
            out += it->second;
            i = semi + 1;
            continue;
        }
        out += text[i++];
    }
    return out;
}

struct LineCounter {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 1;

    std::size_t line_at(std::size_t offset) {
        for (; pos < offset && pos < text.size(); ++pos) {
            if (text[pos] == '\n') ++line;
        }
        return line;
    }
};

struct Parser {
    const std::string& text;
    LineCounter lines{text};
    std::vector<HtmlNode*> stack;
    std::vector<std::unique_ptr<HtmlNode>> top_nodes;
    std::string top_text;

    explicit Parser(const std::string& input) : text(input) {}

    void append_text(std::string_view raw) {
        std::string decoded = decode_entities(raw);
        if (stack.empty()) {
            top_text += decoded;
        } else {
            stack.back()->text += decoded;
        }
    }

    HtmlNode* attach(std::unique_ptr<HtmlNode> node) {
        HtmlNode* raw = node.get();
        if (stack.empty()) {
            top_nodes.push_back(std::move(node));
        } else {
            raw->parent = stack.back();
            stack.back()->children.push_back(std::move(node));
        }
        return raw;
    }

    void close_top(std::size_t end_offset) {
        stack.back()->sourceEnd = end_offset;
        stack.pop_back();
    }

    // Parses attributes starting after the tag name; returns the offset one
    // past the closing '>' and whether the tag was self-closing.
    std::size_t parse_attrs(std::size_t pos, std::map<std::string, std::string>& attrs,
                            bool& self_closing) {
        const std::size_t n = text.size();
        while (pos < n) {
            while (pos < n && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos < n && text[pos] == '>') return pos + 1;
            if (pos < n && text[pos] == '/') {
                ++pos;
                if (pos < n && text[pos] == '>') {
                    self_closing = true;
                    return pos + 1;
                }
                continue;
            }
            if (pos >= n) break;
            std::size_t name_begin = pos;
            while (pos < n && !std::isspace(static_cast<unsigned char>(text[pos])) &&
                   text[pos] != '=' && text[pos] != '>' && text[pos] != '/') {
                ++pos;
            }
            std::string name = lower_ascii(text.substr(name_begin, pos - name_begin));
            std::string value;
            while (pos < n && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos < n && text[pos] == '=') {
                ++pos;
                while (pos < n && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
                if (pos < n && (text[pos] == '"' || text[pos] == '\'')) {
                    char quote = text[pos++];
                    std::size_t value_begin = pos;
                    while (pos < n && text[pos] != quote) ++pos;
                    value = decode_entities(
                        std::string_view(text).substr(value_begin, pos - value_begin));
                    if (pos < n) ++pos;
                } else {
                    std::size_t value_begin = pos;
                    while (pos < n && !std::isspace(static_cast<unsigned char>(text[pos])) &&
                           text[pos] != '>') {
                        ++pos;
                    }
                    value = decode_entities(
                        std::string_view(text).substr(value_begin, pos - value_begin));
                }
            }
            if (!name.empty() && !attrs.count(name)) attrs[name] = value;
        }
        return n;
    }

    void handle_open(const std::string& name, std::map<std::string, std::string> attrs,
                     bool self_closing, std::size_t tag_begin, std::size_t tag_end) {
        while (!stack.empty() && auto_closes(lower_ascii(stack.back()->tag), name)) {
            close_top(tag_begin);
        }
        auto node = std::make_unique<HtmlNode>();
        node->tag = upper_ascii(name);
        node->attrs = std::move(attrs);
        node->sourceBegin = tag_begin;
        node->sourceLine = lines.line_at(tag_begin);
        node->sourceEnd = tag_end;
        HtmlNode* raw = attach(std::move(node));
        if (self_closing || kVoidElements.count(name)) return;
        if (kRawTextElements.count(name)) {
            consume_raw_text(raw, name, tag_end);
            return;
        }
        stack.push_back(raw);
    }

    void consume_raw_text(HtmlNode* node, const std::string& name, std::size_t content_begin) {
        std::string close = "</" + name;
        std::string lowered = lower_ascii(text.substr(content_begin));
        std::size_t rel = lowered.find(close);
        std::size_t content_end;
        std::size_t node_end;
        if (rel == std::string::npos) {
            content_end = text.size();
            node_end = text.size();
        } else {
            content_end = content_begin + rel;
            std::size_t gt = text.find('>', content_end);
            node_end = gt == std::string::npos ? text.size() : gt + 1;
        }
        std::string_view content =
            std::string_view(text).substr(content_begin, content_end - content_begin);
        node->text = (name == "script" || name == "style") ? std::string(content)
                                                           : decode_entities(content);
        node->sourceEnd = node_end;
    }

    void handle_close(const std::string& name, std::size_t close_begin, std::size_t close_end) {
        std::string upper = upper_ascii(name);
        for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
            if ((*it)->tag != upper) continue;
            while (stack.back()->tag != upper) close_top(close_begin);
            close_top(close_end);
            return;
        }
        // Unmatched close tag: dropped.
    }

    void run() {
        const std::size_t n = text.size();
        std::size_t pos = 0;
        while (pos < n) {
            if (text[pos] != '<') {
                std::size_t next = text.find('<', pos);
                if (next == std::string::npos) next = n;
                append_text(std::string_view(text).substr(pos, next - pos));
                pos = next;
                continue;
            }
            if (text.compare(pos, 4, "<!--") == 0) {
                std::size_t end = text.find("-->", pos + 4);
                pos = end == std::string::npos ? n : end + 3;
                continue;
            }
            if (text.compare(pos, 2, "<!") == 0 || text.compare(pos, 2, "<?") == 0) {
                std::size_t end = text.find('>', pos + 2);
                pos = end == std::string::npos ? n : end + 1;
                continue;
            }
            if (text.compare(pos, 2, "</") == 0) {
                std::size_t name_begin = pos + 2;
                std::size_t name_end = name_begin;
                while (name_end < n && text[name_end] != '>' &&
                       !std::isspace(static_cast<unsigned char>(text[name_end]))) {
                    ++name_end;
                }
                std::size_t gt = text.find('>', name_end);
                std::size_t close_end = gt == std::string::npos ? n : gt + 1;
                handle_close(lower_ascii(text.substr(name_begin, name_end - name_begin)), pos,
                             close_end);
                pos = close_end;
                continue;
            }
            if (pos + 1 < n && std::isalpha(static_cast<unsigned char>(text[pos + 1]))) {
                std::size_t name_begin = pos + 1;
                std::size_t name_end = name_begin;
                while (name_end < n && (std::isalnum(static_cast<unsigned char>(text[name_end])) ||
                                        text[name_end] == '-' || text[name_end] == ':' ||
                                        text[name_end] == '_')) {
                    ++name_end;
                }
                std::map<std::string, std::string> attrs;
                bool self_closing = false;
                std::size_t tag_end = parse_attrs(name_end, attrs, self_closing);
                handle_open(lower_ascii(text.substr(name_begin, name_end - name_begin)),
                            std::move(attrs), self_closing, pos, tag_end);
                pos = tag_end;
                continue;
            }
            // Stray '<' kept as text.
            append_text(std::string_view(text).substr(pos, 1));
            ++pos;
        }
        while (!stack.empty()) close_top(n);
    }
};

void index_preorder(HtmlNode& node, std::vector<const HtmlNode*>& out) {
    node.order = out.size();
    out.push_back(&node);
    for (auto& child : node.children) {
        child->parent = &node;
        index_preorder(*child, out);
    }
}

}  // namespace

DocTree parse_html(const std::string& text) {
    Parser parser(text);
    parser.run();

    DocTree tree;
    tree.source_ = text;
    bool stray_text = !is_blank(parser.top_text);
    if (parser.top_nodes.empty() && !stray_text) {
        throw std::invalid_argument("empty document");
    }
    if (parser.top_nodes.size() == 1 && !stray_text) {
        tree.root_ = std::move(parser.top_nodes.front());
    } else {
        // Fragment input: wrap everything in a synthesized html root.
        auto root = std::make_unique<HtmlNode>();
        root->tag = "HTML";
        root->sourceBegin = 0;
        root->sourceEnd = text.size();
        root->sourceLine = 1;
        root->text = parser.top_text;
        for (auto& node : parser.top_nodes) root->children.push_back(std::move(node));
        tree.root_ = std::move(root);
    }
    tree.root_->parent = nullptr;
    index_preorder(*tree.root_, tree.preorder_);
    return tree;
}

std::string DocTree::excerpt_of(const HtmlNode& node) const {
    std::size_t begin = std::min(node.sourceBegin, source_.size());
    std::size_t end = std::min(std::max(node.sourceEnd, begin), source_.size());
    return clip_excerpt(std::string_view(source_).substr(begin, end - begin));
}

std::string DocTree::inner_text(const HtmlNode& node) {
    std::string out = node.text;
    for (const auto& child : node.children) {
        out += ' ';
        out += inner_text(*child);
    }
    return out;
}

std::string xpath_of(const DocTree& tree, const HtmlNode& node) {
    const HtmlNode* walker = &node;
    while (walker->parent) walker = walker->parent;
    if (walker != &tree.root()) {
        throw std::invalid_argument("node does not belong to the tree");
    }
    std::vector<std::string> steps;
    for (const HtmlNode* cur = &node; cur; cur = cur->parent) {
        std::string step = std::string();
        for (char c : cur->tag) step += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (cur->parent) {
            std::size_t index = 0;
            std::size_t total = 0;
            for (const auto& sibling : cur->parent->children) {
                if (sibling->tag != cur->tag) continue;
                ++total;
                if (sibling.get() == cur) index = total;
            }
            if (total > 1) step += "[" + std::to_string(index) + "]";
        }
        steps.push_back(std::move(step));
    }
    std::string path;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) path += "/" + *it;
    return path;
}

namespace {

struct XPathStep {
    std::string tag;  // lowercase
    std::size_t index = 1;
};

std::optional<std::vector<XPathStep>> parse_xpath(const std::string& path) {
    if (path.empty() || path[0] != '/') return std::nullopt;
    std::vector<XPathStep> steps;
    std::size_t pos = 1;
    while (pos <= path.size()) {
        std::size_t next = path.find('/', pos);
        if (next == std::string::npos) next = path.size();
        std::string raw = path.substr(pos, next - pos);
        if (raw.empty()) return std::nullopt;
        XPathStep step;
        std::size_t bracket = raw.find('[');
        if (bracket == std::string::npos) {
            step.tag = lower_ascii(raw);
        } else {
            if (raw.back() != ']') return std::nullopt;
            step.tag = lower_ascii(raw.substr(0, bracket));
            std::string digits = raw.substr(bracket + 1, raw.size() - bracket - 2);
            if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
                return std::nullopt;
            }
            step.index = std::stoull(digits);
            if (step.index < 1) return std::nullopt;
        }
        steps.push_back(std::move(step));
        pos = next + 1;
    }
    return steps;
}

}  // namespace

const HtmlNode* resolve_xpath(const DocTree& tree, const std::string& path) {
    auto steps = parse_xpath(path);
    if (!steps || steps->empty()) return nullptr;
    const HtmlNode* cur = &tree.root();
    if (lower_ascii(cur->tag) != (*steps)[0].tag || (*steps)[0].index != 1) return nullptr;
    for (std::size_t i = 1; i < steps->size(); ++i) {
        const auto& step = (*steps)[i];
        const HtmlNode* found = nullptr;
        std::size_t seen = 0;
        for (const auto& child : cur->children) {
            if (lower_ascii(child->tag) != step.tag) continue;
            if (++seen == step.index) {
                found = child.get();
                break;
            }
        }
        if (!found) return nullptr;
        cur = found;
    }
    return cur;
}

std::string normalize_xpath(const std::string& path) {
    auto steps = parse_xpath(path);
    if (!steps) return path;
    std::string out;
    for (const auto& step : *steps) {
        out += "/" + step.tag + "[" + std::to_string(step.index) + "]";
    }
    return out;
}

}  // namespace a11yens
