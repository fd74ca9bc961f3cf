#include "scholarlens/markup.hpp"

#include "scholarlens/error.hpp"
#include "scholarlens/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>

namespace scholarlens::markup {

const std::string* Node::attribute(std::string_view attr_name) const {
    for (const auto& a : attributes)
        if (a.name == attr_name) return &a.value;
    return nullptr;
}

std::string Node::text_content() const {
    if (kind == NodeKind::text) return text;
    std::string out;
    for (const auto& c : children) out += c.text_content();
    return out;
}

std::vector<const Node*> Node::elements() const {
    std::vector<const Node*> out;
    for (const auto& c : children)
        if (c.is_element()) out.push_back(&c);
    return out;
}

Document::Document(std::string source, std::unique_ptr<Node> root)
    : source_(std::move(source)), root_(std::move(root)) {}

const Node* Document::document_element() const {
    for (const auto& c : root_->children)
        if (c.is_element()) return &c;
    return nullptr;
}

std::string_view Document::inner_source(const Node& n) const {
    return std::string_view(source_).substr(n.inner_begin, n.inner_end - n.inner_begin);
}

std::string_view Document::outer_source(const Node& n) const {
    return std::string_view(source_).substr(n.outer_begin, n.outer_end - n.outer_begin);
}

namespace {

bool is_name_start(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalpha(u) != 0 || c == '_' || c == ':' || u >= 0x80;
}

bool is_name_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return is_name_start(c) || std::isdigit(u) != 0 || c == '-' || c == '.';
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool is_void_element(std::string_view name) {
    static constexpr std::array<std::string_view, 14> v = {"area", "base", "br",   "col",  "embed",  "hr",    "img",
                                                            "input", "link", "meta", "param", "source", "track", "wbr"};
    return std::find(v.begin(), v.end(), name) != v.end();
}

void number_elements(Node& n, std::size_t& counter) {
    if (!n.is_element()) return;
    n.order = counter++;
    for (auto& c : n.children) number_elements(c, counter);
}

class Parser {
public:
    Parser(const std::string& src, bool xml) : src_(src), xml_(xml) {}

    std::unique_ptr<Node> run() {
        auto root = std::make_unique<Node>();
        root->name = "#document";
        root->inner_end = root->outer_end = src_.size();
        stack_.push_back(root.get());
        while (pos_ < src_.size()) {
            if (src_[pos_] == '<') {
                lt();
            } else {
                text_run();
            }
        }
        if (xml_) {
            if (stack_.size() > 1) fail("unclosed element <" + stack_.back()->name + ">", pos_);
            if (!saw_root_) fail("document has no root element", pos_);
        } else {
            while (stack_.size() > 1) close_top(src_.size(), src_.size());
        }
        std::size_t counter = 0;
        for (auto& c : root->children) number_elements(c, counter);
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& message, std::size_t at) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < at && i < src_.size(); ++i) {
            if (src_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(message, line, col);
    }

    Node* top() { return stack_.back(); }

    void add_text(std::size_t begin, std::size_t end, std::string value) {
        if (begin == end && value.empty()) return;
        if (xml_ && stack_.size() == 1) {
            for (char c : value)
                if (!is_ws(c)) fail("text outside the root element", begin);
            return;
        }
        auto& kids = top()->children;
        if (!kids.empty() && kids.back().kind == NodeKind::text && kids.back().outer_end == begin) {
            kids.back().text += value;
            kids.back().outer_end = kids.back().inner_end = end;
            return;
        }
        Node t;
        t.kind = NodeKind::text;
        t.text = std::move(value);
        t.outer_begin = t.inner_begin = begin;
        t.outer_end = t.inner_end = end;
        kids.push_back(std::move(t));
    }

    std::string decode_xml(std::string_view raw, std::size_t at) {
        std::string out;
        std::size_t i = 0;
        while (i < raw.size()) {
            char c = raw[i];
            if (c == '<') fail("'<' not allowed here", at + i);
            if (c != '&') {
                out.push_back(c);
                ++i;
                continue;
            }
            auto semi = raw.find(';', i);
            if (semi == std::string_view::npos) fail("unterminated entity reference", at + i);
            auto name = raw.substr(i + 1, semi - i - 1);
            if (!name.empty() && name[0] == '#') {
                auto decoded = text::decode_entities(raw.substr(i, semi - i + 1));
                if (decoded.size() && decoded[0] == '&') fail("bad character reference", at + i);
                out += decoded;
            } else if (name == "lt") out.push_back('<');
            else if (name == "gt") out.push_back('>');
            else if (name == "amp") out.push_back('&');
            else if (name == "quot") out.push_back('"');
            else if (name == "apos") out.push_back('\'');
            else {
                auto it = entities_.find(std::string(name));
                if (it == entities_.end()) fail("undefined entity '" + std::string(name) + "'", at + i);
                out += it->second;
            }
            i = semi + 1;
        }
        return out;
    }

    void text_run() {
        auto end = src_.find('<', pos_);
        if (end == std::string::npos) end = src_.size();
        std::string_view raw(src_.data() + pos_, end - pos_);
        add_text(pos_, end, xml_ ? decode_xml(raw, pos_) : std::string(raw));
        pos_ = end;
    }

    void lt() {
        std::string_view rest(src_.data() + pos_, src_.size() - pos_);
        if (text::starts_with(rest, "<!--")) {
            auto end = src_.find("-->", pos_ + 4);
            if (end == std::string::npos) {
                if (xml_) fail("unterminated comment", pos_);
                pos_ = src_.size();
            } else {
                pos_ = end + 3;
            }
            return;
        }
        if (text::starts_with(rest, "<![CDATA[")) {
            auto end = src_.find("]]>", pos_ + 9);
            if (end == std::string::npos) {
                if (xml_) fail("unterminated CDATA section", pos_);
                end = src_.size();
            }
            if (xml_ && stack_.size() == 1) fail("CDATA outside the root element", pos_);
            add_text(pos_, std::min(end + 3, src_.size()), src_.substr(pos_ + 9, end - pos_ - 9));
            pos_ = std::min(end + 3, src_.size());
            return;
        }
        if (text::starts_with(rest, "<!")) {
            doctype();
            return;
        }
        if (text::starts_with(rest, "<?")) {
            auto end = src_.find("?>", pos_ + 2);
            if (end == std::string::npos) {
                if (xml_) fail("unterminated processing instruction", pos_);
                pos_ = src_.size();
            } else {
                pos_ = end + 2;
            }
            return;
        }
        if (rest.size() > 1 && rest[1] == '/') {
            end_tag();
            return;
        }
        if (rest.size() > 1 && is_name_start(rest[1])) {
            start_tag();
            return;
        }
        if (xml_) fail("'<' not followed by a tag name", pos_);
        add_text(pos_, pos_ + 1, "<");
        ++pos_;
    }

    void doctype() {
        // <!DOCTYPE name [ internal subset ]>
        std::size_t i = pos_ + 2;
        int bracket = 0;
        std::size_t subset_begin = std::string::npos, subset_end = std::string::npos;
        char quote = 0;
        for (; i < src_.size(); ++i) {
            char c = src_[i];
            if (quote) {
                if (c == quote) quote = 0;
                continue;
            }
            if (c == '"' || c == '\'') quote = c;
            else if (c == '[') {
                if (bracket++ == 0) subset_begin = i + 1;
            } else if (c == ']') {
                if (--bracket == 0) subset_end = i;
            } else if (c == '>' && bracket == 0) {
                break;
            }
        }
        if (i >= src_.size()) {
            if (xml_) fail("unterminated declaration", pos_);
            pos_ = src_.size();
            return;
        }
        if (xml_ && subset_begin != std::string::npos && subset_end != std::string::npos)
            read_entities(std::string_view(src_).substr(subset_begin, subset_end - subset_begin), subset_begin);
        pos_ = i + 1;
    }

    void read_entities(std::string_view subset, std::size_t at) {
        std::size_t i = 0;
        while ((i = subset.find("<!ENTITY", i)) != std::string_view::npos) {
            std::size_t j = i + 8;
            while (j < subset.size() && is_ws(subset[j])) ++j;
            if (j < subset.size() && subset[j] == '%') {  // parameter entity; not supported, skip
                i = j;
                continue;
            }
            std::size_t name_begin = j;
            while (j < subset.size() && is_name_char(subset[j])) ++j;
            std::string name(subset.substr(name_begin, j - name_begin));
            while (j < subset.size() && is_ws(subset[j])) ++j;
            if (j >= subset.size() || (subset[j] != '"' && subset[j] != '\'')) {
                i = j;
                continue;
            }
            char q = subset[j];
            auto close = subset.find(q, j + 1);
            if (close == std::string_view::npos) fail("unterminated entity value", at + j);
            if (!name.empty()) entities_[name] = decode_xml(subset.substr(j + 1, close - j - 1), at + j + 1);
            i = close + 1;
        }
    }

    std::string read_name(std::size_t& i) {
        std::size_t b = i;
        while (i < src_.size() && is_name_char(src_[i])) ++i;
        std::string n = src_.substr(b, i - b);
        return xml_ ? n : text::to_lower(n);
    }

    void start_tag() {
        std::size_t begin = pos_;
        std::size_t i = pos_ + 1;
        Node el;
        el.name = read_name(i);
        el.outer_begin = begin;
        bool self_closing = false;
        while (true) {
            while (i < src_.size() && is_ws(src_[i])) ++i;
            if (i >= src_.size()) {
                if (xml_) fail("unterminated start tag <" + el.name + ">", begin);
                break;
            }
            if (src_[i] == '>') {
                ++i;
                break;
            }
            if (src_[i] == '/' && i + 1 < src_.size() && src_[i + 1] == '>') {
                self_closing = true;
                i += 2;
                break;
            }
            if (!is_name_start(src_[i])) {
                if (xml_) fail("malformed attribute in <" + el.name + ">", i);
                ++i;
                continue;
            }
            std::size_t attr_at = i;
            Attribute a;
            a.name = read_name(i);
            while (i < src_.size() && is_ws(src_[i])) ++i;
            if (i < src_.size() && src_[i] == '=') {
                ++i;
                while (i < src_.size() && is_ws(src_[i])) ++i;
                if (i < src_.size() && (src_[i] == '"' || src_[i] == '\'')) {
                    char q = src_[i];
                    auto close = src_.find(q, i + 1);
                    if (close == std::string::npos) {
                        if (xml_) fail("unterminated attribute value", i);
                        close = src_.size();
                    }
                    std::string_view raw(src_.data() + i + 1, close - i - 1);
                    a.value = xml_ ? decode_xml(raw, i + 1) : text::decode_entities(raw);
                    i = std::min(close + 1, src_.size());
                } else {
                    if (xml_) fail("attribute value must be quoted", i);
                    std::size_t b = i;
                    while (i < src_.size() && !is_ws(src_[i]) && src_[i] != '>') ++i;
                    a.value = text::decode_entities(std::string_view(src_.data() + b, i - b));
                }
            } else if (xml_) {
                fail("attribute '" + a.name + "' has no value", attr_at);
            }
            if (xml_ && el.attribute(a.name)) fail("duplicate attribute '" + a.name + "'", attr_at);
            el.attributes.push_back(std::move(a));
        }
        pos_ = i;
        el.inner_begin = pos_;

        if (xml_) {
            if (stack_.size() == 1) {
                if (saw_root_) fail("more than one root element", begin);
                saw_root_ = true;
            }
        } else {
            implied_close(el.name, begin);
        }

        if (self_closing || (!xml_ && is_void_element(el.name))) {
            el.inner_end = el.outer_end = pos_;
            el.inner_begin = pos_;
            top()->children.push_back(std::move(el));
            return;
        }
        if (!xml_ && (el.name == "script" || el.name == "style")) {
            auto lowered = text::to_lower(std::string_view(src_).substr(pos_));
            auto end = lowered.find("</" + el.name);
            std::size_t content_end = end == std::string::npos ? src_.size() : pos_ + end;
            if (content_end > pos_) {
                Node t;
                t.kind = NodeKind::text;
                t.text = src_.substr(pos_, content_end - pos_);
                t.outer_begin = t.inner_begin = pos_;
                t.outer_end = t.inner_end = content_end;
                el.children.push_back(std::move(t));
            }
            el.inner_end = content_end;
            auto gt = src_.find('>', content_end);
            pos_ = (end == std::string::npos || gt == std::string::npos) ? src_.size() : gt + 1;
            el.outer_end = pos_;
            top()->children.push_back(std::move(el));
            return;
        }
        top()->children.push_back(std::move(el));
        stack_.push_back(&top()->children.back());
    }

    void implied_close(const std::string& name, std::size_t at) {
        auto top_is = [&](std::initializer_list<std::string_view> names) {
            if (stack_.size() <= 1) return false;
            for (auto n : names)
                if (top()->name == n) return true;
            return false;
        };
        if (name == "li" || name == "option" || name == "dt" || name == "dd") {
            if (top_is({name})) close_top(at, at);
        } else if (name == "td" || name == "th") {
            while (top_is({"td", "th"})) close_top(at, at);
        } else if (name == "tr") {
            while (top_is({"td", "th", "tr"})) close_top(at, at);
        }
        static constexpr std::array<std::string_view, 12> p_closers = {
            "p", "div", "table", "ul", "ol", "h1", "h2", "h3", "h4", "h5", "h6", "section"};
        if (std::find(p_closers.begin(), p_closers.end(), name) != p_closers.end() && top_is({"p"}))
            close_top(at, at);
    }

    void close_top(std::size_t inner_end, std::size_t outer_end) {
        Node* n = top();
        n->inner_end = inner_end;
        n->outer_end = outer_end;
        stack_.pop_back();
    }

    void end_tag() {
        std::size_t begin = pos_;
        std::size_t i = pos_ + 2;
        std::string name = read_name(i);
        while (i < src_.size() && is_ws(src_[i])) ++i;
        if (i >= src_.size() || src_[i] != '>') {
            if (xml_) fail("malformed end tag", begin);
            auto gt = src_.find('>', i);
            i = gt == std::string::npos ? src_.size() - 1 : gt;
        }
        pos_ = i + 1;
        if (xml_) {
            if (stack_.size() <= 1) fail("unexpected end tag </" + name + ">", begin);
            if (top()->name != name)
                fail("end tag </" + name + "> does not match <" + top()->name + ">", begin);
            close_top(begin, pos_);
            return;
        }
        for (std::size_t k = stack_.size(); k-- > 1;) {
            if (stack_[k]->name == name) {
                while (stack_.size() > k + 1) close_top(begin, begin);
                close_top(begin, pos_);
                return;
            }
        }
        // Stray end tag: ignored.
    }

    const std::string& src_;
    bool xml_;
    std::size_t pos_ = 0;
    bool saw_root_ = false;
    std::vector<Node*> stack_;
    std::map<std::string, std::string> entities_;
};

}  // namespace

Document parse_html(std::string source) {
    Parser p(source, false);
    auto root = p.run();
    return Document(std::move(source), std::move(root));
}

Document parse_xml(std::string source) {
    Parser p(source, true);
    auto root = p.run();
    return Document(std::move(source), std::move(root));
}

}  // namespace scholarlens::markup
