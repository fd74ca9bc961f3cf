#include "scholarlens/selector.hpp"

#include "scholarlens/error.hpp"
#include "scholarlens/text.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace scholarlens {

namespace {

bool ident_char(char c) {
    auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) != 0 || c == '-' || c == '_' || u >= 0x80;
}

class SelectorParser {
public:
    explicit SelectorParser(std::string_view s) : s_(s) {}

    std::vector<CssSelector::Chain> parse() {
        std::vector<CssSelector::Chain> chains;
        while (true) {
            chains.push_back(chain());
            skip_ws();
            if (at_end()) break;
            if (s_[i_] != ',') fail("unexpected '" + std::string(1, s_[i_]) + "'");
            ++i_;
        }
        return chains;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw RuleCompileError("bad selector '" + std::string(s_) + "' at " + std::to_string(i_) + ": " + why);
    }
    bool at_end() const { return i_ >= s_.size(); }
    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(s_[i_])) != 0) ++i_;
    }
    std::string ident() {
        std::size_t b = i_;
        while (!at_end() && ident_char(s_[i_])) ++i_;
        if (b == i_) fail("expected identifier");
        return text::to_lower(s_.substr(b, i_ - b));
    }

    CssSelector::Chain chain() {
        CssSelector::Chain out;
        skip_ws();
        bool child = false;
        while (true) {
            CssSelector::Step step;
            step.child = child;
            step.compound = compound();
            out.push_back(std::move(step));
            std::size_t before = i_;
            skip_ws();
            if (at_end() || s_[i_] == ',') break;
            if (s_[i_] == '>') {
                child = true;
                ++i_;
                skip_ws();
            } else if (i_ > before) {
                child = false;
            } else {
                fail("expected combinator");
            }
        }
        return out;
    }

    CssSelector::Compound compound() {
        CssSelector::Compound c;
        bool any = false;
        if (!at_end() && s_[i_] == '*') {
            ++i_;
            any = true;
        } else if (!at_end() && ident_char(s_[i_])) {
            c.tag = ident();
            any = true;
        }
        while (!at_end()) {
            char ch = s_[i_];
            if (ch == '.') {
                ++i_;
                c.classes.push_back(raw_ident());
            } else if (ch == '#') {
                ++i_;
                c.id = raw_ident();
            } else if (ch == '[') {
                ++i_;
                c.attrs.push_back(attr());
            } else if (ch == ':') {
                ++i_;
                auto p = ident();
                if (p == "first-child") c.first_child = true;
                else if (p == "last-child") c.last_child = true;
                else fail("unsupported pseudo-class ':" + p + "'");
            } else {
                break;
            }
            any = true;
        }
        if (!any) fail("empty compound selector");
        return c;
    }

    std::string raw_ident() {
        std::size_t b = i_;
        while (!at_end() && ident_char(s_[i_])) ++i_;
        if (b == i_) fail("expected name");
        return std::string(s_.substr(b, i_ - b));
    }

    CssSelector::AttrTest attr() {
        CssSelector::AttrTest t;
        skip_ws();
        t.name = ident();
        skip_ws();
        if (at_end()) fail("unterminated attribute selector");
        if (s_[i_] == ']') {
            ++i_;
            return t;
        }
        if (s_[i_] == '=') {
            t.op = '=';
            ++i_;
        } else if (i_ + 1 < s_.size() && s_[i_ + 1] == '=' && std::string_view("~^$*").find(s_[i_]) != std::string_view::npos) {
            t.op = s_[i_];
            i_ += 2;
        } else {
            fail("bad attribute operator");
        }
        skip_ws();
        if (at_end()) fail("missing attribute value");
        if (s_[i_] == '"' || s_[i_] == '\'') {
            char q = s_[i_++];
            auto close = s_.find(q, i_);
            if (close == std::string_view::npos) fail("unterminated string");
            t.value = std::string(s_.substr(i_, close - i_));
            i_ = close + 1;
        } else {
            t.value = raw_ident();
        }
        skip_ws();
        if (at_end() || s_[i_] != ']') fail("expected ']'");
        ++i_;
        return t;
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

bool has_class(const markup::Node& n, const std::string& cls) {
    const auto* v = n.attribute("class");
    if (!v) return false;
    for (const auto& w : text::split(text::collapse_ws(*v), ' '))
        if (w == cls) return true;
    return false;
}

bool attr_matches(const markup::Node& n, const CssSelector::AttrTest& t) {
    const auto* v = n.attribute(t.name);
    if (!v) return false;
    switch (t.op) {
        case 0: return true;
        case '=': return *v == t.value;
        case '^': return !t.value.empty() && text::starts_with(*v, t.value);
        case '$': return !t.value.empty() && v->size() >= t.value.size() &&
                         v->compare(v->size() - t.value.size(), t.value.size(), t.value) == 0;
        case '*': return !t.value.empty() && v->find(t.value) != std::string::npos;
        case '~': {
            for (const auto& w : text::split(text::collapse_ws(*v), ' '))
                if (w == t.value) return true;
            return false;
        }
    }
    return false;
}

bool compound_matches(const markup::Node& n, const markup::Node& parent, const CssSelector::Compound& c) {
    if (!n.is_element()) return false;
    if (!c.tag.empty() && text::to_lower(n.name) != c.tag) return false;
    if (!c.id.empty()) {
        const auto* id = n.attribute("id");
        if (!id || *id != c.id) return false;
    }
    for (const auto& cls : c.classes)
        if (!has_class(n, cls)) return false;
    for (const auto& a : c.attrs)
        if (!attr_matches(n, a)) return false;
    if (c.first_child || c.last_child) {
        auto kids = parent.elements();
        if (c.first_child && (kids.empty() || kids.front() != &n)) return false;
        if (c.last_child && (kids.empty() || kids.back() != &n)) return false;
    }
    return true;
}

// Collects elements below `context` matching steps[k..] where steps[k] must
// be a descendant (or child, when `child_only`) of `context`.
void match_from(const markup::Node& context, const CssSelector::Chain& chain, std::size_t k, bool child_only,
                std::set<const markup::Node*>& out) {
    for (const auto& c : context.children) {
        if (!c.is_element()) continue;
        if (compound_matches(c, context, chain[k].compound)) {
            if (k + 1 == chain.size()) out.insert(&c);
            else match_from(c, chain, k + 1, chain[k + 1].child, out);
        }
        if (!child_only) match_from(c, chain, k, false, out);
    }
}

}  // namespace

CssSelector CssSelector::compile(std::string_view expression) {
    CssSelector sel;
    sel.expression_ = text::trim(expression);
    if (sel.expression_.empty()) throw RuleCompileError("empty selector");
    sel.chains_ = SelectorParser(sel.expression_).parse();
    return sel;
}

std::vector<const markup::Node*> CssSelector::select(const markup::Node& context) const {
    std::set<const markup::Node*> found;
    for (const auto& chain : chains_) match_from(context, chain, 0, chain.front().child, found);
    std::vector<const markup::Node*> out(found.begin(), found.end());
    std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) { return a->order < b->order; });
    return out;
}

}  // namespace scholarlens
