#include "scholarlens/extraction.hpp"

#include "scholarlens/config.hpp"
#include "scholarlens/error.hpp"
#include "scholarlens/hash.hpp"
#include "scholarlens/json_path.hpp"
#include "scholarlens/markup.hpp"
#include "scholarlens/selector.hpp"
#include "scholarlens/text.hpp"

#include <boost/regex.hpp>
#include <nlohmann/json.hpp>

#include <cctype>

namespace scholarlens {

std::string to_string(MediaKind kind) { return kind == MediaKind::json ? "json" : "html"; }

MediaKind sniff_media(const std::string& content_type, const std::string& body) {
    auto ct = text::to_lower(content_type);
    if (ct.find("json") != std::string::npos) return MediaKind::json;
    if (ct.find("html") != std::string::npos || ct.find("xml") != std::string::npos) return MediaKind::html;
    for (char c : body) {
        if (std::isspace(static_cast<unsigned char>(c)) != 0) continue;
        return (c == '{' || c == '[') ? MediaKind::json : MediaKind::html;
    }
    return MediaKind::html;
}

namespace {

PostFilter parse_filter(const std::string& name) {
    if (name == "trim") return PostFilter::trim;
    if (name == "strip_markup") return PostFilter::strip_markup;
    if (name == "decode_entities") return PostFilter::decode_entities;
    if (name == "collapse_ws") return PostFilter::collapse_ws;
    if (name == "lowercase") return PostFilter::lowercase;
    throw RuleCompileError("unknown post-filter '" + name + "'");
}

std::string apply_filters(std::string value, const std::vector<PostFilter>& filters) {
    for (auto f : filters) {
        switch (f) {
            case PostFilter::trim: value = text::trim(value); break;
            case PostFilter::strip_markup: value = text::strip_markup(value); break;
            case PostFilter::decode_entities: value = text::decode_entities(value); break;
            case PostFilter::collapse_ws: value = text::collapse_ws(value); break;
            case PostFilter::lowercase: value = text::to_lower(value); break;
        }
    }
    return value;
}

struct CssRule {
    CssSelector selector;
    std::optional<std::string> attribute;
};

CssRule compile_css(const std::string& expression) {
    auto expr = text::trim(expression);
    std::optional<std::string> attr;
    auto at = expr.rfind('@');
    if (at != std::string::npos) {
        attr = text::to_lower(text::trim(std::string_view(expr).substr(at + 1)));
        if (attr->empty()) throw RuleCompileError("empty attribute name in '" + expression + "'");
        expr = text::trim(std::string_view(expr).substr(0, at));
    }
    return {CssSelector::compile(expr), attr};
}

boost::regex compile_regex(const std::string& expression) {
    try {
        return boost::regex(expression, boost::regex::perl);
    } catch (const boost::regex_error& e) {
        throw RuleCompileError("bad regular expression '" + expression + "': " + e.what());
    }
}

std::string regex_capture(const boost::smatch& m) { return m.size() > 1 ? m[1].str() : m[0].str(); }

std::vector<std::string> css_values(const markup::Document& doc, const markup::Node& scope, const CssRule& rule) {
    std::vector<std::string> out;
    for (const auto* n : rule.selector.select(scope)) {
        if (rule.attribute) {
            if (const auto* v = n->attribute(*rule.attribute)) out.push_back(*v);
        } else {
            out.emplace_back(doc.inner_source(*n));
        }
    }
    return out;
}

std::vector<std::string> regex_values(const std::string& block, const boost::regex& re) {
    std::vector<std::string> out;
    for (boost::sregex_iterator it(block.begin(), block.end(), re), end; it != end; ++it)
        out.push_back(regex_capture(*it));
    return out;
}

std::vector<std::string> json_values(const nlohmann::json& scope, const JsonPath& path) {
    std::vector<std::string> out;
    for (const auto* v : path.evaluate(scope)) {
        if (v->is_null() || v->is_object() || v->is_array()) continue;
        out.push_back(json_scalar_text(*v));
    }
    return out;
}

nlohmann::json parse_json_body(const std::string& body) {
    try {
        return nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < body.size(); ++i) {
            if (body[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(std::string("invalid JSON: ") + e.what(), line, col);
    }
}

void check_media(const RawDocument& doc, const ExtractionRuleSet& rules) {
    if (doc.media_kind != rules.media)
        throw UnsupportedMediaError("ruleset for '" + rules.source_id + "' handles " + to_string(rules.media) +
                                    ", document is " + to_string(doc.media_kind));
}

std::vector<std::string> split_list(const std::string& value, char sep) {
    std::vector<std::string> out;
    for (auto& part : text::split(value, sep)) {
        auto t = text::trim(part);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

}  // namespace

ExtractionRuleSet ExtractionRuleSet::from_config(const KeyValueConfig& cfg) {
    ExtractionRuleSet r;
    r.source_id = cfg.require("ruleset", "source_id");
    auto media = cfg.get_or("ruleset", "media", "html");
    if (media == "html") r.media = MediaKind::html;
    else if (media == "json") r.media = MediaKind::json;
    else throw ConfigError(cfg.origin() + ": unknown media '" + media + "'");
    auto syntax = cfg.get_or("ruleset", "syntax", r.media == MediaKind::json ? "jsonpath" : "css");
    if (syntax == "css") r.syntax = RuleSyntax::css;
    else if (syntax == "regex") r.syntax = RuleSyntax::regex;
    else if (syntax == "jsonpath") r.syntax = RuleSyntax::jsonpath;
    else throw ConfigError(cfg.origin() + ": unknown rule syntax '" + syntax + "'");

    r.record_rule = cfg.get_or("record", "select", "");
    for (const auto& section : cfg.sections()) {
        if (!text::starts_with(section, "field.")) continue;
        auto name = section.substr(6);
        FieldRule f;
        f.expression = cfg.get_or(section, "select", "");
        auto filters = cfg.get("field." + name, "filters");
        if (filters) {
            for (const auto& fname : split_list(*filters, ',')) f.filters.push_back(parse_filter(fname));
        } else {
            f.filters.push_back(PostFilter::trim);
        }
        r.field_rules.emplace(name, std::move(f));
    }
    if (auto p = cfg.get("pagination", "select"); p && !p->empty()) r.pagination_rule = *p;
    if (auto seps = cfg.get("transform", "author_separators")) r.author_separators = split_list(*seps, '|');
    r.validate();
    return r;
}

ExtractionRuleSet ExtractionRuleSet::load(const std::filesystem::path& path) {
    return from_config(KeyValueConfig::load(path));
}

void ExtractionRuleSet::validate() const {
    if (source_id.empty()) throw ConfigError("ruleset has no source_id");
    if (text::trim(record_rule).empty()) throw ConfigError("ruleset '" + source_id + "' has no record rule");
    if (!field_rules.count("title")) throw ConfigError("ruleset '" + source_id + "' has no title field rule");
    if (syntax == RuleSyntax::jsonpath && media != MediaKind::json)
        throw ConfigError("ruleset '" + source_id + "': jsonpath rules need media = json");
    if (syntax != RuleSyntax::jsonpath && media == MediaKind::json)
        throw ConfigError("ruleset '" + source_id + "': json media needs jsonpath rules");
    std::vector<std::string> exprs{record_rule};
    for (const auto& [name, f] : field_rules) {
        if (text::trim(f.expression).empty())
            throw ConfigError("ruleset '" + source_id + "': field '" + name + "' has no select rule");
        exprs.push_back(f.expression);
    }
    if (pagination_rule) exprs.push_back(*pagination_rule);
    for (const auto& e : exprs) {
        switch (syntax) {
            case RuleSyntax::css: compile_css(e); break;
            case RuleSyntax::regex: compile_regex(e); break;
            case RuleSyntax::jsonpath: JsonPath::compile(e); break;
        }
    }
}

IntermediateDoc extract_entries(const RawDocument& doc, const ExtractionRuleSet& rules) {
    if (doc.source_id != rules.source_id)
        throw ConfigError("ruleset '" + rules.source_id + "' applied to a document from '" + doc.source_id + "'");
    check_media(doc, rules);

    IntermediateDoc out;
    out.source_id = doc.source_id;
    std::vector<std::map<std::string, std::vector<std::string>>> blocks;

    switch (rules.syntax) {
        case RuleSyntax::css: {
            auto record = compile_css(rules.record_rule);
            std::vector<std::pair<std::string, CssRule>> fields;
            for (const auto& [name, f] : rules.field_rules) fields.emplace_back(name, compile_css(f.expression));
            auto dom = markup::parse_html(doc.body);
            for (const auto* block : record.selector.select(dom.root())) {
                auto& b = blocks.emplace_back();
                for (const auto& [name, rule] : fields) b[name] = css_values(dom, *block, rule);
            }
            break;
        }
        case RuleSyntax::regex: {
            auto record = compile_regex(rules.record_rule);
            std::vector<std::pair<std::string, boost::regex>> fields;
            for (const auto& [name, f] : rules.field_rules) fields.emplace_back(name, compile_regex(f.expression));
            for (const auto& block : regex_values(doc.body, record)) {
                auto& b = blocks.emplace_back();
                for (const auto& [name, re] : fields) b[name] = regex_values(block, re);
            }
            break;
        }
        case RuleSyntax::jsonpath: {
            auto record = JsonPath::compile(rules.record_rule);
            std::vector<std::pair<std::string, JsonPath>> fields;
            for (const auto& [name, f] : rules.field_rules) fields.emplace_back(name, JsonPath::compile(f.expression));
            if (text::trim(doc.body).empty()) break;
            auto json = parse_json_body(doc.body);
            for (const auto* block : record.evaluate(json)) {
                auto& b = blocks.emplace_back();
                for (const auto& [name, path] : fields) b[name] = json_values(*block, path);
            }
            break;
        }
    }

    std::size_t index = 0;
    for (auto& block : blocks) {
        ++index;
        std::map<std::string, std::string> entry;
        for (auto& [name, values] : block) {
            std::vector<std::string> kept;
            for (auto& v : values) {
                auto filtered = apply_filters(std::move(v), rules.field_rules.at(name).filters);
                if (!text::trim(filtered).empty()) kept.push_back(std::move(filtered));
            }
            if (!kept.empty()) entry[name] = text::join(kept, "; ");
        }
        if (!entry.count("title")) {
            out.warnings.push_back(doc.source_id + ": record block " + std::to_string(index) +
                                   " has no title; dropped");
            continue;
        }
        out.entries.push_back(std::move(entry));
    }
    return out;
}

std::optional<std::string> find_next_page(const RawDocument& doc, const ExtractionRuleSet& rules) {
    if (!rules.pagination_rule) return std::nullopt;
    check_media(doc, rules);
    std::vector<std::string> values;
    switch (rules.syntax) {
        case RuleSyntax::css: {
            auto rule = compile_css(*rules.pagination_rule);
            auto dom = markup::parse_html(doc.body);
            values = css_values(dom, dom.root(), rule);
            for (auto& v : values) v = text::decode_entities(text::strip_markup(v));
            break;
        }
        case RuleSyntax::regex:
            values = regex_values(doc.body, compile_regex(*rules.pagination_rule));
            for (auto& v : values) v = text::decode_entities(v);
            break;
        case RuleSyntax::jsonpath:
            if (text::trim(doc.body).empty()) break;
            values = json_values(parse_json_body(doc.body), JsonPath::compile(*rules.pagination_rule));
            break;
    }
    for (auto& v : values) {
        auto t = text::trim(v);
        if (!t.empty()) return t;
    }
    return std::nullopt;
}

std::string make_record_id(const std::string& source_id, const std::string& title, std::optional<int> year) {
    auto key = source_id + "|" + text::normalize(title) + "|" + (year ? std::to_string(*year) : std::string());
    return sha256_hex(key).substr(0, 16);
}

std::optional<int> parse_year(const std::string& raw) {
    std::size_t i = 0;
    while (i < raw.size()) {
        if (std::isdigit(static_cast<unsigned char>(raw[i])) == 0) {
            ++i;
            continue;
        }
        std::size_t b = i;
        while (i < raw.size() && std::isdigit(static_cast<unsigned char>(raw[i])) != 0) ++i;
        if (i - b != 4) continue;
        int y = std::stoi(raw.substr(b, 4));
        if (y >= kMinYear && y <= kMaxYear) return y;
    }
    return std::nullopt;
}

CanonicalBatch transform_to_canonical(const IntermediateDoc& idoc, const TransformOptions& options) {
    CanonicalBatch out;
    std::size_t index = 0;
    auto field = [](const std::map<std::string, std::string>& e, const char* name) -> std::string {
        auto it = e.find(name);
        return it == e.end() ? std::string() : text::collapse_ws(it->second);
    };
    for (const auto& e : idoc.entries) {
        ++index;
        auto where = idoc.source_id + ": entry " + std::to_string(index);
        ScholarRecord r;
        r.source_id = idoc.source_id;
        r.title = field(e, "title");
        if (r.title.empty()) {
            out.warnings.push_back(where + " has an empty title; skipped");
            continue;
        }
        r.abstract = field(e, "abstract");

        std::vector<std::string> authors{field(e, "authors")};
        for (const auto& sep : options.author_separators) {
            if (sep.empty()) continue;
            std::vector<std::string> next;
            for (const auto& a : authors) {
                std::size_t start = 0;
                while (true) {
                    auto pos = a.find(sep, start);
                    next.push_back(a.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
                    if (pos == std::string::npos) break;
                    start = pos + sep.size();
                }
            }
            authors = std::move(next);
        }
        for (auto& a : authors) {
            a = text::collapse_ws(a);
            if (!a.empty()) r.authors.push_back(std::move(a));
        }

        if (auto raw = field(e, "year"); !raw.empty()) {
            r.year = parse_year(raw);
            if (!r.year) out.warnings.push_back(where + ": unparseable year '" + raw + "'");
        }
        if (auto v = field(e, "venue"); !v.empty()) r.venue = v;
        if (auto u = field(e, "url"); !u.empty()) r.url = u;
        r.record_id = make_record_id(r.source_id, r.title, r.year);
        out.records.push_back(std::move(r));
    }
    return out;
}

}  // namespace scholarlens
