#include "scholarlens/serialize.hpp"

#include "scholarlens/error.hpp"
#include "scholarlens/markup.hpp"
#include "scholarlens/text.hpp"

#include <nlohmann/json.hpp>

#include <charconv>

namespace scholarlens {

namespace {

using nlohmann::json;

std::string quote(const std::string& s) {
    return json(s).dump(-1, ' ', false, json::error_handler_t::replace);
}

void put_opt(std::string& out, const std::optional<std::string>& v) { out += v ? quote(*v) : "null"; }

}  // namespace

std::string to_json(const ResultSet& rs) {
    std::string out;
    out.reserve(256 + rs.records.size() * 512);
    out += "{\"query\":" + quote(rs.query);
    out += ",\"depth\":" + std::to_string(rs.depth);
    out += ",\"gamma\":" + text::format_decimal(rs.gamma);
    out += ",\"expanded_terms\":{";
    bool first = true;
    for (const auto& [term, weight] : rs.expanded.weighted_terms) {
        if (!first) out += ',';
        first = false;
        out += quote(term) + ":" + text::format_decimal(weight);
    }
    out += "},\"count\":" + std::to_string(rs.records.size());
    out += ",\"dedup_removed\":" + std::to_string(rs.dedup_removed);
    out += ",\"per_source\":{";
    first = true;
    for (const auto& [id, s] : rs.per_source) {
        if (!first) out += ',';
        first = false;
        out += quote(id) + ":{\"fetched\":" + std::to_string(s.fetched) + ",\"kept\":" + std::to_string(s.kept) +
               ",\"errors\":" + std::to_string(s.errors) + "}";
    }
    out += "},\"records\":[";
    for (std::size_t i = 0; i < rs.records.size(); ++i) {
        const auto& sr = rs.records[i];
        const auto& r = sr.record;
        if (i) out += ',';
        out += "{\"record_id\":" + quote(r.record_id);
        out += ",\"source\":" + quote(r.source_id);
        out += ",\"title\":" + quote(r.title);
        out += ",\"abstract\":" + quote(r.abstract);
        out += ",\"authors\":[";
        for (std::size_t a = 0; a < r.authors.size(); ++a) {
            if (a) out += ',';
            out += quote(r.authors[a]);
        }
        out += "],\"year\":" + (r.year ? std::to_string(*r.year) : std::string("null"));
        out += ",\"venue\":";
        put_opt(out, r.venue);
        out += ",\"url\":";
        put_opt(out, r.url);
        out += ",\"score\":" + text::format_decimal(sr.score);
        out += ",\"matched_terms\":{";
        bool f = true;
        for (const auto& [term, n] : sr.matched_terms) {
            if (!f) out += ',';
            f = false;
            out += quote(term) + ":" + std::to_string(n);
        }
        out += "}}";
    }
    out += "]}";
    return out;
}

namespace {

void element(std::string& out, const char* name, const std::optional<std::string>& v) {
    if (!v) {
        out += "<" + std::string(name) + "/>";
        return;
    }
    out += "<" + std::string(name) + ">" + text::xml_escape(*v) + "</" + name + ">";
}

}  // namespace

std::string to_xml(const ResultSet& rs) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<results query=\"" + text::xml_escape(rs.query) + "\" count=\"" + std::to_string(rs.records.size()) +
           "\" dedup_removed=\"" + std::to_string(rs.dedup_removed) + "\">";
    out += "<expanded>";
    for (const auto& [term, weight] : rs.expanded.weighted_terms)
        out += "<term name=\"" + text::xml_escape(term) + "\" weight=\"" + text::format_decimal(weight) + "\"/>";
    out += "</expanded>";
    for (const auto& sr : rs.records) {
        const auto& r = sr.record;
        out += "<record id=\"" + text::xml_escape(r.record_id) + "\" source=\"" + text::xml_escape(r.source_id) +
               "\" score=\"" + text::format_decimal(sr.score) + "\">";
        element(out, "title", r.title);
        element(out, "abstract", r.abstract);
        out += "<authors>";
        for (const auto& a : r.authors) element(out, "author", a);
        out += "</authors>";
        element(out, "year", r.year ? std::optional(std::to_string(*r.year)) : std::nullopt);
        element(out, "venue", r.venue);
        element(out, "url", r.url);
        out += "</record>";
    }
    out += "</results>\n";
    return out;
}

namespace {

std::string cell_value(const ScoredRecord& sr, const std::string& column) {
    const auto& r = sr.record;
    if (column == "record_id") return r.record_id;
    if (column == "source") return r.source_id;
    if (column == "title") return r.title;
    if (column == "abstract") return r.abstract;
    if (column == "authors") return text::join(r.authors, "; ");
    if (column == "year") return r.year ? std::to_string(*r.year) : "";
    if (column == "venue") return r.venue.value_or("");
    if (column == "url") return r.url.value_or("");
    if (column == "score") return text::format_decimal(sr.score);
    throw UnknownColumnError(column);
}

std::string column_label(const std::string& column) {
    if (column == "record_id") return "Record ID";
    if (column == "url") return "URL";
    std::string s = column;
    s[0] = static_cast<char>(s[0] - 'a' + 'A');
    return s;
}

}  // namespace

std::string to_table(const ResultSet& rs, const std::vector<std::string>& columns, std::size_t max_width) {
    if (max_width == 0) throw InvalidRequestError("table width must be positive");
    if (columns.empty()) throw InvalidRequestError("table needs at least one column");
    static const ScoredRecord probe;
    for (const auto& c : columns) cell_value(probe, c);

    auto line = [&](const std::vector<std::string>& cells) {
        std::vector<std::string> cut;
        for (const auto& c : cells) cut.push_back(text::utf8_truncate(text::collapse_ws(c), max_width));
        return text::join(cut, " | ") + "\n";
    };
    std::vector<std::string> header;
    for (const auto& c : columns) header.push_back(column_label(c));
    std::string out = line(header);
    for (const auto& sr : rs.records) {
        std::vector<std::string> cells;
        for (const auto& c : columns) cells.push_back(cell_value(sr, c));
        out += line(cells);
    }
    return out;
}

std::string render(const ResultSet& rs, OutputFormat format) {
    switch (format) {
    case OutputFormat::json: return to_json(rs);
    case OutputFormat::xml: return to_xml(rs);
    case OutputFormat::table: return to_table(rs);
    }
    return to_json(rs);
}

// ---------------------------------------------------------------------------
// Parsing back

namespace {

std::optional<std::string> opt_string(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::string>();
}

}  // namespace

ResultSet parse_json_result(const std::string& body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), 1, e.byte);
    }
    try {
        ResultSet rs;
        rs.query = j.at("query").get<std::string>();
        rs.depth = j.at("depth").get<std::size_t>();
        rs.gamma = j.at("gamma").get<double>();
        rs.expanded.depth = rs.depth;
        rs.expanded.gamma = rs.gamma;
        for (const auto& [term, w] : j.at("expanded_terms").items()) rs.expanded.weighted_terms[term] = w.get<double>();
        rs.dedup_removed = j.at("dedup_removed").get<std::size_t>();
        for (const auto& [id, s] : j.at("per_source").items())
            rs.per_source[id] = SourceStats{s.at("fetched").get<std::size_t>(), s.at("kept").get<std::size_t>(),
                                            s.at("errors").get<std::size_t>()};
        for (const auto& jr : j.at("records")) {
            ScoredRecord sr;
            auto& r = sr.record;
            r.record_id = jr.at("record_id").get<std::string>();
            r.source_id = jr.at("source").get<std::string>();
            r.title = jr.at("title").get<std::string>();
            r.abstract = jr.at("abstract").get<std::string>();
            r.authors = jr.at("authors").get<std::vector<std::string>>();
            if (!jr.at("year").is_null()) r.year = jr.at("year").get<int>();
            r.venue = opt_string(jr.at("venue"));
            r.url = opt_string(jr.at("url"));
            sr.score = jr.at("score").get<double>();
            for (const auto& [term, n] : jr.at("matched_terms").items()) sr.matched_terms[term] = n.get<std::size_t>();
            rs.records.push_back(std::move(sr));
        }
        if (j.at("count").get<std::size_t>() != rs.records.size())
            throw ParseError("count does not match the number of records", 1, 1);
        return rs;
    } catch (const json::exception& e) {
        throw ParseError(std::string("unexpected result shape: ") + e.what(), 1, 1);
    }
}

namespace {

using markup::Node;

const Node& child(const Node& parent, std::string_view name) {
    for (const Node* c : parent.elements())
        if (c->name == name) return *c;
    throw ParseError("<" + parent.name + "> lacks <" + std::string(name) + ">", 1, 1);
}

const std::string& attr(const Node& n, std::string_view name) {
    if (const auto* v = n.attribute(name)) return *v;
    throw ParseError("<" + n.name + "> lacks attribute " + std::string(name), 1, 1);
}

std::optional<std::string> opt_text(const Node& n) {
    if (n.children.empty()) return std::nullopt;
    return n.text_content();
}

double to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ParseError("not a number: '" + s + "'", 1, 1);
}

std::size_t to_size(const std::string& s) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw ParseError("not a count: '" + s + "'", 1, 1);
    return v;
}

}  // namespace

ResultSet parse_xml_result(const std::string& body) {
    auto doc = markup::parse_xml(body);
    const Node* root = doc.document_element();
    if (!root || root->name != "results") throw ParseError("document element is not <results>", 1, 1);
    ResultSet rs;
    rs.query = attr(*root, "query");
    rs.dedup_removed = to_size(attr(*root, "dedup_removed"));
    for (const Node* t : child(*root, "expanded").elements())
        if (t->name == "term") rs.expanded.weighted_terms[attr(*t, "name")] = to_double(attr(*t, "weight"));
    for (const Node* rn : root->elements()) {
        if (rn->name != "record") continue;
        ScoredRecord sr;
        auto& r = sr.record;
        r.record_id = attr(*rn, "id");
        r.source_id = attr(*rn, "source");
        sr.score = to_double(attr(*rn, "score"));
        r.title = child(*rn, "title").text_content();
        r.abstract = child(*rn, "abstract").text_content();
        for (const Node* a : child(*rn, "authors").elements())
            if (a->name == "author") r.authors.push_back(a->text_content());
        if (auto y = opt_text(child(*rn, "year"))) r.year = static_cast<int>(to_size(*y));
        r.venue = opt_text(child(*rn, "venue"));
        r.url = opt_text(child(*rn, "url"));
        rs.records.push_back(std::move(sr));
    }
    if (to_size(attr(*root, "count")) != rs.records.size())
        throw ParseError("count does not match the number of records", 1, 1);
    return rs;
}

}  // namespace scholarlens
