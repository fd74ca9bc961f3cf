#include "scholarlens/error.hpp"
#include "scholarlens/markup.hpp"
#include "scholarlens/serialize.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>

using namespace scholarlens;
using testsupport::OfflineEnv;
using testsupport::repo_root;
using testsupport::shipped_ontology;
using testsupport::shipped_registry;
using testsupport::slurp;

namespace {

ResultSet search(const std::string& q, std::size_t limit = kDefaultLimit) {
    OfflineEnv off;
    SearchRequest req;
    req.raw_query = q;
    req.limit = limit;
    return federate_search(req, shipped_ontology(), shipped_registry(), off.env);
}

/// Fields both formats carry.
ResultSet shared_view(ResultSet rs) {
    rs.depth = ResultSet{}.depth;
    rs.gamma = ResultSet{}.gamma;
    rs.per_source.clear();
    rs.expanded = ExpandedQuery{{}, rs.expanded.weighted_terms, ExpandedQuery{}.depth, ExpandedQuery{}.gamma};
    for (auto& r : rs.records) r.matched_terms.clear();
    return rs;
}

ResultSet json_view(ResultSet rs) {
    rs.expanded.seed_terms.clear();
    rs.expanded.depth = rs.depth;
    rs.expanded.gamma = rs.gamma;
    return rs;
}

ResultSet sample() {
    ResultSet rs;
    rs.query = "R&D <\"tools\">";
    rs.depth = 2;
    rs.gamma = 0.5;
    rs.expanded.weighted_terms = {{"r&d", 1.0}, {"tools", 0.25}};
    ScoredRecord a;
    a.record.source_id = "s";
    a.record.title = "Fish & Chips <b>\"quoted\"</b> caf\xc3\xa9";
    a.record.abstract = "";
    a.record.authors = {"A. B", "C'D"};
    a.record.year = 1999;
    a.record.venue = "V & W";
    a.record.url = "http://x/?a=1&b=2";
    a.record.record_id = make_record_id("s", a.record.title, a.record.year);
    a.score = 4.25;
    a.matched_terms = {{"r&d", 1}};
    ScoredRecord b;
    b.record.source_id = "t";
    b.record.title = "Tab\there";
    b.record.abstract = "line\nbreak";
    b.record.record_id = make_record_id("t", b.record.title, std::nullopt);
    b.score = 0.1;
    b.matched_terms = {{"tools", 2}};
    rs.records = {a, b};
    rs.per_source = {{"s", {3, 1, 0}}, {"t", {2, 1, 1}}};
    rs.dedup_removed = 1;
    return rs;
}

void check_golden(const std::string& name, const std::string& body) {
    auto path = repo_root() / "fixtures" / "golden" / name;
    if (std::getenv("SCHOLARLENS_UPDATE_GOLDEN")) {
        std::filesystem::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << body;
    }
    ASSERT_TRUE(std::filesystem::exists(path)) << path;
    EXPECT_EQ(slurp(path), body) << name;
}

}  // namespace

TEST(Json, EmptyEnvelope) {
    ResultSet rs;
    rs.query = "q";
    EXPECT_EQ(to_json(rs), R"({"query":"q","depth":0,"gamma":0.5,"expanded_terms":{},"count":0,)"
                           R"("dedup_removed":0,"per_source":{},"records":[]})");
}

TEST(Json, KeyOrderAndNulls) {
    auto body = to_json(sample());
    auto j = nlohmann::json::parse(body);
    std::vector<std::string> keys;
    auto ordered = nlohmann::ordered_json::parse(body);
    for (const auto& [k, _] : ordered.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"query", "depth", "gamma", "expanded_terms", "count", "dedup_removed",
                                              "per_source", "records"}));
    keys.clear();
    for (const auto& [k, _] : ordered["records"][0].items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"record_id", "source", "title", "abstract", "authors", "year", "venue",
                                              "url", "score", "matched_terms"}));
    EXPECT_TRUE(j["records"][1]["year"].is_null());
    EXPECT_TRUE(j["records"][1]["venue"].is_null());
    EXPECT_TRUE(j["records"][1]["url"].is_null());
    EXPECT_NE(body.find("\"score\":4.25,"), std::string::npos);
    EXPECT_NE(body.find("\"tools\":0.25"), std::string::npos);
}

TEST(Json, RoundTrip) {
    auto rs = sample();
    EXPECT_EQ(parse_json_result(to_json(rs)), json_view(rs));
    EXPECT_THROW(parse_json_result("{"), ParseError);
    EXPECT_THROW(parse_json_result("{\"query\":1}"), ParseError);
}

TEST(Xml, ShapeAndEscaping) {
    auto body = to_xml(sample());
    EXPECT_EQ(body.rfind("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<results query=\"R&amp;D &lt;&quot;tools&quot;&gt;\" "
                         "count=\"2\" dedup_removed=\"1\"><expanded><term name=\"r&amp;d\" weight=\"1.0\"/>",
                         0),
              0u);
    EXPECT_NE(body.find("<title>Fish &amp; Chips &lt;b&gt;"), std::string::npos);
    EXPECT_NE(body.find("<year/><venue/><url/></record>"), std::string::npos);
    auto back = parse_xml_result(body);
    EXPECT_EQ(back.records[0].record.title, sample().records[0].record.title);
    EXPECT_EQ(back, shared_view(sample()));
}

TEST(Xml, EmptyResultSet) {
    ResultSet rs;
    rs.query = "nothing";
    auto body = to_xml(rs);
    auto doc = markup::parse_xml(body);
    const auto* root = doc.document_element();
    ASSERT_NE(root, nullptr);
    EXPECT_EQ(*root->attribute("count"), "0");
    for (const auto* c : root->elements()) EXPECT_NE(c->name, "record");
}

TEST(Table, Layout) {
    auto rs = sample();
    auto t = to_table(rs);
    auto lines = text::split(t, '\n');
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], "Title | Abstract");
    EXPECT_EQ(lines[2], "Tab here | line break");
    EXPECT_EQ(lines[3], "");
    EXPECT_EQ(to_table(ResultSet{}), "Title | Abstract\n");
    auto narrow = to_table(rs, {"title", "year", "score"}, 8);
    EXPECT_EQ(text::split(narrow, '\n')[1], "Fish ... | 1999 | 4.25");
    EXPECT_THROW(to_table(rs, {"title", "colour"}), UnknownColumnError);
    EXPECT_THROW(to_table(rs, {"title"}, 0), InvalidRequestError);
}

TEST(Table, CellsNeverExceedWidth) {
    auto rs = search("Neural Networks");
    ASSERT_FALSE(rs.records.empty());
    for (std::size_t w : {4u, 10u, 37u}) {
        auto t = to_table(rs, {"title", "abstract", "authors", "url"}, w);
        for (const auto& line : text::split(t, '\n'))
            for (const auto& cell : text::split(line, '|')) EXPECT_LE(text::utf8_length(text::trim(cell)), w);
    }
}

TEST(Serialization, FixtureCorpusRoundTripsAndAgrees) {
    std::size_t records = 0;
    for (const auto& q : testsupport::chapter4_queries()) {
        auto rs = search(q, kMaxLimit);
        records += rs.records.size();
        auto json = to_json(rs);
        auto xml = to_xml(rs);
        EXPECT_EQ(parse_json_result(json), json_view(rs)) << q;
        EXPECT_EQ(parse_xml_result(xml), shared_view(rs)) << q;
        EXPECT_EQ(shared_view(parse_json_result(json)), parse_xml_result(xml)) << q;
        EXPECT_EQ(to_json(rs), json);
        EXPECT_EQ(to_xml(rs), xml);
    }
    EXPECT_GT(records, 60u);
}

TEST(Golden, ReverseEngineering) {
    auto rs = search("Reverse Engineering");
    check_golden("reverse_engineering.json", to_json(rs));
    check_golden("reverse_engineering.xml", to_xml(rs));
}

TEST(Golden, RemoteSensingTable) { check_golden("remote_sensing.txt", to_table(search("Remote Sensing"))); }
