#include "scholarlens/error.hpp"
#include "scholarlens/json_path.hpp"
#include "scholarlens/markup.hpp"
#include "scholarlens/selector.hpp"

#include <gtest/gtest.h>

using namespace scholarlens;

namespace {

std::vector<std::string> texts(const std::vector<const markup::Node*>& nodes) {
    std::vector<std::string> out;
    for (const auto* n : nodes) out.push_back(n->text_content());
    return out;
}

}  // namespace

TEST(Html, LenientParse) {
    auto doc = markup::parse_html(
        "<!DOCTYPE html><html><body><ul><li>one<li>two</ul><p>a<br>b<img src=x></p></div>"
        "<script>if (a < b) {}</script><table><tr><td>1<td>2</tr></table></body></html>");
    auto lis = CssSelector::compile("li").select(doc.root());
    EXPECT_EQ(texts(lis), (std::vector<std::string>{"one", "two"}));
    EXPECT_EQ(texts(CssSelector::compile("td").select(doc.root())), (std::vector<std::string>{"1", "2"}));
    EXPECT_EQ(texts(CssSelector::compile("script").select(doc.root())), (std::vector<std::string>{"if (a < b) {}"}));
}

TEST(Html, OffsetsRecoverRawMarkup) {
    auto doc = markup::parse_html("<div class=x><b>bold</b> &amp; plain</div>");
    auto divs = CssSelector::compile("div.x").select(doc.root());
    ASSERT_EQ(divs.size(), 1u);
    EXPECT_EQ(doc.inner_source(*divs[0]), "<b>bold</b> &amp; plain");
    EXPECT_EQ(doc.outer_source(*divs[0]), "<div class=x><b>bold</b> &amp; plain</div>");
}

TEST(Selector, Grammar) {
    auto doc = markup::parse_html(R"(<div id="top" class="a b"><p class="c">1</p><span><p>2</p></span>
        <a href="https://x.org/doc.pdf" rel="nofollow next">3</a></div><p>4</p>)");
    const auto& root = doc.root();
    auto sel = [&](const char* s) { return texts(CssSelector::compile(s).select(root)); };
    EXPECT_EQ(sel("div p"), (std::vector<std::string>{"1", "2"}));
    EXPECT_EQ(sel("div > p"), (std::vector<std::string>{"1"}));
    EXPECT_EQ(sel("#top > .c"), (std::vector<std::string>{"1"}));
    EXPECT_EQ(sel("div.a.b > p:first-child"), (std::vector<std::string>{"1"}));
    EXPECT_EQ(sel("a[href$=\".pdf\"]"), (std::vector<std::string>{"3"}));
    EXPECT_EQ(sel("a[rel~=next]"), (std::vector<std::string>{"3"}));
    EXPECT_EQ(sel("a[href^=https]"), (std::vector<std::string>{"3"}));
    EXPECT_EQ(sel("a[href*=\"x.org\"]"), (std::vector<std::string>{"3"}));
    EXPECT_EQ(sel("a[href*=y]").size(), 0u);
    EXPECT_EQ(sel("p, a"), (std::vector<std::string>{"1", "2", "3", "4"}));
    EXPECT_EQ(sel("span p, div p"), (std::vector<std::string>{"1", "2"}));
    EXPECT_THROW(CssSelector::compile("div >"), RuleCompileError);
    EXPECT_THROW(CssSelector::compile("a[href"), RuleCompileError);
    EXPECT_THROW(CssSelector::compile(""), RuleCompileError);
}

TEST(Selector, ScopedToContext) {
    auto doc = markup::parse_html("<div class=r><p>in</p></div><p>out</p>");
    auto rs = CssSelector::compile("div.r").select(doc.root());
    ASSERT_EQ(rs.size(), 1u);
    EXPECT_EQ(texts(CssSelector::compile("div p").select(*rs[0])).size(), 0u);
    EXPECT_EQ(texts(CssSelector::compile("p").select(*rs[0])), (std::vector<std::string>{"in"}));
}

TEST(Xml, StrictParse) {
    auto doc = markup::parse_xml(R"(<?xml version="1.0"?>
<!DOCTYPE r [ <!ENTITY owl "http://www.w3.org/2002/07/owl#"> ]>
<!-- c -->
<r a="1 &amp; 2" b='&owl;'><x><![CDATA[<raw>]]></x><y/>t&#233;</r>)");
    const auto* r = doc.document_element();
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(*r->attribute("a"), "1 & 2");
    EXPECT_EQ(*r->attribute("b"), "http://www.w3.org/2002/07/owl#");
    EXPECT_EQ(r->text_content(), "<raw>t\xc3\xa9");
}

TEST(Xml, ErrorsCarryPosition) {
    try {
        markup::parse_xml("<a>\n  <b></a>");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(markup::parse_xml("<a></a><b/>"), ParseError);
    EXPECT_THROW(markup::parse_xml("<a x='1' x='2'/>"), ParseError);
    EXPECT_THROW(markup::parse_xml("<a>&undefined;</a>"), ParseError);
    EXPECT_THROW(markup::parse_xml(""), ParseError);
}

TEST(JsonPath, Steps) {
    auto j = nlohmann::json::parse(R"({"results":[{"a":{"b":1}},{"a":{"b":"two"}},{"c":true}],
                                      "meta":{"next page":null}})");
    auto eval = [&](const char* p) {
        std::vector<std::string> out;
        for (const auto* v : JsonPath::compile(p).evaluate(j)) out.push_back(json_scalar_text(*v));
        return out;
    };
    EXPECT_EQ(eval("$.results[*].a.b"), (std::vector<std::string>{"1", "two"}));
    EXPECT_EQ(eval("$.results[2].c"), (std::vector<std::string>{"true"}));
    EXPECT_EQ(eval("$['meta']['next page']"), (std::vector<std::string>{""}));
    EXPECT_EQ(eval("$.results[9]").size(), 0u);
    EXPECT_EQ(eval("$.missing.x").size(), 0u);
    EXPECT_EQ(eval("$.meta.*").size(), 1u);
    EXPECT_THROW(JsonPath::compile("results"), RuleCompileError);
    EXPECT_THROW(JsonPath::compile("$.a[x]"), RuleCompileError);
}
