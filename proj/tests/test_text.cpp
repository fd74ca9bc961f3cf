#include "scholarlens/hash.hpp"
#include "scholarlens/text.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace scholarlens;

TEST(Text, NormalizeCollapsesCaseAndWhitespace) {
    EXPECT_EQ(text::normalize("  Data\t  Mining \n"), "data mining");
    EXPECT_EQ(text::normalize(""), "");
    EXPECT_EQ(text::normalize(" \t\n"), "");
}

TEST(Text, WordsSplitOnPunctuationAndHyphens) {
    EXPECT_EQ(text::words("Data-Mining, (big) DATA!"),
              (std::vector<std::string>{"data", "mining", "big", "data"}));
    EXPECT_EQ(text::words("caf\xc3\xa9 au-lait"), (std::vector<std::string>{"caf\xc3\xa9", "au", "lait"}));
}

TEST(Text, CountPhraseIsNonOverlapping) {
    EXPECT_EQ(text::count_phrase("data data", "data data data"), 1u);
    EXPECT_EQ(text::count_phrase("big data", "Big data; big-data and bigdata"), 2u);
    EXPECT_EQ(text::count_phrase("", "anything"), 0u);
    EXPECT_EQ(text::count_phrase("mining", "datamining"), 0u);
}

TEST(Text, CountPhraseMatchesNaiveOracleOnRandomText) {
    std::mt19937 rng(7);
    const std::vector<std::string> vocab{"a", "b", "ab", "B", "a-b", "c"};
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1), len(0, 30), plen(1, 3);
    for (int iter = 0; iter < 2000; ++iter) {
        std::string t, p;
        for (std::size_t i = 0, n = len(rng); i < n; ++i) t += vocab[pick(rng)] + (i % 3 ? " " : ", ");
        for (std::size_t i = 0, n = plen(rng); i < n; ++i) p += vocab[pick(rng)] + " ";
        ASSERT_EQ(text::count_phrase(p, t), testsupport::naive_count(p, t)) << "phrase=" << p << " text=" << t;
    }
}

TEST(Text, EntitiesAndMarkup) {
    EXPECT_EQ(text::decode_entities("A &amp; B &lt;x&gt; &#233; &#x41; &nbsp;&bogus;"),
              "A & B <x> \xc3\xa9 A \xc2\xa0&bogus;");
    EXPECT_EQ(text::strip_markup("<p>one</p><p>two <b>bold</b></p><script>x<y</script>"), " one  two bold ");
    EXPECT_EQ(text::xml_escape("a<b & \"c\" 'd'>"), "a&lt;b &amp; &quot;c&quot; &apos;d&apos;&gt;");
}

TEST(Text, PercentCodingRoundTrips) {
    EXPECT_EQ(text::percent_encode("data mining/ü"), "data%20mining%2F%C3%BC");
    EXPECT_EQ(text::percent_decode("data%20mining%2f%C3%BC"), "data mining/\xc3\xbc");
    EXPECT_EQ(text::percent_decode("100%"), "100%");
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int i = 0; i < 500; ++i) {
        std::string s;
        for (int j = 0; j < 20; ++j) s += static_cast<char>(byte(rng));
        ASSERT_EQ(text::percent_decode(text::percent_encode(s)), s);
    }
}

TEST(Text, FormatDecimal) {
    EXPECT_EQ(text::format_decimal(1.0), "1.0");
    EXPECT_EQ(text::format_decimal(0.5), "0.5");
    EXPECT_EQ(text::format_decimal(0.125), "0.125");
    EXPECT_EQ(text::format_decimal(33.0), "33.0");
    EXPECT_EQ(text::format_decimal(1.0 / 3.0), "0.333333");
    EXPECT_EQ(text::format_decimal(1e-9), "0.0");
    EXPECT_EQ(text::format_decimal(-0.0), "0.0");
    EXPECT_EQ(text::format_decimal(1e20).find('e'), std::string::npos);
}

TEST(Text, Utf8Truncate) {
    EXPECT_EQ(text::utf8_truncate("short", 10), "short");
    EXPECT_EQ(text::utf8_truncate("abcdefghij", 6), "abc...");
    auto cut = text::utf8_truncate("\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9\xc3\xa9", 4);
    EXPECT_EQ(cut, "\xc3\xa9...");
    EXPECT_EQ(text::utf8_length(cut), 4u);
    for (std::size_t w = 1; w < 12; ++w)
        EXPECT_EQ(text::utf8_length(text::utf8_truncate("the quick brown fox", w)), std::min<std::size_t>(w, 19));
}

TEST(Hash, Sha256KnownVectors) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
