#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace scholarlens::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Collapses every run of ASCII whitespace to one space and trims the ends.
std::string collapse_ws(std::string_view s);

/// Canonical term form: ASCII lowercase, whitespace collapsed, trimmed.
/// Class ids, seed terms and dedup keys all use this.
std::string normalize(std::string_view s);

/// Word tokens used for phrase matching. A word is a maximal run of ASCII
/// alphanumerics or non-ASCII bytes; everything else is a boundary. Tokens are
/// lowercased.
std::vector<std::string> words(std::string_view s);

/// Non-overlapping occurrences of `phrase` in `text`, compared as word-token
/// sequences. An empty phrase occurs zero times.
std::size_t count_phrase(std::string_view phrase, std::string_view text);
std::size_t count_phrase(const std::vector<std::string>& phrase_words,
                         const std::vector<std::string>& text_words);

/// Decodes the XML predefined entities, numeric character references and the
/// common HTML named entities. Unknown entities are left verbatim.
std::string decode_entities(std::string_view s);

/// Removes tags, comments and script/style bodies. Block-level tag boundaries
/// become spaces so adjacent words do not fuse.
std::string strip_markup(std::string_view s);

/// Escapes & < > " ' for use in XML text and attribute values.
std::string xml_escape(std::string_view s);

/// RFC 3986 percent-encoding; unreserved characters pass through.
std::string percent_encode(std::string_view s);
std::string percent_decode(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with(std::string_view s, std::string_view prefix);

/// Number of UTF-8 code points; continuation bytes are not counted.
std::size_t utf8_length(std::string_view s);

/// Truncates to at most `width` code points. Longer input is cut so that the
/// result including `marker` is exactly `width` code points.
std::string utf8_truncate(std::string_view s, std::size_t width, std::string_view marker = "...");

/// Fixed-point rendering with at most six decimals, trailing zeros dropped,
/// at least one fractional digit kept ("1.0", "0.25"). Never uses exponents.
std::string format_decimal(double value);

void append_utf8(std::string& out, unsigned long code_point);

}  // namespace scholarlens::text
