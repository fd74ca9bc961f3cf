#pragma once

#include "scholarlens/query.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace scholarlens {

/// Compact JSON with a fixed key order; no trailing newline.
std::string to_json(const ResultSet& rs);

/// XML declaration plus a `<results>` document.
std::string to_xml(const ResultSet& rs);

inline const std::vector<std::string> kDefaultTableColumns{"title", "abstract"};
inline constexpr std::size_t kDefaultTableWidth = 60;

/// Columns: record_id, source, title, abstract, authors, year, venue, url,
/// score. Throws UnknownColumnError; a zero width is an InvalidRequestError.
std::string to_table(const ResultSet& rs, const std::vector<std::string>& columns = kDefaultTableColumns,
                     std::size_t max_width = kDefaultTableWidth);

std::string render(const ResultSet& rs, OutputFormat format);

/// Inverse of to_json. Seed terms are not serialized and come back empty.
/// Throws ParseError.
ResultSet parse_json_result(const std::string& body);

/// Inverse of to_xml for the fields the XML carries: query, dedup_removed,
/// expanded terms and, per record, id, source, score, title, abstract,
/// authors, year, venue and url. Throws ParseError.
ResultSet parse_xml_result(const std::string& body);

}  // namespace scholarlens
