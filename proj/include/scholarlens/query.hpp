#pragma once

#include "scholarlens/extraction.hpp"
#include "scholarlens/ontology.hpp"
#include "scholarlens/sources.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace scholarlens {

enum class OutputFormat { json, xml, table };

std::string to_string(OutputFormat format);
/// Throws InvalidRequestError for anything but json, xml or table.
OutputFormat parse_output_format(const std::string& name);

inline constexpr std::size_t kDefaultSearchDepth = 1;
inline constexpr std::size_t kDefaultLimit = 50;
inline constexpr std::size_t kMaxLimit = 1000;

struct SearchRequest {
    std::string raw_query;
    std::size_t depth = kDefaultSearchDepth;
    double gamma = kDefaultGamma;
    /// Empty means every registered source.
    std::vector<std::string> sources;
    std::size_t limit = kDefaultLimit;
    OutputFormat format = OutputFormat::json;

    /// Throws EmptyQueryError or InvalidRequestError.
    void validate() const;
};

/// Seeds for expansion: every comma-separated phrase of the query, plus the
/// individual words of multi-word phrases. Normalized, first occurrence kept.
std::vector<std::string> seed_terms_from_query(const std::string& raw_query);

/// Word tokens of the whole query; what adapters are asked for.
std::vector<std::string> query_words(const std::string& raw_query);

struct ScoredRecord {
    ScholarRecord record;
    double score = 0.0;
    /// Term -> occurrences in title plus abstract.
    std::map<std::string, std::size_t> matched_terms;

    bool operator==(const ScoredRecord&) const = default;
};

struct SourceStats {
    std::size_t fetched = 0;
    std::size_t kept = 0;
    std::size_t errors = 0;

    bool operator==(const SourceStats&) const = default;
};

struct ResultSet {
    std::string query;
    std::size_t depth = 0;
    double gamma = kDefaultGamma;
    ExpandedQuery expanded;
    std::vector<ScoredRecord> records;
    std::map<std::string, SourceStats> per_source;
    std::size_t dedup_removed = 0;

    bool operator==(const ResultSet&) const = default;
};

inline constexpr double kTitleWeight = 3.0;

/// sum over terms of weight * (3 * title hits + abstract hits), counting
/// non-overlapping whole-word phrase occurrences.
ScoredRecord score_record(const ScholarRecord& r, const ExpandedQuery& eq);

std::string dedup_key(const ScholarRecord& r);

/// Score desc, title asc, source asc, record id asc.
bool ranks_before(const ScoredRecord& a, const ScoredRecord& b);

struct DedupeResult {
    std::vector<ScoredRecord> records;
    std::size_t removed = 0;
};

/// Keeps the best-ranked copy per dedup key; survivors keep input order.
DedupeResult dedupe(const std::vector<ScoredRecord>& records);

/// Fetches one source. The default runs run_adapter against the environment;
/// tests substitute their own.
using SourceRunner = std::function<FetchOutcome(const Adapter&, const std::vector<std::string>& terms)>;

/// Expands the query, runs every requested source concurrently, then scores,
/// drops unmatched records, dedupes, sorts and truncates. Source failures are
/// counted in per_source and never abort the search. Throws EmptyQueryError,
/// InvalidRequestError and UnknownSourceError.
ResultSet federate_search(const SearchRequest& req, const Ontology& ontology, const Registry& registry,
                          FetchEnvironment& env, const SourceRunner& runner = {});

}  // namespace scholarlens
