#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace scholarlens {

class KeyValueConfig;

enum class MediaKind { html, json };

std::string to_string(MediaKind kind);
/// Content-Type header first, then the body's first non-blank byte.
MediaKind sniff_media(const std::string& content_type, const std::string& body);

struct RawDocument {
    std::string source_id;
    std::string url;
    MediaKind media_kind = MediaKind::html;
    std::string body;
    std::chrono::system_clock::time_point fetched_at{};
};

enum class RuleSyntax { css, regex, jsonpath };

enum class PostFilter { trim, strip_markup, decode_entities, collapse_ws, lowercase };

struct FieldRule {
    /// Selector, regular expression or JSON path depending on the ruleset's
    /// syntax. CSS rules may end in ` @attr` to take an attribute value.
    std::string expression;
    std::vector<PostFilter> filters;
};

/// Declarative per-source extraction rules, usually loaded from
/// `sources/<id>/rules.conf`.
struct ExtractionRuleSet {
    std::string source_id;
    MediaKind media = MediaKind::html;
    RuleSyntax syntax = RuleSyntax::css;
    std::string record_rule;
    std::map<std::string, FieldRule> field_rules;
    std::optional<std::string> pagination_rule;
    std::vector<std::string> author_separators{";"};

    /// Throws ConfigError for structural problems and RuleCompileError for
    /// rules that do not compile.
    static ExtractionRuleSet from_config(const KeyValueConfig& cfg);
    static ExtractionRuleSet load(const std::filesystem::path& path);

    /// Compiles every rule; throws RuleCompileError / ConfigError.
    void validate() const;
};

/// Raw field strings per record block, before typing.
struct IntermediateDoc {
    std::string source_id;
    std::vector<std::map<std::string, std::string>> entries;
    std::vector<std::string> warnings;

    bool operator==(const IntermediateDoc&) const = default;
};

struct ScholarRecord {
    std::string record_id;
    std::string source_id;
    std::string title;
    std::string abstract;
    std::vector<std::string> authors;
    std::optional<int> year;
    std::optional<std::string> venue;
    std::optional<std::string> url;

    bool operator==(const ScholarRecord&) const = default;
};

inline constexpr int kMinYear = 1900;
inline constexpr int kMaxYear = 2100;

/// First 16 hex digits of SHA-256 over "source_id|normalize(title)|year".
std::string make_record_id(const std::string& source_id, const std::string& title, std::optional<int> year);

/// One entry per record-rule match in document order. Entries without a
/// title are dropped with one warning each. Throws RuleCompileError and
/// UnsupportedMediaError; a JSON body that fails to parse throws ParseError.
IntermediateDoc extract_entries(const RawDocument& doc, const ExtractionRuleSet& rules);

/// Link to the next result page, when the ruleset has a pagination rule and
/// it matches.
std::optional<std::string> find_next_page(const RawDocument& doc, const ExtractionRuleSet& rules);

struct TransformOptions {
    std::vector<std::string> author_separators{";"};
};

struct CanonicalBatch {
    std::vector<ScholarRecord> records;
    std::vector<std::string> warnings;
};

/// Types raw fields: whitespace collapsed, year from the first standalone
/// 4-digit token in [1900, 2100], authors split on the separators. Unusable
/// optional fields become absent and add a warning. Order is preserved.
CanonicalBatch transform_to_canonical(const IntermediateDoc& idoc, const TransformOptions& options = {});

/// Year parsing used by the transform; exposed for tests.
std::optional<int> parse_year(const std::string& raw);

}  // namespace scholarlens
