#pragma once

#include "scholarlens/extraction.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace scholarlens {

enum class AdapterMode { live, fixture };

std::string to_string(AdapterMode mode);

struct AdapterConfig {
    std::string source_id;
    std::string display_name;
    std::string base_url;
    /// Must contain `{terms}`; `{page}` is substituted when present.
    std::string query_template;
    std::filesystem::path ruleset_path;
    std::size_t max_pages = 1;
    std::int64_t timeout_ms = 10000;
    std::int64_t min_request_interval_ms = 1000;
    AdapterMode mode = AdapterMode::fixture;
    /// Fixture mode: pages live at `<fixture_dir>/<query-slug>/page<N>.{html,json}`.
    std::filesystem::path fixture_dir;
    /// Optional extra request header, e.g. an API key.
    std::optional<std::pair<std::string, std::string>> header;

    /// Reads an `adapter.conf`; relative paths resolve against its directory.
    /// Throws ConfigError.
    static AdapterConfig load(const std::filesystem::path& path);
    void validate() const;
};

/// Request URL for one page: terms percent-encoded and joined by '+'.
std::string build_query_url(const AdapterConfig& cfg, const std::vector<std::string>& terms, std::size_t page);

/// Fixture directory name for a term list: lowercase words joined by '-'.
std::string query_slug(const std::vector<std::string>& terms);

/// Resolves `link` against `base` (absolute, root-relative or query-only).
std::string resolve_url(const std::string& base, const std::string& link);

/// Milliseconds since the Unix epoch plus a way to wait. Injected so
/// politeness and cache freshness are testable.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::int64_t now_ms() = 0;
    virtual void sleep_ms(std::int64_t ms) = 0;
};

class SystemClock final : public Clock {
public:
    std::int64_t now_ms() override;
    void sleep_ms(std::int64_t ms) override;
};

/// Deterministic clock for tests; sleeping advances time instantly.
class ManualClock final : public Clock {
public:
    explicit ManualClock(std::int64_t start_ms = 0) : now_(start_ms) {}
    std::int64_t now_ms() override;
    void sleep_ms(std::int64_t ms) override;
    void advance(std::int64_t ms);

private:
    std::mutex mutex_;
    std::int64_t now_;
};

struct HttpResponse {
    int status = 0;
    std::string body;
    std::string content_type;
};

class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    /// One GET. Throws TimeoutError or NetworkError; non-2xx statuses are
    /// returned, not thrown.
    virtual HttpResponse get(const std::string& url, std::int64_t timeout_ms,
                             const std::vector<std::pair<std::string, std::string>>& headers) = 0;
};

/// cpp-httplib backed transport (http:// and, when built with OpenSSL
/// support, https://).
class HttplibTransport final : public HttpTransport {
public:
    HttpResponse get(const std::string& url, std::int64_t timeout_ms,
                     const std::vector<std::pair<std::string, std::string>>& headers) override;
};

struct CachedPage {
    std::string body;
    std::string content_type;
    std::int64_t stored_at_ms = 0;
};

/// Content-addressed on-disk page cache. Entries are keyed by SHA-256 of the
/// URL and written via rename, so concurrent writers of one key leave either
/// complete value behind.
class CacheStore {
public:
    CacheStore(std::filesystem::path dir, std::chrono::seconds ttl, Clock& clock);

    static std::string key_for(const std::string& url);

    /// Fresh entry or nothing. TTL 0 disables hits. Throws CacheError.
    std::optional<CachedPage> lookup(const std::string& url) const;
    void store(const std::string& url, const std::string& body, const std::string& content_type) const;

    const std::filesystem::path& dir() const { return dir_; }
    std::chrono::seconds ttl() const { return ttl_; }

private:
    std::filesystem::path path_for(const std::string& key) const;

    std::filesystem::path dir_;
    std::chrono::seconds ttl_;
    Clock& clock_;
};

/// Per-source spacing of live requests.
class PolitenessGate {
public:
    explicit PolitenessGate(Clock& clock) : clock_(clock) {}
    /// Blocks until `min_interval_ms` has elapsed since the previous request
    /// to `source_id`, then records this one.
    void wait_turn(const std::string& source_id, std::int64_t min_interval_ms);

private:
    Clock& clock_;
    std::mutex mutex_;
    std::map<std::string, std::int64_t> last_;
    std::map<std::string, std::unique_ptr<std::mutex>> per_source_;
};

/// Services the adapters need. Pointers are non-owning; `cache` may be null.
struct FetchEnvironment {
    HttpTransport* transport = nullptr;
    Clock* clock = nullptr;
    CacheStore* cache = nullptr;
    PolitenessGate* politeness = nullptr;
};

struct FetchedPage {
    RawDocument document;
    bool from_cache = false;
};

/// Cache-first GET honouring the adapter's timeout and request spacing.
/// Throws TimeoutError, NetworkError, HttpStatusError, CacheError.
FetchedPage fetch_page(const AdapterConfig& cfg, const std::string& url, FetchEnvironment& env);

struct PageError {
    std::size_t page = 0;
    std::string message;
};

struct FetchOutcome {
    std::vector<ScholarRecord> records;
    std::size_t pages_fetched = 0;
    std::vector<PageError> errors;
    std::vector<bool> from_cache;
    std::vector<std::string> warnings;
};

/// A configured portal: adapter settings plus its compiled ruleset.
struct Adapter {
    AdapterConfig config;
    ExtractionRuleSet rules;

    static Adapter load(const std::filesystem::path& adapter_conf);
};

/// Fetches up to max_pages pages for `terms`, extracting and canonicalizing
/// each. Pagination stops at the first page with no entries, when the
/// pagination rule finds no next link, or when a fixture page is missing.
/// Per-page failures are recorded in `errors` and end the run.
FetchOutcome run_adapter(const Adapter& adapter, const std::vector<std::string>& terms, FetchEnvironment& env);

struct SourceInfo {
    std::string source_id;
    std::string display_name;
    AdapterMode mode = AdapterMode::fixture;

    bool operator==(const SourceInfo&) const = default;
};

/// All adapters found under a sources directory, keyed by source id.
class Registry {
public:
    Registry() = default;
    /// Loads every `<dir>/*/adapter.conf`. Throws ConfigError, including for
    /// a source id defined twice.
    static Registry load(const std::filesystem::path& sources_dir);

    void add(Adapter adapter);
    const Adapter& get(const std::string& source_id) const;  // UnknownSourceError
    bool contains(const std::string& source_id) const;
    std::vector<std::string> ids() const;
    std::size_t size() const { return adapters_.size(); }

private:
    std::map<std::string, Adapter> adapters_;
};

/// Sorted by source id.
std::vector<SourceInfo> list_sources(const Registry& registry);

}  // namespace scholarlens
