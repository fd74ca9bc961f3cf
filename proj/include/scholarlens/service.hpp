#pragma once

#include "scholarlens/ontology.hpp"
#include "scholarlens/query.hpp"
#include "scholarlens/sources.hpp"

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace scholarlens {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    /// Ontology documents, merged into one graph. Directories contribute
    /// every `*.onto` file inside them.
    std::vector<std::filesystem::path> ontology_paths;
    std::filesystem::path sources_dir = "sources";
    /// Empty disables the page cache.
    std::filesystem::path cache_dir;
    std::int64_t cache_ttl_s = 24 * 60 * 60;
    std::vector<std::string> cors_origins;
    std::filesystem::path static_dir;

    /// Reads the `[service]` section; relative paths resolve against the
    /// file's directory. Throws ConfigError.
    static ServiceConfig load(const std::filesystem::path& path);

    /// SCHOLARLENS_HOST, _PORT, _ONTOLOGY, _SOURCES_DIR, _CACHE_DIR,
    /// _CACHE_TTL_S, _CORS_ORIGINS, _STATIC_DIR. `getenv` is injectable for
    /// tests. Throws ConfigError on malformed values.
    void apply_env(const std::function<std::optional<std::string>(const std::string&)>& getenv);
    void apply_process_env();

    void validate() const;
};

/// Everything a search needs, loaded once and read-only afterwards except for
/// the cache and the request spacing state.
class Engine {
public:
    /// Throws ConfigError, ParseError and the ontology validation errors.
    static std::unique_ptr<Engine> create(const ServiceConfig& cfg);

    const Ontology& ontology() const { return ontology_; }
    const Registry& registry() const { return registry_; }
    const ServiceConfig& config() const { return config_; }

    ResultSet search(const SearchRequest& req, const SourceRunner& runner = {}) const;

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

private:
    Engine() = default;

    ServiceConfig config_;
    Ontology ontology_;
    Registry registry_;
    mutable SystemClock clock_;
    mutable HttplibTransport transport_;
    std::unique_ptr<CacheStore> cache_;
    std::unique_ptr<PolitenessGate> politeness_;
};

/// Loads the ontology documents named by `paths` (see ServiceConfig).
Ontology load_configured_ontology(const std::vector<std::filesystem::path>& paths);

struct ApiRequest {
    std::string method = "GET";
    /// Raw, still percent-encoded path without the query string.
    std::string path;
    /// Decoded query parameters.
    std::map<std::string, std::string> params;
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;
};

/// Transport-independent request handling. Until an engine is installed every
/// endpoint answers 503.
class Service {
public:
    Service() = default;
    explicit Service(std::shared_ptr<const Engine> engine) { set_engine(std::move(engine)); }

    void set_engine(std::shared_ptr<const Engine> engine);
    bool ready() const;

    ApiResponse handle(const ApiRequest& req) const;

private:
    std::shared_ptr<const Engine> engine() const;

    mutable std::mutex mutex_;
    std::shared_ptr<const Engine> engine_;
};

/// `{"error": kind, "detail": message}`.
std::string error_body(const std::string& kind, const std::string& detail);

/// SearchRequest from /api/search query parameters. Throws
/// InvalidRequestError and EmptyQueryError.
SearchRequest search_request_from_params(const std::map<std::string, std::string>& params);

/// cpp-httplib front end for a Service.
class HttpServer {
public:
    HttpServer(Service& service, std::vector<std::string> cors_origins = {},
               std::filesystem::path static_dir = {});
    ~HttpServer();

    /// Binds; port 0 picks a free port. Returns the bound port or throws
    /// NetworkError.
    int bind(const std::string& host, int port);
    /// Serves until stop(). Returns false if the listener failed.
    bool run();
    void stop();
    void wait_until_ready() const;

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace scholarlens
