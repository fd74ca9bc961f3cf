#include "scholarlens/service.hpp"

#include "scholarlens/config.hpp"
#include "scholarlens/error.hpp"
#include "scholarlens/serialize.hpp"
#include "scholarlens/text.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>

namespace scholarlens {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> comma_list(const std::string& s) {
    std::vector<std::string> out;
    for (const auto& part : text::split(s, ',')) {
        auto t = text::trim(part);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

long long parse_integer(const std::string& what, const std::string& value) {
    long long v = 0;
    auto t = text::trim(value);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size())
        throw ConfigError(what + ": '" + value + "' is not an integer");
    return v;
}

}  // namespace

ServiceConfig ServiceConfig::load(const fs::path& path) {
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) throw ConfigError("config file not found: " + path.string());
    auto kv = KeyValueConfig::load(path);
    auto dir = path.parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : dir / p; };

    ServiceConfig c;
    if (auto v = kv.get("service", "host")) c.host = *v;
    if (auto v = kv.get("service", "port")) c.port = static_cast<int>(parse_integer("port", *v));
    if (auto v = kv.get("service", "ontology"))
        for (const auto& p : comma_list(*v)) c.ontology_paths.push_back(resolve(p));
    if (auto v = kv.get("service", "sources_dir")) c.sources_dir = resolve(*v);
    if (auto v = kv.get("service", "cache_dir"); v && !v->empty()) c.cache_dir = resolve(*v);
    if (auto v = kv.get("service", "cache_ttl_s")) c.cache_ttl_s = parse_integer("cache_ttl_s", *v);
    if (auto v = kv.get("service", "cors_origins")) c.cors_origins = comma_list(*v);
    if (auto v = kv.get("service", "static_dir"); v && !v->empty()) c.static_dir = resolve(*v);
    c.validate();
    return c;
}

void ServiceConfig::apply_env(const std::function<std::optional<std::string>(const std::string&)>& getenv) {
    auto var = [&](const char* name) { return getenv(std::string("SCHOLARLENS_") + name); };
    if (auto v = var("HOST")) host = *v;
    if (auto v = var("PORT")) port = static_cast<int>(parse_integer("SCHOLARLENS_PORT", *v));
    if (auto v = var("ONTOLOGY")) {
        ontology_paths.clear();
        for (const auto& p : comma_list(*v)) ontology_paths.emplace_back(p);
    }
    if (auto v = var("SOURCES_DIR")) sources_dir = *v;
    if (auto v = var("CACHE_DIR")) cache_dir = *v;
    if (auto v = var("CACHE_TTL_S")) cache_ttl_s = parse_integer("SCHOLARLENS_CACHE_TTL_S", *v);
    if (auto v = var("CORS_ORIGINS")) cors_origins = comma_list(*v);
    if (auto v = var("STATIC_DIR")) static_dir = *v;
    validate();
}

void ServiceConfig::apply_process_env() {
    apply_env([](const std::string& name) -> std::optional<std::string> {
        if (const char* v = std::getenv(name.c_str())) return std::string(v);
        return std::nullopt;
    });
}

void ServiceConfig::validate() const {
    if (port < 0 || port > 65535) throw ConfigError("port out of range: " + std::to_string(port));
    if (cache_ttl_s < 0) throw ConfigError("cache_ttl_s must be non-negative");
    if (ontology_paths.empty()) throw ConfigError("no ontology configured");
}

Ontology load_configured_ontology(const std::vector<fs::path>& paths) {
    std::vector<fs::path> files;
    for (const auto& p : paths) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".onto") found.push_back(e.path());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p, ec)) {
            files.push_back(p);
        } else {
            throw ConfigError("ontology not found: " + p.string());
        }
    }
    if (files.empty()) throw ConfigError("no ontology documents found");
    return load_ontology_files(files, "ontology");
}

std::unique_ptr<Engine> Engine::create(const ServiceConfig& cfg) {
    cfg.validate();
    std::unique_ptr<Engine> e(new Engine());
    e->config_ = cfg;
    e->ontology_ = load_configured_ontology(cfg.ontology_paths);
    e->registry_ = Registry::load(cfg.sources_dir);
    if (!cfg.cache_dir.empty())
        e->cache_ = std::make_unique<CacheStore>(cfg.cache_dir, std::chrono::seconds(cfg.cache_ttl_s), e->clock_);
    e->politeness_ = std::make_unique<PolitenessGate>(e->clock_);
    return e;
}

ResultSet Engine::search(const SearchRequest& req, const SourceRunner& runner) const {
    FetchEnvironment env{&transport_, &clock_, cache_.get(), politeness_.get()};
    return federate_search(req, ontology_, registry_, env, runner);
}

// ---------------------------------------------------------------------------
// Request handling

std::string error_body(const std::string& kind, const std::string& detail) {
    return nlohmann::json{{"error", kind}, {"detail", detail}}.dump(-1, ' ', false,
                                                                   nlohmann::json::error_handler_t::replace);
}

namespace {

std::size_t param_count(const std::string& name, const std::string& value, std::size_t lo) {
    long long v = 0;
    try {
        v = parse_integer(name, value);
    } catch (const ConfigError& e) {
        throw InvalidRequestError(e.what());
    }
    if (v < static_cast<long long>(lo)) throw InvalidRequestError(name + " must be at least " + std::to_string(lo));
    return static_cast<std::size_t>(v);
}

}  // namespace

SearchRequest search_request_from_params(const std::map<std::string, std::string>& params) {
    SearchRequest req;
    auto get = [&](const char* k) -> const std::string* {
        auto it = params.find(k);
        return it == params.end() ? nullptr : &it->second;
    };
    if (const auto* q = get("q")) req.raw_query = *q;
    if (const auto* v = get("depth")) req.depth = param_count("depth", *v, 0);
    if (const auto* v = get("gamma")) {
        auto t = text::trim(*v);
        std::size_t used = 0;
        try {
            req.gamma = std::stod(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (t.empty() || used != t.size()) throw InvalidRequestError("gamma: '" + *v + "' is not a number");
    }
    if (const auto* v = get("sources")) req.sources = comma_list(*v);
    if (const auto* v = get("limit")) req.limit = param_count("limit", *v, 1);
    if (const auto* v = get("format")) req.format = parse_output_format(*v);
    req.validate();
    return req;
}

namespace {

const char* content_type_for(OutputFormat f) {
    switch (f) {
    case OutputFormat::json: return "application/json";
    case OutputFormat::xml: return "application/xml";
    case OutputFormat::table: return "text/plain; charset=utf-8";
    }
    return "application/json";
}

ApiResponse json_response(int status, std::string body) {
    ApiResponse r;
    r.status = status;
    r.body = std::move(body);
    return r;
}

ApiResponse error_response(int status, const std::string& kind, const std::string& detail) {
    return json_response(status, error_body(kind, detail));
}

nlohmann::json tree_json(const Ontology& o, const std::string& id) {
    nlohmann::json children = nlohmann::json::array();
    for (const auto& c : o.children(id)) children.push_back(tree_json(o, c));
    return {{"id", id}, {"label", o.node(id).label}, {"children", std::move(children)}};
}

std::string dump(const nlohmann::json& j) { return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace); }

std::vector<std::string> path_segments(const std::string& path) {
    std::vector<std::string> out;
    for (const auto& s : text::split(path, '/'))
        if (!s.empty()) out.push_back(text::percent_decode(s));
    return out;
}

}  // namespace

void Service::set_engine(std::shared_ptr<const Engine> engine) {
    std::lock_guard lock(mutex_);
    engine_ = std::move(engine);
}

bool Service::ready() const { return engine() != nullptr; }

std::shared_ptr<const Engine> Service::engine() const {
    std::lock_guard lock(mutex_);
    return engine_;
}

ApiResponse Service::handle(const ApiRequest& req) const {
    auto eng = engine();
    auto seg = path_segments(req.path);
    try {
        if (req.method != "GET" && req.method != "HEAD")
            return error_response(405, "MethodNotAllowed", "only GET is supported");
        if (seg.size() == 1 && seg[0] == "healthz") {
            if (!eng) return error_response(503, "NotReady", "configuration is still loading");
            return json_response(200, R"({"status":"ok"})");
        }
        bool api = !seg.empty() && seg[0] == "api";
        if (!api) return error_response(404, "NotFound", "no such endpoint: " + req.path);
        if (!eng) return error_response(503, "NotReady", "configuration is still loading");

        if (seg.size() == 2 && seg[1] == "search") {
            auto sreq = search_request_from_params(req.params);
            auto rs = eng->search(sreq);
            ApiResponse r;
            r.body = render(rs, sreq.format);
            r.content_type = content_type_for(sreq.format);
            return r;
        }
        if (seg.size() == 2 && seg[1] == "ontology") {
            const auto& o = eng->ontology();
            const auto& roots = o.root_ids();
            if (roots.size() == 1) return json_response(200, dump(tree_json(o, *roots.begin())));
            nlohmann::json children = nlohmann::json::array();
            for (const auto& r : roots) children.push_back(tree_json(o, r));
            return json_response(200, dump({{"id", ""}, {"label", o.name()}, {"children", std::move(children)}}));
        }
        if (seg.size() == 4 && seg[1] == "ontology" && seg[3] == "children") {
            const auto& o = eng->ontology();
            nlohmann::json out = nlohmann::json::array();
            for (const auto& c : o.children(seg[2])) out.push_back({{"id", c}, {"label", o.node(c).label}});
            return json_response(200, dump(out));
        }
        if (seg.size() == 2 && seg[1] == "sources") {
            nlohmann::json out = nlohmann::json::array();
            for (const auto& s : list_sources(eng->registry()))
                out.push_back({{"source_id", s.source_id}, {"display_name", s.display_name}, {"mode", to_string(s.mode)}});
            return json_response(200, dump(out));
        }
        return error_response(404, "NotFound", "no such endpoint: " + req.path);
    } catch (const EmptyQueryError& e) {
        return error_response(400, e.kind(), e.what());
    } catch (const InvalidRequestError& e) {
        return error_response(400, e.kind(), e.what());
    } catch (const UnknownSourceError& e) {
        return error_response(404, e.kind(), e.what());
    } catch (const UnknownClassError& e) {
        return error_response(404, e.kind(), e.what());
    } catch (const Error& e) {
        return error_response(500, e.kind(), e.what());
    } catch (const std::exception& e) {
        return error_response(500, "InternalError", e.what());
    }
}

// ---------------------------------------------------------------------------
// HTTP glue

struct HttpServer::Impl {
    Service& service;
    std::vector<std::string> cors_origins;
    httplib::Server server;

    Impl(Service& s, std::vector<std::string> origins) : service(s), cors_origins(std::move(origins)) {}

    void add_cors(const httplib::Request& req, httplib::Response& res) const {
        if (cors_origins.empty()) return;
        auto origin = req.get_header_value("Origin");
        bool any = std::find(cors_origins.begin(), cors_origins.end(), "*") != cors_origins.end();
        if (any) {
            res.set_header("Access-Control-Allow-Origin", "*");
        } else if (!origin.empty() &&
                   std::find(cors_origins.begin(), cors_origins.end(), origin) != cors_origins.end()) {
            res.set_header("Access-Control-Allow-Origin", origin);
            res.set_header("Vary", "Origin");
        }
    }
};

HttpServer::HttpServer(Service& service, std::vector<std::string> cors_origins, fs::path static_dir)
    : impl_(std::make_unique<Impl>(service, std::move(cors_origins))) {
    auto* impl = impl_.get();
    if (!static_dir.empty()) {
        std::error_code ec;
        if (!fs::is_directory(static_dir, ec)) throw ConfigError("static_dir not found: " + static_dir.string());
        impl->server.set_mount_point("/", static_dir.string());
    }
    auto handler = [impl](const httplib::Request& req, httplib::Response& res) {
        ApiRequest api;
        api.method = req.method;
        auto target = req.target.empty() ? req.path : req.target;
        auto qpos = target.find('?');
        api.path = target.substr(0, qpos);
        // form encoding: '+' is a space (httplib leaves it literal)
        if (qpos != std::string::npos) {
            httplib::detail::split(target.data() + qpos + 1, target.data() + target.size(), '&',
                                   [&](const char* b, const char* e) {
                                       std::string kv(b, e);
                                       auto eq = kv.find('=');
                                       auto key = httplib::detail::decode_url(kv.substr(0, eq), true);
                                       auto val = eq == std::string::npos
                                                      ? std::string{}
                                                      : httplib::detail::decode_url(kv.substr(eq + 1), true);
                                       api.params.emplace(std::move(key), std::move(val));
                                   });
        }
        auto out = impl->service.handle(api);
        res.status = out.status;
        for (const auto& [k, v] : out.headers) res.set_header(k, v);
        impl->add_cors(req, res);
        res.set_content(std::move(out.body), out.content_type);
    };
    impl->server.set_keep_alive_timeout(1);
    impl->server.Get(R"(/.*)", handler);
    impl->server.Post(R"(/.*)", handler);
    impl->server.Options(R"(/.*)", [impl](const httplib::Request& req, httplib::Response& res) {
        impl->add_cors(req, res);
        res.set_header("Access-Control-Allow-Methods", "GET, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        int bound = impl_->server.bind_to_any_port(host);
        if (bound < 0) throw NetworkError("cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port))
        throw NetworkError("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace scholarlens
