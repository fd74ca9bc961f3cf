#include "scholarlens/sources.hpp"

#include "scholarlens/config.hpp"
#include "scholarlens/error.hpp"
#include "scholarlens/hash.hpp"
#include "scholarlens/text.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace scholarlens {

namespace fs = std::filesystem;

std::string to_string(AdapterMode mode) { return mode == AdapterMode::live ? "live" : "fixture"; }

namespace {

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void replace_all(std::string& s, std::string_view what, const std::string& with) {
    std::size_t pos = 0;
    while ((pos = s.find(what, pos)) != std::string::npos) {
        s.replace(pos, what.size(), with);
        pos += with.size();
    }
}

}  // namespace

AdapterConfig AdapterConfig::load(const fs::path& path) {
    auto kv = KeyValueConfig::load(path);
    auto dir = path.parent_path();
    AdapterConfig c;
    c.source_id = kv.require("adapter", "source_id");
    c.display_name = kv.get_or("adapter", "display_name", c.source_id);
    c.base_url = kv.require("adapter", "base_url");
    c.query_template = kv.require("adapter", "query_template");
    c.ruleset_path = dir / kv.get_or("adapter", "ruleset", "rules.conf");
    auto max_pages = kv.get_int("adapter", "max_pages", 1);
    auto timeout = kv.get_int("adapter", "timeout_ms", 10000);
    auto interval = kv.get_int("adapter", "min_request_interval_ms", 1000);
    if (max_pages < 1) throw ConfigError(path.string() + ": max_pages must be positive");
    if (timeout < 1) throw ConfigError(path.string() + ": timeout_ms must be positive");
    if (interval < 0) throw ConfigError(path.string() + ": min_request_interval_ms must be non-negative");
    c.max_pages = static_cast<std::size_t>(max_pages);
    c.timeout_ms = timeout;
    c.min_request_interval_ms = interval;
    auto mode = kv.get_or("adapter", "mode", "fixture");
    if (mode == "live") c.mode = AdapterMode::live;
    else if (mode == "fixture") c.mode = AdapterMode::fixture;
    else throw ConfigError(path.string() + ": mode must be 'live' or 'fixture'");
    if (auto fd = kv.get("adapter", "fixture_dir"); fd && !fd->empty()) c.fixture_dir = dir / *fd;
    if (auto h = kv.get("adapter", "header"); h && !h->empty()) {
        auto colon = h->find(':');
        if (colon == std::string::npos) throw ConfigError(path.string() + ": header must be 'Name: value'");
        c.header = std::make_pair(text::trim(std::string_view(*h).substr(0, colon)),
                                  text::trim(std::string_view(*h).substr(colon + 1)));
    }
    c.validate();
    return c;
}

void AdapterConfig::validate() const {
    if (source_id.empty()) throw ConfigError("adapter has no source_id");
    if (query_template.find("{terms}") == std::string::npos)
        throw ConfigError("adapter '" + source_id + "': query_template lacks {terms}");
    if (max_pages < 1) throw ConfigError("adapter '" + source_id + "': max_pages must be positive");
    if (timeout_ms < 1) throw ConfigError("adapter '" + source_id + "': timeout_ms must be positive");
    if (min_request_interval_ms < 0)
        throw ConfigError("adapter '" + source_id + "': min_request_interval_ms must be non-negative");
    if (mode == AdapterMode::fixture && fixture_dir.empty())
        throw ConfigError("adapter '" + source_id + "': fixture mode needs fixture_dir");
}

std::string build_query_url(const AdapterConfig& cfg, const std::vector<std::string>& terms, std::size_t page) {
    std::vector<std::string> encoded;
    for (const auto& t : terms) encoded.push_back(text::percent_encode(t));
    std::string q = cfg.query_template;
    replace_all(q, "{terms}", text::join(encoded, "+"));
    replace_all(q, "{page}", std::to_string(page));
    return resolve_url(cfg.base_url, q);
}

std::string query_slug(const std::vector<std::string>& terms) {
    std::vector<std::string> parts;
    for (const auto& t : terms)
        for (auto& w : text::words(t)) parts.push_back(std::move(w));
    return text::join(parts, "-");
}

std::string resolve_url(const std::string& base, const std::string& link) {
    auto scheme_end = link.find("://");
    if (scheme_end != std::string::npos && link.find('/') > scheme_end) return link;
    auto origin_end = base.find("://");
    std::size_t path_start =
        origin_end == std::string::npos ? std::string::npos : base.find('/', origin_end + 3);
    std::string origin = path_start == std::string::npos ? base : base.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : base.substr(path_start);
    if (link.empty()) return base;
    if (link[0] == '/') {
        if (link.size() > 1 && link[1] == '/') {
            auto scheme = origin_end == std::string::npos ? std::string("http") : base.substr(0, origin_end);
            return scheme + ":" + link;
        }
        // Keep any base path prefix only when the template is root-relative
        // to the origin.
        return origin + link;
    }
    if (link[0] == '?') {
        auto q = path.find('?');
        return origin + (q == std::string::npos ? path : path.substr(0, q)) + link;
    }
    auto slash = path.find_last_of('/');
    return origin + path.substr(0, slash + 1) + link;
}

std::int64_t SystemClock::now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

void SystemClock::sleep_ms(std::int64_t ms) {
    if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

std::int64_t ManualClock::now_ms() {
    std::lock_guard lock(mutex_);
    return now_;
}

void ManualClock::sleep_ms(std::int64_t ms) {
    if (ms > 0) advance(ms);
}

void ManualClock::advance(std::int64_t ms) {
    std::lock_guard lock(mutex_);
    now_ += ms;
}

// ---------------------------------------------------------------------------
// Cache

CacheStore::CacheStore(fs::path dir, std::chrono::seconds ttl, Clock& clock)
    : dir_(std::move(dir)), ttl_(ttl), clock_(clock) {}

std::string CacheStore::key_for(const std::string& url) { return sha256_hex(url); }

fs::path CacheStore::path_for(const std::string& key) const { return dir_ / key.substr(0, 2) / (key + ".page"); }

std::optional<CachedPage> CacheStore::lookup(const std::string& url) const {
    if (ttl_.count() <= 0) return std::nullopt;
    auto path = path_for(key_for(url));
    std::error_code ec;
    if (!fs::exists(path, ec)) return std::nullopt;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CacheError("cannot open cache entry " + path.string());
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string magic, stored_url_hash;
    CachedPage page;
    hs >> magic >> page.stored_at_ms;
    std::getline(hs >> std::ws, page.content_type);
    if (magic != "SLC1") throw CacheError("corrupt cache entry " + path.string());
    std::ostringstream body;
    body << in.rdbuf();
    page.body = body.str();
    auto age_ms = clock_.now_ms() - page.stored_at_ms;
    if (age_ms < 0 || age_ms >= ttl_.count() * 1000) return std::nullopt;
    return page;
}

void CacheStore::store(const std::string& url, const std::string& body, const std::string& content_type) const {
    static std::atomic<unsigned long> counter{0};
    auto key = key_for(url);
    auto path = path_for(key);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw CacheError("cannot create cache directory " + path.parent_path().string() + ": " + ec.message());
    std::ostringstream tmp_name;
    tmp_name << key << '.' << std::this_thread::get_id() << '.' << counter++ << ".tmp";
    auto tmp = path.parent_path() / tmp_name.str();
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CacheError("cannot write cache entry " + tmp.string());
        std::string ct = content_type;
        for (auto& c : ct)
            if (c == '\n' || c == '\r') c = ' ';
        out << "SLC1 " << clock_.now_ms() << ' ' << ct << '\n' << body;
        if (!out) throw CacheError("short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw CacheError("cannot publish cache entry " + path.string());
    }
}

void PolitenessGate::wait_turn(const std::string& source_id, std::int64_t min_interval_ms) {
    std::mutex* source_mutex;
    {
        std::lock_guard lock(mutex_);
        auto& m = per_source_[source_id];
        if (!m) m = std::make_unique<std::mutex>();
        source_mutex = m.get();
    }
    std::lock_guard source_lock(*source_mutex);
    std::optional<std::int64_t> last;
    {
        std::lock_guard lock(mutex_);
        if (auto it = last_.find(source_id); it != last_.end()) last = it->second;
    }
    if (last) {
        auto wait = *last + min_interval_ms - clock_.now_ms();
        if (wait > 0) clock_.sleep_ms(wait);
    }
    std::lock_guard lock(mutex_);
    last_[source_id] = clock_.now_ms();
}

FetchedPage fetch_page(const AdapterConfig& cfg, const std::string& url, FetchEnvironment& env) {
    if (url.find("://") == std::string::npos) throw NetworkError("malformed URL '" + url + "'");
    auto now = [&] {
        return std::chrono::system_clock::time_point(
            std::chrono::milliseconds(env.clock ? env.clock->now_ms() : SystemClock().now_ms()));
    };
    if (env.cache) {
        if (auto hit = env.cache->lookup(url)) {
            FetchedPage page;
            page.document = RawDocument{cfg.source_id, url, sniff_media(hit->content_type, hit->body),
                                        std::move(hit->body), now()};
            page.from_cache = true;
            return page;
        }
    }
    if (!env.transport) throw NetworkError("no HTTP transport configured");
    if (env.politeness) env.politeness->wait_turn(cfg.source_id, cfg.min_request_interval_ms);
    std::vector<std::pair<std::string, std::string>> headers;
    if (cfg.header) headers.push_back(*cfg.header);
    auto resp = env.transport->get(url, cfg.timeout_ms, headers);
    if (resp.status < 200 || resp.status >= 300) throw HttpStatusError(resp.status, url);
    if (env.cache) env.cache->store(url, resp.body, resp.content_type);
    FetchedPage page;
    page.document =
        RawDocument{cfg.source_id, url, sniff_media(resp.content_type, resp.body), std::move(resp.body), now()};
    return page;
}

Adapter Adapter::load(const fs::path& adapter_conf) {
    Adapter a;
    a.config = AdapterConfig::load(adapter_conf);
    a.rules = ExtractionRuleSet::load(a.config.ruleset_path);
    if (a.rules.source_id != a.config.source_id)
        throw ConfigError(adapter_conf.string() + ": ruleset source_id '" + a.rules.source_id +
                          "' does not match '" + a.config.source_id + "'");
    return a;
}

namespace {

std::optional<RawDocument> read_fixture_page(const Adapter& adapter, const std::string& slug, std::size_t page,
                                             const std::string& url, Clock* clock) {
    const auto& cfg = adapter.config;
    auto dir = cfg.fixture_dir / slug;
    auto stem = "page" + std::to_string(page);
    for (const char* ext : {".html", ".json"}) {
        auto p = dir / (stem + ext);
        std::error_code ec;
        if (!fs::is_regular_file(p, ec)) continue;
        RawDocument doc;
        doc.source_id = cfg.source_id;
        doc.url = url;
        doc.body = read_all(p);
        doc.media_kind = std::string_view(ext) == ".json" ? MediaKind::json : MediaKind::html;
        doc.fetched_at = std::chrono::system_clock::time_point(
            std::chrono::milliseconds(clock ? clock->now_ms() : 0));
        return doc;
    }
    return std::nullopt;
}

}  // namespace

FetchOutcome run_adapter(const Adapter& adapter, const std::vector<std::string>& terms, FetchEnvironment& env) {
    const auto& cfg = adapter.config;
    cfg.validate();
    std::vector<std::string> clean;
    for (const auto& t : terms) {
        auto n = text::normalize(t);
        if (!n.empty()) clean.push_back(n);
    }
    if (clean.empty()) throw EmptyQueryError();

    FetchOutcome out;
    TransformOptions transform{adapter.rules.author_separators};
    auto slug = query_slug(clean);
    std::string url = build_query_url(cfg, clean, 1);
    bool template_paged = cfg.query_template.find("{page}") != std::string::npos;

    for (std::size_t page = 1; page <= cfg.max_pages; ++page) {
        RawDocument doc;
        bool cached = false;
        try {
            if (cfg.mode == AdapterMode::fixture) {
                auto fixture = read_fixture_page(adapter, slug, page, url, env.clock);
                if (!fixture) break;
                doc = std::move(*fixture);
            } else {
                auto fetched = fetch_page(cfg, url, env);
                doc = std::move(fetched.document);
                cached = fetched.from_cache;
            }
        } catch (const Error& e) {
            out.errors.push_back({page, e.kind() + ": " + e.what()});
            break;
        }
        ++out.pages_fetched;
        out.from_cache.push_back(cached);

        std::optional<std::string> next;
        std::size_t entries = 0;
        try {
            auto idoc = extract_entries(doc, adapter.rules);
            entries = idoc.entries.size();
            out.warnings.insert(out.warnings.end(), idoc.warnings.begin(), idoc.warnings.end());
            auto batch = transform_to_canonical(idoc, transform);
            out.warnings.insert(out.warnings.end(), batch.warnings.begin(), batch.warnings.end());
            for (auto& r : batch.records) out.records.push_back(std::move(r));
            next = find_next_page(doc, adapter.rules);
        } catch (const Error& e) {
            out.errors.push_back({page, e.kind() + ": " + e.what()});
            break;
        }
        if (entries == 0) break;
        if (adapter.rules.pagination_rule) {
            if (!next) break;
            url = cfg.mode == AdapterMode::live ? resolve_url(url, *next) : build_query_url(cfg, clean, page + 1);
        } else if (template_paged) {
            url = build_query_url(cfg, clean, page + 1);
        } else {
            break;
        }
    }
    return out;
}

Registry Registry::load(const fs::path& sources_dir) {
    std::error_code ec;
    if (!fs::is_directory(sources_dir, ec)) throw ConfigError("sources directory not found: " + sources_dir.string());
    std::vector<fs::path> confs;
    for (const auto& entry : fs::directory_iterator(sources_dir)) {
        auto conf = entry.path() / "adapter.conf";
        if (entry.is_directory() && fs::is_regular_file(conf)) confs.push_back(conf);
    }
    std::sort(confs.begin(), confs.end());
    Registry r;
    for (const auto& c : confs) r.add(Adapter::load(c));
    return r;
}

void Registry::add(Adapter adapter) {
    auto id = adapter.config.source_id;
    if (!adapters_.emplace(id, std::move(adapter)).second)
        throw ConfigError("source id '" + id + "' is defined more than once");
}

const Adapter& Registry::get(const std::string& source_id) const {
    auto it = adapters_.find(source_id);
    if (it == adapters_.end()) throw UnknownSourceError(source_id);
    return it->second;
}

bool Registry::contains(const std::string& source_id) const { return adapters_.count(source_id) != 0; }

std::vector<std::string> Registry::ids() const {
    std::vector<std::string> out;
    for (const auto& [id, _] : adapters_) out.push_back(id);
    return out;
}

std::vector<SourceInfo> list_sources(const Registry& registry) {
    std::vector<SourceInfo> out;
    for (const auto& id : registry.ids()) {
        const auto& cfg = registry.get(id).config;
        out.push_back({cfg.source_id, cfg.display_name, cfg.mode});
    }
    return out;
}

}  // namespace scholarlens
