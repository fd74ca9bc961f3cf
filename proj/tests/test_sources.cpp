#include "scholarlens/error.hpp"
#include "scholarlens/sources.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <thread>
#include <unistd.h>

using namespace scholarlens;
using testsupport::OfflineEnv;
using testsupport::repo_root;
using testsupport::shipped_registry;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        static std::atomic<int> n{0};
        path = fs::temp_directory_path() /
               ("scholarlens-test-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& body) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << body;
}

/// Canned responses by URL; records every call with the clock time.
class FakeTransport : public HttpTransport {
public:
    explicit FakeTransport(Clock& clock) : clock_(clock) {}
    std::map<std::string, HttpResponse> pages;
    std::vector<std::pair<std::string, std::int64_t>> calls;
    std::vector<std::pair<std::string, std::string>> last_headers;
    bool fail = false;

    HttpResponse get(const std::string& url, std::int64_t,
                     const std::vector<std::pair<std::string, std::string>>& headers) override {
        std::lock_guard lock(mutex_);
        calls.emplace_back(url, clock_.now_ms());
        last_headers = headers;
        if (fail) throw NetworkError("connection refused: " + url);
        auto it = pages.find(url);
        if (it == pages.end()) return {404, "", "text/html"};
        return it->second;
    }

private:
    Clock& clock_;
    std::mutex mutex_;
};

const char* kLiveRules = R"([ruleset]
source_id = live
media = html
syntax = css
[record]
select = div.hit
[field.title]
select = h3
[pagination]
select = a.next @href
)";

Adapter live_adapter(const fs::path& dir, std::size_t max_pages = 3, std::int64_t interval = 1000) {
    write(dir / "rules.conf", kLiveRules);
    write(dir / "adapter.conf", "[adapter]\nsource_id = live\nbase_url = http://portal.test/base/\n"
                                "query_template = /search?q={terms}\nmax_pages = " +
                                    std::to_string(max_pages) + "\nmin_request_interval_ms = " +
                                    std::to_string(interval) + "\nmode = live\nheader = X-Api-Key: k1\n");
    return Adapter::load(dir / "adapter.conf");
}

std::string hits_page(const std::vector<std::string>& titles, const std::string& next = "") {
    std::string out = "<html><body>";
    for (const auto& t : titles) out += "<div class=hit><h3>" + t + "</h3></div>";
    if (!next.empty()) out += "<a class=next href=\"" + next + "\">more</a>";
    return out + "</body></html>";
}

}  // namespace

TEST(AdapterConfig, LoadsShippedConfigs) {
    auto cfg = AdapterConfig::load(repo_root() / "sources" / "ieee_xplore" / "adapter.conf");
    EXPECT_EQ(cfg.source_id, "ieee_xplore");
    EXPECT_EQ(cfg.mode, AdapterMode::fixture);
    EXPECT_EQ(cfg.max_pages, 3u);
    EXPECT_TRUE(fs::is_directory(cfg.fixture_dir));
    EXPECT_TRUE(fs::is_regular_file(cfg.ruleset_path));
}

TEST(AdapterConfig, Validation) {
    TempDir tmp;
    auto conf = tmp.path / "adapter.conf";
    write(conf, "[adapter]\nsource_id=x\nbase_url=http://h\nquery_template=/s?q=\nmode=live\n");
    EXPECT_THROW(AdapterConfig::load(conf), ConfigError);
    write(conf, "[adapter]\nsource_id=x\nbase_url=http://h\nquery_template=/s?q={terms}\nmode=fixture\n");
    EXPECT_THROW(AdapterConfig::load(conf), ConfigError);
    write(conf, "[adapter]\nsource_id=x\nbase_url=http://h\nquery_template=/s?q={terms}\nmode=live\nmax_pages=0\n");
    EXPECT_THROW(AdapterConfig::load(conf), ConfigError);
    write(conf, "[adapter]\nsource_id=x\nbase_url=http://h\nquery_template=/s?q={terms}\nmode=offline\n");
    EXPECT_THROW(AdapterConfig::load(conf), ConfigError);
    write(conf, "[adapter]\nsource_id=x\nbase_url=http://h\nquery_template=/s?q={terms}\nmode=live\n");
    EXPECT_NO_THROW(AdapterConfig::load(conf));
}

TEST(Urls, BuildAndResolve) {
    AdapterConfig cfg;
    cfg.base_url = "https://portal.test";
    cfg.query_template = "/search?q={terms}&p={page}";
    EXPECT_EQ(build_query_url(cfg, {"remote", "sensing"}, 2), "https://portal.test/search?q=remote+sensing&p=2");
    EXPECT_EQ(build_query_url(cfg, {"c++", "a&b"}, 1), "https://portal.test/search?q=c%2B%2B+a%26b&p=1");
    EXPECT_EQ(query_slug({"Remote", "sensing"}), "remote-sensing");
    EXPECT_EQ(query_slug({"computer of science"}), "computer-of-science");
    EXPECT_EQ(resolve_url("http://h/a/b?x=1", "/c"), "http://h/c");
    EXPECT_EQ(resolve_url("http://h/a/b?x=1", "c?d=2"), "http://h/a/c?d=2");
    EXPECT_EQ(resolve_url("http://h/a/b?x=1", "?x=2"), "http://h/a/b?x=2");
    EXPECT_EQ(resolve_url("http://h/a/b", "https://o/z"), "https://o/z");
    EXPECT_EQ(resolve_url("https://h/a", "//cdn/z"), "https://cdn/z");
}

TEST(RunAdapter, FixtureRemoteSensing) {
    OfflineEnv off;
    auto out = run_adapter(shipped_registry().get("fixture_corpus"), {"remote", "sensing"}, off.env);
    ASSERT_EQ(out.records.size(), 9u);
    EXPECT_EQ(out.pages_fetched, 1u);
    EXPECT_TRUE(out.errors.empty());
    std::size_t front = 0;
    for (const auto& r : out.records)
        front += r.title == "2002 IEEE International Geoscience and Remote Sensing Symposium [front matter]";
    EXPECT_EQ(front, 5u);
}

TEST(RunAdapter, FixtureUnknownQueryIsEmpty) {
    OfflineEnv off;
    auto out = run_adapter(shipped_registry().get("ieee_xplore"), {"zzz", "qqq"}, off.env);
    EXPECT_TRUE(out.records.empty());
    EXPECT_TRUE(out.errors.empty());
    EXPECT_EQ(out.pages_fetched, 0u);
}

TEST(RunAdapter, FixturePagination) {
    OfflineEnv off;
    auto graphics = run_adapter(shipped_registry().get("ieee_xplore"), {"computer", "graphics"}, off.env);
    EXPECT_EQ(graphics.pages_fetched, 2u);
    EXPECT_EQ(graphics.records.size(), 12u);
    auto mining = run_adapter(shipped_registry().get("academic_graph"), {"data", "mining"}, off.env);
    EXPECT_EQ(mining.pages_fetched, 2u);
    EXPECT_EQ(mining.records.size(), 6u);
}

TEST(RunAdapter, FixtureModeIsPure) {
    OfflineEnv off;
    for (const auto& id : shipped_registry().ids()) {
        auto a = run_adapter(shipped_registry().get(id), {"neural", "networks"}, off.env);
        auto b = run_adapter(shipped_registry().get(id), {"Neural", "Networks"}, off.env);
        EXPECT_EQ(a.records, b.records) << id;
    }
}

TEST(RunAdapter, LivePaginationFollowsNextLinks) {
    TempDir tmp;
    auto adapter = live_adapter(tmp.path);
    ManualClock clock(1'000'000);
    FakeTransport transport(clock);
    PolitenessGate gate(clock);
    transport.pages["http://portal.test/search?q=data+mining"] = {200, hits_page({"A", "B"}, "/search?q=data+mining&p=2"), "text/html"};
    transport.pages["http://portal.test/search?q=data+mining&p=2"] = {200, hits_page({"C"}, "?q=data+mining&p=3"), "text/html"};
    transport.pages["http://portal.test/search?q=data+mining&p=3"] = {200, hits_page({"D"}, "?q=data+mining&p=4"), "text/html"};
    FetchEnvironment env{&transport, &clock, nullptr, &gate};
    auto out = run_adapter(adapter, {"data", "mining"}, env);
    EXPECT_EQ(out.pages_fetched, 3u);
    ASSERT_EQ(out.records.size(), 4u);
    EXPECT_EQ(out.records[3].title, "D");
    EXPECT_TRUE(out.errors.empty());
    EXPECT_EQ(transport.last_headers, (std::vector<std::pair<std::string, std::string>>{{"X-Api-Key", "k1"}}));
    // Politeness: consecutive requests spaced by the interval.
    ASSERT_EQ(transport.calls.size(), 3u);
    for (std::size_t i = 1; i < transport.calls.size(); ++i)
        EXPECT_GE(transport.calls[i].second - transport.calls[i - 1].second, 1000);
}

TEST(RunAdapter, LiveStopsOnEmptyPageAndRecordsErrors) {
    TempDir tmp;
    auto adapter = live_adapter(tmp.path);
    ManualClock clock;
    FakeTransport transport(clock);
    transport.pages["http://portal.test/search?q=x"] = {200, hits_page({}, "?q=x&p=2"), "text/html"};
    FetchEnvironment env{&transport, &clock, nullptr, nullptr};
    auto empty = run_adapter(adapter, {"x"}, env);
    EXPECT_EQ(empty.pages_fetched, 1u);
    EXPECT_EQ(transport.calls.size(), 1u);

    auto missing = run_adapter(adapter, {"y"}, env);
    EXPECT_TRUE(missing.records.empty());
    ASSERT_EQ(missing.errors.size(), 1u);
    EXPECT_NE(missing.errors[0].message.find("404"), std::string::npos);

    transport.fail = true;
    auto down = run_adapter(adapter, {"x"}, env);
    EXPECT_TRUE(down.records.empty());
    EXPECT_EQ(down.errors.size(), 1u);
    EXPECT_EQ(down.pages_fetched, 0u);
}

TEST(RunAdapter, UnreachableHostIsNonFatal) {
    TempDir tmp;
    write(tmp.path / "rules.conf", kLiveRules);
    write(tmp.path / "adapter.conf", "[adapter]\nsource_id = live\nbase_url = http://127.0.0.1:1\n"
                                     "query_template = /s?q={terms}\nmode = live\ntimeout_ms = 500\n");
    auto adapter = Adapter::load(tmp.path / "adapter.conf");
    SystemClock clock;
    HttplibTransport transport;
    FetchEnvironment env{&transport, &clock, nullptr, nullptr};
    auto out = run_adapter(adapter, {"x"}, env);
    EXPECT_TRUE(out.records.empty());
    EXPECT_EQ(out.errors.size(), 1u);
}

TEST(FetchPage, CacheHitsWithinTtlAndStatusErrors) {
    TempDir tmp;
    auto adapter = live_adapter(tmp.path / "a");
    ManualClock clock(5'000'000);
    FakeTransport transport(clock);
    CacheStore cache(tmp.path / "cache", std::chrono::seconds(60), clock);
    FetchEnvironment env{&transport, &clock, &cache, nullptr};
    transport.pages["http://portal.test/p"] = {200, "{\"a\":1}", "application/json"};

    auto first = fetch_page(adapter.config, "http://portal.test/p", env);
    EXPECT_FALSE(first.from_cache);
    EXPECT_EQ(first.document.media_kind, MediaKind::json);
    auto second = fetch_page(adapter.config, "http://portal.test/p", env);
    EXPECT_TRUE(second.from_cache);
    EXPECT_EQ(second.document.body, "{\"a\":1}");
    EXPECT_EQ(second.document.media_kind, MediaKind::json);
    EXPECT_EQ(transport.calls.size(), 1u);

    clock.advance(60'000);
    EXPECT_FALSE(fetch_page(adapter.config, "http://portal.test/p", env).from_cache);
    EXPECT_EQ(transport.calls.size(), 2u);

    try {
        fetch_page(adapter.config, "http://portal.test/missing", env);
        FAIL();
    } catch (const HttpStatusError& e) {
        EXPECT_EQ(e.status(), 404);
    }
    EXPECT_THROW(fetch_page(adapter.config, "not a url", env), NetworkError);
}

TEST(FetchPage, TtlZeroAlwaysRefetches) {
    TempDir tmp;
    auto adapter = live_adapter(tmp.path / "a");
    ManualClock clock;
    FakeTransport transport(clock);
    CacheStore cache(tmp.path / "cache", std::chrono::seconds(0), clock);
    FetchEnvironment env{&transport, &clock, &cache, nullptr};
    transport.pages["http://portal.test/p"] = {200, "<p>x</p>", "text/html"};
    for (int i = 0; i < 3; ++i) EXPECT_FALSE(fetch_page(adapter.config, "http://portal.test/p", env).from_cache);
    EXPECT_EQ(transport.calls.size(), 3u);
}

TEST(Cache, KeyingAndConcurrentWriters) {
    TempDir tmp;
    ManualClock clock;
    CacheStore cache(tmp.path, std::chrono::seconds(100), clock);
    std::mt19937 rng(1);
    std::set<std::string> keys;
    std::vector<std::string> urls;
    for (int i = 0; i < 300; ++i) {
        std::string u = "http://h/q?x=" + std::to_string(rng());
        urls.push_back(u);
        u.back() ^= 1;
        urls.push_back(u);
    }
    for (const auto& u : urls) keys.insert(CacheStore::key_for(u));
    std::set<std::string> distinct(urls.begin(), urls.end());
    EXPECT_EQ(keys.size(), distinct.size());
    EXPECT_EQ(CacheStore::key_for("http://a/"), CacheStore::key_for("http://a/"));

    const std::string a(100000, 'a'), b(100000, 'b');
    std::vector<std::thread> writers;
    for (int t = 0; t < 8; ++t)
        writers.emplace_back([&, t] {
            for (int i = 0; i < 20; ++i) {
                cache.store("http://same/", t % 2 ? a : b, "text/plain");
                cache.store("http://own/" + std::to_string(t), std::to_string(t), "text/plain");
                if (auto hit = cache.lookup("http://same/")) ASSERT_TRUE(hit->body == a || hit->body == b);
            }
        });
    for (auto& w : writers) w.join();
    auto hit = cache.lookup("http://same/");
    ASSERT_TRUE(hit);
    EXPECT_TRUE(hit->body == a || hit->body == b);
    for (int t = 0; t < 8; ++t) EXPECT_EQ(cache.lookup("http://own/" + std::to_string(t))->body, std::to_string(t));
    for (const auto& e : fs::recursive_directory_iterator(tmp.path))
        EXPECT_NE(e.path().extension(), ".tmp") << e.path();
}

TEST(Politeness, SpacesRequestsPerSource) {
    ManualClock clock(0);
    PolitenessGate gate(clock);
    std::vector<std::int64_t> times;
    for (int i = 0; i < 5; ++i) {
        gate.wait_turn("a", 250);
        times.push_back(clock.now_ms());
        clock.advance(40);
    }
    for (std::size_t i = 1; i < times.size(); ++i) EXPECT_GE(times[i] - times[i - 1], 250);
    auto before = clock.now_ms();
    gate.wait_turn("b", 250);
    EXPECT_EQ(clock.now_ms(), before);
}

TEST(Politeness, ConcurrentCallersStaySpaced) {
    SystemClock clock;
    PolitenessGate gate(clock);
    std::mutex m;
    std::vector<std::int64_t> times;
    std::vector<std::thread> ts;
    for (int i = 0; i < 4; ++i)
        ts.emplace_back([&] {
            gate.wait_turn("s", 30);
            std::lock_guard lock(m);
            times.push_back(clock.now_ms());
        });
    for (auto& t : ts) t.join();
    std::sort(times.begin(), times.end());
    for (std::size_t i = 1; i < times.size(); ++i) EXPECT_GE(times[i] - times[i - 1], 29);
}

TEST(Registry, ShippedSources) {
    auto list = list_sources(shipped_registry());
    ASSERT_EQ(list.size(), 3u);
    EXPECT_EQ(list[0].source_id, "academic_graph");
    EXPECT_EQ(list[1].source_id, "fixture_corpus");
    EXPECT_EQ(list[2].source_id, "ieee_xplore");
    for (const auto& s : list) EXPECT_EQ(s.mode, AdapterMode::fixture);
    EXPECT_TRUE(list_sources(Registry{}).empty());
    EXPECT_THROW(shipped_registry().get("nope"), UnknownSourceError);
}

TEST(Registry, DuplicateSourceIdIsConfigError) {
    TempDir tmp;
    live_adapter(tmp.path / "one");
    live_adapter(tmp.path / "two");
    EXPECT_THROW(Registry::load(tmp.path), ConfigError);
    EXPECT_THROW(Registry::load(tmp.path / "absent"), ConfigError);
}
