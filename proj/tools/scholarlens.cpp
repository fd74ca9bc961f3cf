#include "scholarlens/error.hpp"
#include "scholarlens/extraction.hpp"
#include "scholarlens/ontology.hpp"
#include "scholarlens/query.hpp"
#include "scholarlens/serialize.hpp"
#include "scholarlens/service.hpp"
#include "scholarlens/text.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace scholarlens;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string default_config_path() {
    if (const char* v = std::getenv("SCHOLARLENS_CONFIG")) return v;
    return "service.conf";
}

ServiceConfig load_config(const std::string& path) {
    auto cfg = ServiceConfig::load(path);
    cfg.apply_process_env();
    return cfg;
}

void print_tree(const Ontology& o, const std::string& id, std::size_t indent) {
    std::cout << std::string(indent * 2, ' ') << id << '\n';
    for (const auto& c : o.children(id)) print_tree(o, c, indent + 1);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int validate_fixtures(const fs::path& manifest, fs::path root) {
    if (root.empty()) root = manifest.parent_path().parent_path();
    std::ifstream in(manifest);
    if (!in) {
        std::cerr << "scholarlens: cannot read manifest " << manifest << '\n';
        return kExitRuntime;
    }
    std::size_t failures = 0, checked = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty() || line[0] == '#') continue;
        auto cols = text::split(line, '\t');
        if (cols.size() != 3) {
            std::cout << "FAIL " << manifest.string() << ":" << lineno << ": expected 3 tab-separated columns\n";
            ++failures;
            continue;
        }
        ++checked;
        const auto& page = cols[0];
        try {
            auto rules = ExtractionRuleSet::load(root / cols[1]);
            RawDocument doc;
            doc.source_id = rules.source_id;
            doc.url = "file://" + page;
            doc.body = read_file(root / page);
            doc.media_kind = fs::path(page).extension() == ".json" ? MediaKind::json : MediaKind::html;
            auto got = extract_entries(doc, rules).entries.size();
            auto want = std::stoul(cols[2]);
            if (got == want) {
                std::cout << "ok   " << page << " (" << got << ")\n";
            } else {
                std::cout << "FAIL " << page << ": expected " << want << " entries, extracted " << got << '\n';
                ++failures;
            }
        } catch (const std::exception& e) {
            std::cout << "FAIL " << page << ": " << e.what() << '\n';
            ++failures;
        }
    }
    std::cout << checked - failures << "/" << checked << " fixture pages match\n";
    return failures == 0 && checked > 0 ? 0 : kExitRuntime;
}

int serve(const std::string& config_path, const std::optional<std::string>& host, const std::optional<int>& port) {
    ServiceConfig cfg = load_config(config_path);
    if (host) cfg.host = *host;
    if (port) cfg.port = *port;
    cfg.validate();

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    Service service;
    HttpServer server(service, cfg.cors_origins, cfg.static_dir);
    int bound = server.bind(cfg.host, cfg.port);
    std::thread listener([&] { server.run(); });
    std::cerr << "scholarlens: listening on http://" << cfg.host << ":" << bound << '\n';

    int status = 0;
    try {
        service.set_engine(Engine::create(cfg));
        std::cerr << "scholarlens: ready\n";
    } catch (const std::exception& e) {
        std::cerr << "scholarlens: " << e.what() << '\n';
        status = kExitRuntime;
    }
    if (status == 0) {
        int sig = 0;
        sigwait(&signals, &sig);
        std::cerr << "scholarlens: shutting down\n";
    }
    server.stop();
    listener.join();
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ontology-driven federated search over research portals"};
    app.require_subcommand(1);
    std::string config_path = default_config_path();
    app.fallthrough();
    app.add_option("--config", config_path, "Service configuration file")->capture_default_str();

    auto* search = app.add_subcommand("search", "Run a search locally and print the results");
    std::string query;
    SearchRequest req;
    std::string sources, format = "json", columns;
    std::size_t width = kDefaultTableWidth;
    search->add_option("query", query, "Search keywords, comma-separated phrases")->required();
    search->add_option("--depth", req.depth, "Expansion depth")->capture_default_str();
    search->add_option("--gamma", req.gamma, "Weight decay per hop")->capture_default_str();
    search->add_option("--sources", sources, "Comma-separated source ids (default: all)");
    search->add_option("--limit", req.limit, "Maximum records")->capture_default_str();
    search->add_option("--format", format, "json, xml or table")->capture_default_str();
    search->add_option("--columns", columns, "Table columns (default: title,abstract)");
    search->add_option("--width", width, "Table cell width")->capture_default_str();

    auto* onto = app.add_subcommand("ontology", "Inspect the class hierarchy");
    onto->require_subcommand(1);
    auto* tree = onto->add_subcommand("tree", "Print the hierarchy");
    std::string root;
    tree->add_option("--root", root, "Start at this class");
    auto* expand = onto->add_subcommand("expand", "Print the weighted expansion of a term");
    std::string term;
    std::size_t expand_depth = kDefaultExpansionDepth;
    double expand_gamma = kDefaultGamma;
    expand->add_option("term", term, "Seed term")->required();
    expand->add_option("--depth", expand_depth, "Expansion depth")->capture_default_str();
    expand->add_option("--gamma", expand_gamma, "Weight decay per hop")->capture_default_str();

    auto* srv = app.add_subcommand("serve", "Run the HTTP service");
    std::optional<std::string> host;
    std::optional<int> port;
    srv->add_option("--host", host, "Listen address (overrides config)");
    srv->add_option("--port", port, "Listen port (overrides config)");

    auto* fixtures = app.add_subcommand("fixtures", "Fixture maintenance");
    fixtures->require_subcommand(1);
    auto* validate = fixtures->add_subcommand("validate", "Re-extract fixture pages and check entry counts");
    std::string manifest = "fixtures/manifest.tsv", manifest_root;
    validate->add_option("--manifest", manifest, "Manifest file")->capture_default_str();
    validate->add_option("--root", manifest_root, "Directory manifest paths are relative to");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*search) {
            req.raw_query = query;
            if (!sources.empty())
                for (const auto& s : text::split(sources, ',')) req.sources.push_back(text::trim(s));
            req.format = parse_output_format(format);
            std::vector<std::string> cols = kDefaultTableColumns;
            if (!columns.empty()) {
                cols.clear();
                for (const auto& c : text::split(columns, ',')) cols.push_back(text::trim(c));
            }
            req.validate();
            if (req.format == OutputFormat::table) to_table(ResultSet{}, cols, width);
            auto engine = Engine::create(load_config(config_path));
            auto rs = engine->search(req);
            if (req.format == OutputFormat::table) std::cout << to_table(rs, cols, width);
            else if (req.format == OutputFormat::json) std::cout << to_json(rs) << '\n';
            else std::cout << to_xml(rs);
            return 0;
        }
        if (*onto) {
            auto cfg = load_config(config_path);
            auto o = load_configured_ontology(cfg.ontology_paths);
            if (*tree) {
                if (root.empty()) {
                    for (const auto& r : o.root_ids()) print_tree(o, r, 0);
                } else {
                    print_tree(o, o.node(root).id, 0);
                }
                return 0;
            }
            auto eq = expand_query(o, {term}, expand_depth, expand_gamma);
            std::vector<std::pair<std::string, double>> rows(eq.weighted_terms.begin(), eq.weighted_terms.end());
            std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
            for (const auto& [t, w] : rows) std::cout << t << ' ' << text::format_decimal(w) << '\n';
            return 0;
        }
        if (*srv) return serve(config_path, host, port);
        if (*fixtures) return validate_fixtures(manifest, manifest_root);
    } catch (const EmptyQueryError& e) {
        std::cerr << "scholarlens: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InvalidRequestError& e) {
        std::cerr << "scholarlens: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UnknownColumnError& e) {
        std::cerr << "scholarlens: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "scholarlens: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
