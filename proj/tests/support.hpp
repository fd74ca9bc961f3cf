#pragma once

#include "scholarlens/extraction.hpp"
#include "scholarlens/ontology.hpp"
#include "scholarlens/query.hpp"
#include "scholarlens/service.hpp"
#include "scholarlens/sources.hpp"
#include "scholarlens/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace testsupport {

namespace fs = std::filesystem;

inline fs::path repo_root() { return fs::path(SCHOLARLENS_SOURCE_DIR); }

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<fs::path> shipped_ontology_files() {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(repo_root() / "fixtures" / "ontologies"))
        if (e.path().extension() == ".onto") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

inline const scholarlens::Ontology& shipped_ontology() {
    static const auto o = scholarlens::load_ontology_files(shipped_ontology_files(), "ontology");
    return o;
}

inline const scholarlens::Registry& shipped_registry() {
    static const auto r = scholarlens::Registry::load(repo_root() / "sources");
    return r;
}

inline scholarlens::ServiceConfig shipped_config() {
    return scholarlens::ServiceConfig::load(repo_root() / "service.conf");
}

/// Offline environment: no transport, manual clock, no cache.
struct OfflineEnv {
    scholarlens::ManualClock clock;
    scholarlens::FetchEnvironment env{nullptr, &clock, nullptr, nullptr};
};

/// The Chapter-4 query strings.
inline const std::vector<std::string>& chapter4_queries() {
    static const std::vector<std::string> q{
        "Computer of science", "Reverse Engineering",    "Software Quality Assurance", "Networking",
        "Modeling",            "Neural Networks",        "Computer graphics",          "Artificial intelligence",
        "Data mining",         "Clustering",             "Cloud computing",            "Big data",
        "Remote Sensing",      "Application programming interface"};
    return q;
}

/// Every record of every shipped fixture page, in registry order.
inline std::vector<scholarlens::ScholarRecord> fixture_records() {
    using namespace scholarlens;
    std::vector<ScholarRecord> out;
    const auto& reg = shipped_registry();
    OfflineEnv off;
    for (const auto& id : reg.ids()) {
        const auto& adapter = reg.get(id);
        std::vector<fs::path> slugs;
        for (const auto& e : fs::directory_iterator(adapter.config.fixture_dir))
            if (e.is_directory()) slugs.push_back(e.path());
        std::sort(slugs.begin(), slugs.end());
        for (const auto& slug : slugs) {
            auto outcome = run_adapter(adapter, text::split(slug.filename().string(), '-'), off.env);
            out.insert(out.end(), outcome.records.begin(), outcome.records.end());
        }
    }
    return out;
}

/// Random DAG over `n` classes. Edges only point from a later node to an
/// earlier one, so the result is acyclic by construction.
inline std::vector<scholarlens::ClassNode> random_dag(std::mt19937& rng, std::size_t n, double edge_p) {
    std::vector<scholarlens::ClassNode> nodes(n);
    std::bernoulli_distribution edge(edge_p);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i].id = "c" + std::to_string(i);
        nodes[i].label = "C" + std::to_string(i);
        for (std::size_t j = 0; j < i; ++j)
            if (edge(rng)) nodes[i].parents.insert(nodes[j].id);
    }
    std::shuffle(nodes.begin(), nodes.end(), rng);
    return nodes;
}

// Minimum hop distance by plain BFS over a parent->children adjacency built
// from the raw node list.
inline std::map<std::string, std::size_t> bfs_oracle(const std::vector<scholarlens::ClassNode>& nodes,
                                                     const std::string& from, std::size_t max_depth) {
    std::map<std::string, std::vector<std::string>> kids;
    for (const auto& n : nodes)
        for (const auto& p : n.parents) kids[p].push_back(n.id);
    std::map<std::string, std::size_t> dist{{from, 0}};
    std::deque<std::string> q{from};
    while (!q.empty()) {
        auto cur = q.front();
        q.pop_front();
        if (dist[cur] == max_depth) continue;
        for (const auto& k : kids[cur])
            if (!dist.count(k)) {
                dist[k] = dist[cur] + 1;
                q.push_back(k);
            }
    }
    dist.erase(from);
    return dist;
}

/// Naive phrase counter: slides the phrase over the token list, restarting
/// after each hit.
inline std::size_t naive_count(const std::string& phrase, const std::string& text) {
    auto tokenize = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (unsigned char c : s) {
            bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
            if (word) {
                cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c + 32) : static_cast<char>(c);
            } else if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        }
        if (!cur.empty()) out.push_back(cur);
        return out;
    };
    auto p = tokenize(phrase);
    auto t = tokenize(text);
    if (p.empty()) return 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i + p.size() <= t.size();) {
        if (std::equal(p.begin(), p.end(), t.begin() + static_cast<std::ptrdiff_t>(i))) {
            ++n;
            i += p.size();
        } else {
            ++i;
        }
    }
    return n;
}

/// Score computed from scratch with the naive counter.
inline double naive_score(const scholarlens::ScholarRecord& r, const std::map<std::string, double>& terms) {
    double s = 0;
    for (const auto& [t, w] : terms) s += w * (3.0 * naive_count(t, r.title) + naive_count(t, r.abstract));
    return s;
}

}  // namespace testsupport
