#include "scholarlens/query.hpp"

#include "scholarlens/error.hpp"
#include "scholarlens/text.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <tuple>
#include <unordered_map>

namespace scholarlens {

std::string to_string(OutputFormat format) {
    switch (format) {
    case OutputFormat::json: return "json";
    case OutputFormat::xml: return "xml";
    case OutputFormat::table: return "table";
    }
    return "json";
}

OutputFormat parse_output_format(const std::string& name) {
    auto n = text::normalize(name);
    if (n == "json") return OutputFormat::json;
    if (n == "xml") return OutputFormat::xml;
    if (n == "table") return OutputFormat::table;
    throw InvalidRequestError("unknown format '" + name + "' (expected json, xml or table)");
}

void SearchRequest::validate() const {
    if (seed_terms_from_query(raw_query).empty()) throw EmptyQueryError();
    if (limit < 1 || limit > kMaxLimit)
        throw InvalidRequestError("limit must be between 1 and " + std::to_string(kMaxLimit));
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidRequestError("gamma must be in (0, 1]");
}

std::vector<std::string> seed_terms_from_query(const std::string& raw_query) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto add = [&](std::string t) {
        if (!t.empty() && seen.insert(t).second) out.push_back(std::move(t));
    };
    for (const auto& part : text::split(raw_query, ',')) {
        auto phrase = text::normalize(part);
        if (phrase.empty()) continue;
        add(phrase);
        auto ws = text::words(phrase);
        if (ws.size() > 1)
            for (auto& w : ws) add(std::move(w));
    }
    return out;
}

std::vector<std::string> query_words(const std::string& raw_query) { return text::words(raw_query); }

ScoredRecord score_record(const ScholarRecord& r, const ExpandedQuery& eq) {
    ScoredRecord out;
    out.record = r;
    auto title = text::words(text::normalize(r.title));
    auto abstract = text::words(text::normalize(r.abstract));
    for (const auto& [term, weight] : eq.weighted_terms) {
        auto phrase = text::words(term);
        auto in_title = text::count_phrase(phrase, title);
        auto in_abstract = text::count_phrase(phrase, abstract);
        if (in_title + in_abstract == 0) continue;
        out.matched_terms[term] = in_title + in_abstract;
        out.score += weight * (kTitleWeight * static_cast<double>(in_title) + static_cast<double>(in_abstract));
    }
    return out;
}

std::string dedup_key(const ScholarRecord& r) {
    return text::normalize(r.title) + "|" + (r.year ? std::to_string(*r.year) : std::string());
}

bool ranks_before(const ScoredRecord& a, const ScoredRecord& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.record.title, a.record.source_id, a.record.record_id) <
           std::tie(b.record.title, b.record.source_id, b.record.record_id);
}

DedupeResult dedupe(const std::vector<ScoredRecord>& records) {
    std::unordered_map<std::string, std::size_t> best;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto [it, fresh] = best.emplace(dedup_key(records[i].record), i);
        if (!fresh && ranks_before(records[i], records[it->second])) it->second = i;
    }
    std::vector<bool> keep(records.size(), false);
    for (const auto& [_, i] : best) keep[i] = true;
    DedupeResult out;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (keep[i]) out.records.push_back(records[i]);
    out.removed = records.size() - out.records.size();
    return out;
}

ResultSet federate_search(const SearchRequest& req, const Ontology& ontology, const Registry& registry,
                          FetchEnvironment& env, const SourceRunner& runner) {
    req.validate();
    std::set<std::string> wanted;
    if (req.sources.empty()) {
        for (auto& id : registry.ids()) wanted.insert(id);
    } else {
        for (const auto& s : req.sources) {
            auto id = text::trim(s);
            if (id.empty()) continue;
            if (!registry.contains(id)) throw UnknownSourceError(id);
            wanted.insert(id);
        }
    }

    ResultSet rs;
    rs.query = req.raw_query;
    rs.depth = req.depth;
    rs.gamma = req.gamma;
    rs.expanded = expand_query(ontology, seed_terms_from_query(req.raw_query), req.depth, req.gamma);
    auto terms = query_words(req.raw_query);

    SourceRunner run = runner;
    if (!run) run = [&env](const Adapter& a, const std::vector<std::string>& t) { return run_adapter(a, t, env); };

    std::vector<std::string> ids(wanted.begin(), wanted.end());
    std::vector<std::future<FetchOutcome>> pending;
    pending.reserve(ids.size());
    for (const auto& id : ids) {
        const Adapter& adapter = registry.get(id);
        pending.push_back(std::async(std::launch::async, [&run, &adapter, &terms] { return run(adapter, terms); }));
    }

    // Outcomes are consumed in source-id order, so completion order cannot
    // leak into the result.
    std::vector<ScoredRecord> scored;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto& stats = rs.per_source[ids[i]];
        FetchOutcome outcome;
        try {
            outcome = pending[i].get();
        } catch (const std::exception&) {
            stats.errors = 1;
            continue;
        }
        stats.fetched = outcome.records.size();
        stats.errors = outcome.errors.size();
        for (const auto& r : outcome.records) {
            auto s = score_record(r, rs.expanded);
            if (s.score > 0.0) scored.push_back(std::move(s));
        }
    }

    auto deduped = dedupe(scored);
    rs.dedup_removed = deduped.removed;
    rs.records = std::move(deduped.records);
    std::sort(rs.records.begin(), rs.records.end(), ranks_before);
    if (rs.records.size() > req.limit) rs.records.resize(req.limit);
    for (const auto& r : rs.records) ++rs.per_source[r.record.source_id].kept;
    return rs;
}

}  // namespace scholarlens
