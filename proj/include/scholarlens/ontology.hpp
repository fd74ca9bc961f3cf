#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace scholarlens {

/// One class of a subclass hierarchy. `id` is always `text::normalize(label)`.
struct ClassNode {
    std::string id;
    std::string label;
    std::set<std::string> parents;
    /// Free-form tags ("data property", "object property", ...). Never
    /// interpreted.
    std::map<std::string, std::string> annotations;

    bool operator==(const ClassNode&) const = default;
};

/// Validated, immutable class hierarchy: acyclic, closed under parent
/// references, with a children index that is the exact inverse of `parents`.
/// Safe for concurrent reads.
class Ontology {
public:
    Ontology() = default;

    /// Validates and indexes. Throws DuplicateIdError, DanglingParentError or
    /// CycleError. Throws ParseError when an id is not the normalized label.
    static Ontology build(std::string name, std::vector<ClassNode> nodes);

    const std::string& name() const { return name_; }
    const std::set<std::string>& root_ids() const { return roots_; }
    const std::map<std::string, ClassNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    bool contains(std::string_view id) const;
    /// Throws UnknownClassError.
    const ClassNode& node(std::string_view id) const;
    /// Direct subclasses. Throws UnknownClassError.
    const std::set<std::string>& children(std::string_view id) const;

    /// Same ids, labels, parent edges and annotations. The name is ignored.
    bool same_graph(const Ontology& other) const;

private:
    std::string name_;
    std::map<std::string, ClassNode> nodes_;
    std::map<std::string, std::set<std::string>> children_;
    std::set<std::string> roots_;
};

/// Weighted seed-plus-descendant term set.
struct ExpandedQuery {
    std::vector<std::string> seed_terms;
    std::map<std::string, double> weighted_terms;
    std::size_t depth = 0;
    double gamma = 0.5;

    bool operator==(const ExpandedQuery&) const = default;
};

inline constexpr double kDefaultGamma = 0.5;
inline constexpr std::size_t kDefaultExpansionDepth = 2;

/// Parses the native line format:
///
///     # comment
///     class <id> | <display label>
///     sub <child-id> < <parent-id>
///
/// Throws ParseError (with line/column), DuplicateIdError,
/// DanglingParentError, CycleError.
Ontology load_ontology(std::string_view document, std::string name = "ontology");

Ontology load_ontology_file(const std::filesystem::path& path);

/// Loads several documents as one ontology. A class may be declared in more
/// than one document provided every declaration carries the same label; `sub`
/// lines may reference classes declared in any of the documents.
Ontology load_ontology_files(const std::vector<std::filesystem::path>& paths, std::string name);

/// Native-format rendering; load_ontology(to_native(o)) rebuilds the graph.
std::string to_native(const Ontology& o);

std::set<std::string> children_of(const Ontology& o, std::string_view id);

/// Breadth-first closure below `id`; values are minimum hop counts. `id`
/// itself is excluded. std::nullopt depth means unbounded.
std::map<std::string, std::size_t> descendants_of(const Ontology& o, std::string_view id,
                                                  std::optional<std::size_t> max_depth = std::nullopt);

/// Minimum-distance closure over parent edges; `id` excluded.
std::map<std::string, std::size_t> ancestors_of(const Ontology& o, std::string_view id);

/// Every normalized seed gets weight 1.0; seeds naming a class pull in its
/// descendants up to `depth` hops with weight gamma^hop. Where a term is
/// reachable more than once the maximum weight wins. Throws EmptyQueryError
/// when every seed normalizes to empty and InvalidRequestError for a gamma
/// outside (0, 1].
ExpandedQuery expand_query(const Ontology& o, const std::vector<std::string>& seeds,
                           std::size_t depth = kDefaultExpansionDepth, double gamma = kDefaultGamma);

}  // namespace scholarlens
