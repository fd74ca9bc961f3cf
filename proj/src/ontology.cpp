#include "scholarlens/ontology.hpp"

#include "scholarlens/error.hpp"
#include "scholarlens/text.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace scholarlens {

namespace {

struct Statement {
    enum Kind { declare, subclass } kind;
    std::string a;  // id (declare) or child (subclass)
    std::string b;  // label (declare) or parent (subclass)
    std::size_t line;
    std::size_t column;
};

std::vector<Statement> parse_statements(std::string_view document) {
    std::vector<Statement> out;
    std::size_t line_no = 0;
    for (const auto& raw_line : text::split(document, '\n')) {
        ++line_no;
        std::string_view line = raw_line;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos) continue;
        std::size_t col = first + 1;
        auto body = text::trim(line);
        auto sp = body.find_first_of(" \t");
        std::string keyword = body.substr(0, sp);
        std::string rest = sp == std::string::npos ? std::string() : text::trim(std::string_view(body).substr(sp));
        if (keyword == "class") {
            auto bar = rest.find('|');
            if (bar == std::string::npos) throw ParseError("expected 'class <id> | <label>'", line_no, col);
            auto id = text::trim(std::string_view(rest).substr(0, bar));
            auto label = text::collapse_ws(std::string_view(rest).substr(bar + 1));
            if (id.empty() || label.empty()) throw ParseError("class id and label must be non-empty", line_no, col);
            if (id != text::normalize(label))
                throw ParseError("class id '" + id + "' is not the normalized label '" + text::normalize(label) + "'",
                                 line_no, col);
            out.push_back({Statement::declare, id, label, line_no, col});
        } else if (keyword == "sub") {
            auto lt = rest.find('<');
            if (lt == std::string::npos) throw ParseError("expected 'sub <child-id> < <parent-id>'", line_no, col);
            auto child = text::normalize(std::string_view(rest).substr(0, lt));
            auto parent = text::normalize(std::string_view(rest).substr(lt + 1));
            if (child.empty() || parent.empty()) throw ParseError("sub needs both child and parent ids", line_no, col);
            out.push_back({Statement::subclass, child, parent, line_no, col});
        } else {
            throw ParseError("unknown statement '" + keyword + "'", line_no, col);
        }
    }
    return out;
}

// Applies one document's statements to `nodes`. Duplicate declarations inside
// one document are errors; across documents they must agree on the label.
void apply(const std::vector<Statement>& stmts, std::map<std::string, ClassNode>& nodes,
           std::set<std::string>& declared_elsewhere) {
    std::set<std::string> here;
    for (const auto& s : stmts) {
        if (s.kind != Statement::declare) continue;
        if (!here.insert(s.a).second) throw DuplicateIdError(s.a);
        auto it = nodes.find(s.a);
        if (it != nodes.end()) {
            if (it->second.label != s.b) throw DuplicateIdError(s.a);
            continue;
        }
        nodes.emplace(s.a, ClassNode{s.a, s.b, {}, {}});
    }
    for (const auto& s : stmts) {
        if (s.kind != Statement::subclass) continue;
        auto it = nodes.find(s.a);
        if (it == nodes.end())
            throw ParseError("sub references undeclared class '" + s.a + "'", s.line, s.column);
        it->second.parents.insert(s.b);
    }
    declared_elsewhere.insert(here.begin(), here.end());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open ontology file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

Ontology Ontology::build(std::string name, std::vector<ClassNode> nodes) {
    Ontology o;
    o.name_ = std::move(name);
    for (auto& n : nodes) {
        if (n.id.empty() || n.id != text::normalize(n.label))
            throw ParseError("class id '" + n.id + "' is not the normalized label", 0, 0);
        auto id = n.id;
        if (!o.nodes_.emplace(id, std::move(n)).second) throw DuplicateIdError(id);
    }
    for (const auto& [id, n] : o.nodes_) {
        o.children_[id];
        for (const auto& p : n.parents) {
            if (!o.nodes_.count(p)) throw DanglingParentError(p);
            if (p == id) throw CycleError(id);
        }
    }
    for (const auto& [id, n] : o.nodes_) {
        for (const auto& p : n.parents) o.children_[p].insert(id);
        if (n.parents.empty()) o.roots_.insert(id);
    }

    // Iterative three-colour DFS over child edges.
    enum Colour { white, grey, black };
    std::map<std::string, Colour> colour;
    for (const auto& [id, _] : o.nodes_) colour[id] = white;
    for (const auto& [start, _] : o.nodes_) {
        if (colour[start] != white) continue;
        std::vector<std::pair<std::string, std::set<std::string>::const_iterator>> stack;
        colour[start] = grey;
        stack.emplace_back(start, o.children_[start].cbegin());
        while (!stack.empty()) {
            auto& [id, it] = stack.back();
            if (it == o.children_[id].cend()) {
                colour[id] = black;
                stack.pop_back();
                continue;
            }
            const std::string& child = *it++;
            if (colour[child] == grey) throw CycleError(child);
            if (colour[child] == white) {
                colour[child] = grey;
                stack.emplace_back(child, o.children_[child].cbegin());
            }
        }
    }
    return o;
}

bool Ontology::contains(std::string_view id) const { return nodes_.count(text::normalize(id)) != 0; }

const ClassNode& Ontology::node(std::string_view id) const {
    auto key = text::normalize(id);
    auto it = nodes_.find(key);
    if (it == nodes_.end()) throw UnknownClassError(key);
    return it->second;
}

const std::set<std::string>& Ontology::children(std::string_view id) const {
    auto key = text::normalize(id);
    auto it = children_.find(key);
    if (it == children_.end()) throw UnknownClassError(key);
    return it->second;
}

bool Ontology::same_graph(const Ontology& other) const { return nodes_ == other.nodes_; }

Ontology load_ontology(std::string_view document, std::string name) {
    std::map<std::string, ClassNode> nodes;
    std::set<std::string> declared;
    apply(parse_statements(document), nodes, declared);
    std::vector<ClassNode> list;
    for (auto& [_, n] : nodes) list.push_back(std::move(n));
    return Ontology::build(std::move(name), std::move(list));
}

Ontology load_ontology_file(const std::filesystem::path& path) {
    return load_ontology(read_file(path), path.stem().string());
}

Ontology load_ontology_files(const std::vector<std::filesystem::path>& paths, std::string name) {
    std::map<std::string, ClassNode> nodes;
    std::set<std::string> declared;
    std::vector<std::vector<Statement>> docs;
    for (const auto& p : paths) {
        auto stmts = parse_statements(read_file(p));
        // Declarations first across all documents so `sub` may cross files.
        std::vector<Statement> decls, subs;
        for (auto& s : stmts) (s.kind == Statement::declare ? decls : subs).push_back(std::move(s));
        apply(decls, nodes, declared);
        docs.push_back(std::move(subs));
    }
    for (const auto& subs : docs) apply(subs, nodes, declared);
    std::vector<ClassNode> list;
    for (auto& [_, n] : nodes) list.push_back(std::move(n));
    return Ontology::build(std::move(name), std::move(list));
}

std::string to_native(const Ontology& o) {
    std::string out = "# " + o.name() + "\n";
    for (const auto& [id, n] : o.nodes()) out += "class " + id + " | " + n.label + "\n";
    for (const auto& [id, n] : o.nodes())
        for (const auto& p : n.parents) out += "sub " + id + " < " + p + "\n";
    return out;
}

std::set<std::string> children_of(const Ontology& o, std::string_view id) { return o.children(id); }

std::map<std::string, std::size_t> descendants_of(const Ontology& o, std::string_view id,
                                                  std::optional<std::size_t> max_depth) {
    auto start = o.node(id).id;
    std::map<std::string, std::size_t> hops;
    std::deque<std::pair<std::string, std::size_t>> queue{{start, 0}};
    while (!queue.empty()) {
        auto [cur, d] = queue.front();
        queue.pop_front();
        if (max_depth && d >= *max_depth) continue;
        for (const auto& c : o.children(cur)) {
            if (c == start || hops.count(c)) continue;
            hops.emplace(c, d + 1);
            queue.emplace_back(c, d + 1);
        }
    }
    return hops;
}

std::map<std::string, std::size_t> ancestors_of(const Ontology& o, std::string_view id) {
    auto start = o.node(id).id;
    std::map<std::string, std::size_t> hops;
    std::deque<std::pair<std::string, std::size_t>> queue{{start, 0}};
    while (!queue.empty()) {
        auto [cur, d] = queue.front();
        queue.pop_front();
        for (const auto& p : o.node(cur).parents) {
            if (p == start || hops.count(p)) continue;
            hops.emplace(p, d + 1);
            queue.emplace_back(p, d + 1);
        }
    }
    return hops;
}

ExpandedQuery expand_query(const Ontology& o, const std::vector<std::string>& seeds, std::size_t depth,
                           double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidRequestError("gamma must lie in (0, 1]");
    ExpandedQuery q;
    q.depth = depth;
    q.gamma = gamma;
    for (const auto& s : seeds) {
        auto term = text::normalize(s);
        if (term.empty()) continue;
        if (q.weighted_terms.emplace(term, 1.0).second) q.seed_terms.push_back(term);
    }
    if (q.seed_terms.empty()) throw EmptyQueryError();
    if (depth == 0) return q;
    for (const auto& seed : q.seed_terms) {
        if (!o.contains(seed)) continue;
        for (const auto& [term, hop] : descendants_of(o, seed, depth)) {
            double w = std::pow(gamma, static_cast<double>(hop));
            auto [it, inserted] = q.weighted_terms.emplace(term, w);
            if (!inserted && w > it->second) it->second = w;
        }
    }
    return q;
}

}  // namespace scholarlens
