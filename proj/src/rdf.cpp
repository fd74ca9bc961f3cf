#include "scholarlens/rdf.hpp"

#include "scholarlens/error.hpp"
#include "scholarlens/markup.hpp"
#include "scholarlens/text.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <map>

namespace scholarlens {

namespace {

constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
constexpr std::string_view kXml = "http://www.w3.org/XML/1998/namespace";

using Namespaces = std::map<std::string, std::string>;

struct QName {
    std::string ns;
    std::string local;
    bool is(std::string_view n, std::string_view l) const { return ns == n && local == l; }
};

QName resolve(const std::string& qname, const Namespaces& scope, bool is_attribute) {
    auto colon = qname.find(':');
    if (colon == std::string::npos) {
        if (is_attribute) return {"", qname};
        auto it = scope.find("");
        return {it == scope.end() ? "" : it->second, qname};
    }
    auto prefix = qname.substr(0, colon);
    if (prefix == "xml") return {std::string(kXml), qname.substr(colon + 1)};
    auto it = scope.find(prefix);
    if (it == scope.end()) throw ParseError("undeclared namespace prefix '" + prefix + "'", 0, 0);
    return {it->second, qname.substr(colon + 1)};
}

Namespaces extend(const Namespaces& parent, const markup::Node& el) {
    Namespaces scope = parent;
    for (const auto& a : el.attributes) {
        if (a.name == "xmlns") scope[""] = a.value;
        else if (text::starts_with(a.name, "xmlns:")) scope[a.name.substr(6)] = a.value;
    }
    return scope;
}

const std::string* find_attr(const markup::Node& el, const Namespaces& scope, std::string_view ns,
                             std::string_view local) {
    for (const auto& a : el.attributes) {
        if (a.name == "xmlns" || text::starts_with(a.name, "xmlns:")) continue;
        auto q = resolve(a.name, scope, true);
        if (q.is(ns, local)) return &a.value;
        // Unqualified rdf attributes are tolerated in the wild.
        if (q.ns.empty() && ns == kRdf && q.local == local) return &a.value;
    }
    return nullptr;
}

std::string local_name(const std::string& iri) {
    auto cut = iri.find_last_of("#/:");
    return text::percent_decode(cut == std::string::npos ? iri : iri.substr(cut + 1));
}

std::string humanize(const std::string& name) {
    std::string out;
    for (std::size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (c == '_') {
            out.push_back(' ');
            continue;
        }
        bool upper = std::isupper(static_cast<unsigned char>(c)) != 0;
        if (upper && i > 0) {
            char prev = name[i - 1];
            bool prev_lower = std::islower(static_cast<unsigned char>(prev)) != 0 ||
                              std::isdigit(static_cast<unsigned char>(prev)) != 0;
            bool next_lower = i + 1 < name.size() && std::islower(static_cast<unsigned char>(name[i + 1])) != 0;
            bool prev_upper = std::isupper(static_cast<unsigned char>(prev)) != 0;
            if (prev_lower || (prev_upper && next_lower)) out.push_back(' ');
        }
        out.push_back(c);
    }
    return text::collapse_ws(out);
}

struct ClassInfo {
    std::string label;  // empty = derive from IRI
    std::set<std::string> parent_iris;
    std::size_t first_seen = 0;
};

class Importer {
public:
    explicit Importer(std::string_view document) : doc_(markup::parse_xml(std::string(document))) {}

    RdfImport run() {
        const auto* root = doc_.document_element();
        Namespaces scope = extend({}, *root);
        if (!resolve(root->name, scope, false).is(kRdf, "RDF"))
            throw ParseError("root element must be rdf:RDF", 1, 1);
        base_ = attr_or(*root, scope, kXml, "base");
        for (const auto* child : root->elements()) node_element(*child, scope);

        std::vector<ClassNode> nodes;
        std::map<std::string, std::string> id_of_iri;
        std::vector<std::pair<std::size_t, std::string>> ordered;
        for (const auto& [iri, info] : classes_) ordered.emplace_back(info.first_seen, iri);
        std::sort(ordered.begin(), ordered.end());
        std::map<std::string, std::size_t> index_of_id;
        for (const auto& [_, iri] : ordered) {
            const auto& info = classes_[iri];
            auto label = info.label.empty() ? humanize(local_name(iri)) : text::collapse_ws(info.label);
            auto id = text::normalize(label);
            if (id.empty()) throw ParseError("class '" + iri + "' has an empty label", 0, 0);
            if (index_of_id.count(id)) throw DuplicateIdError(id);
            index_of_id[id] = nodes.size();
            id_of_iri[iri] = id;
            nodes.push_back(ClassNode{id, label, {}, {}});
        }
        for (const auto& [iri, info] : classes_)
            for (const auto& p : info.parent_iris) nodes[index_of_id[id_of_iri[iri]]].parents.insert(id_of_iri[p]);
        RdfImport out;
        out.ontology = Ontology::build(name_.empty() ? "rdf" : name_, std::move(nodes));
        out.warnings = std::move(warnings_);
        return out;
    }

private:
    std::string attr_or(const markup::Node& el, const Namespaces& scope, std::string_view ns, std::string_view local) {
        const auto* v = find_attr(el, scope, ns, local);
        return v ? *v : std::string();
    }

    std::string absolute(const std::string& ref) const {
        if (ref.empty()) return base_;
        if (ref[0] == '#') return base_ + ref;
        return ref;
    }

    ClassInfo& declare(const std::string& iri) {
        auto [it, inserted] = classes_.try_emplace(iri);
        if (inserted) it->second.first_seen = seen_++;
        return it->second;
    }

    void warn(const std::string& what) { warnings_.push_back("ignored " + what); }

    std::string subject_iri(const markup::Node& el, const Namespaces& scope) {
        if (const auto* about = find_attr(el, scope, kRdf, "about")) return absolute(*about);
        if (const auto* id = find_attr(el, scope, kRdf, "ID")) return base_ + "#" + *id;
        if (const auto* node_id = find_attr(el, scope, kRdf, "nodeID")) return "_:" + *node_id;
        return "_:b" + std::to_string(blank_++);
    }

    // Returns the subject IRI when the element declares (or describes) a class.
    std::optional<std::string> node_element(const markup::Node& el, const Namespaces& parent_scope) {
        Namespaces scope = extend(parent_scope, el);
        auto q = resolve(el.name, scope, false);
        if (q.is(kOwl, "Ontology")) {
            for (const auto* prop : el.elements()) {
                Namespaces ps = extend(scope, *prop);
                if (resolve(prop->name, ps, false).is(kRdfs, "label")) name_ = text::trim(prop->text_content());
                else warn("ontology header property <" + prop->name + ">");
            }
            return std::nullopt;
        }
        bool is_class = q.is(kOwl, "Class") || q.is(kRdfs, "Class");
        bool is_description = q.is(kRdf, "Description");
        if (!is_class && !is_description) {
            warn("node element <" + el.name + ">");
            return std::nullopt;
        }
        auto iri = subject_iri(el, scope);

        // rdf:Description needs an rdf:type of owl:Class / rdfs:Class to count.
        bool typed_class = is_class;
        for (const auto* prop : el.elements()) {
            Namespaces ps = extend(scope, *prop);
            if (!resolve(prop->name, ps, false).is(kRdf, "type")) continue;
            auto type = absolute(attr_or(*prop, ps, kRdf, "resource"));
            if (type == std::string(kOwl) + "Class" || type == std::string(kRdfs) + "Class") typed_class = true;
        }
        if (!typed_class) {
            bool any_subclass = false;
            for (const auto* prop : el.elements()) {
                Namespaces ps = extend(scope, *prop);
                if (resolve(prop->name, ps, false).is(kRdfs, "subClassOf")) any_subclass = true;
            }
            if (!any_subclass) {
                warn("description of <" + iri + "> without class typing");
                return std::nullopt;
            }
        }
        auto& info = declare(iri);
        for (const auto* prop : el.elements()) {
            Namespaces ps = extend(scope, *prop);
            auto pq = resolve(prop->name, ps, false);
            if (pq.is(kRdfs, "label")) {
                if (info.label.empty()) info.label = text::trim(prop->text_content());
            } else if (pq.is(kRdf, "type")) {
                auto type = absolute(attr_or(*prop, ps, kRdf, "resource"));
                if (type != std::string(kOwl) + "Class" && type != std::string(kRdfs) + "Class")
                    warn("rdf:type " + type);
            } else if (pq.is(kRdfs, "subClassOf")) {
                std::string parent;
                if (const auto* res = find_attr(*prop, ps, kRdf, "resource")) {
                    parent = absolute(*res);
                } else {
                    auto nested = prop->elements();
                    if (nested.size() == 1) {
                        if (auto p = node_element(*nested.front(), ps)) parent = *p;
                    }
                }
                if (parent.empty()) {
                    warn("subClassOf of <" + iri + "> with no named class object");
                    continue;
                }
                declare(parent);
                classes_[iri].parent_iris.insert(parent);
            } else {
                warn("property <" + prop->name + "> of <" + iri + ">");
            }
        }
        return iri;
    }

    markup::Document doc_;
    std::string base_;
    std::string name_;
    std::map<std::string, ClassInfo> classes_;
    std::vector<std::string> warnings_;
    std::size_t seen_ = 0;
    std::size_t blank_ = 0;
};

std::string fragment_for(const std::string& id) {
    std::string out;
    for (char c : id) out += (c == ' ') ? std::string("_") : text::percent_encode(std::string(1, c));
    return out;
}

}  // namespace

RdfImport parse_rdf_subclass_subset(std::string_view document) { return Importer(document).run(); }

std::string export_rdf_subclass_subset(const Ontology& o, std::string_view base_iri) {
    std::string base(base_iri);
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<rdf:RDF xmlns:rdf=\"" + std::string(kRdf) + "\"\n";
    out += "         xmlns:rdfs=\"" + std::string(kRdfs) + "\"\n";
    out += "         xmlns:owl=\"" + std::string(kOwl) + "\"\n";
    out += "         xml:base=\"" + text::xml_escape(base) + "\">\n";
    out += "  <owl:Ontology rdf:about=\"\">\n";
    out += "    <rdfs:label>" + text::xml_escape(o.name()) + "</rdfs:label>\n";
    out += "  </owl:Ontology>\n";
    for (const auto& [id, n] : o.nodes()) {
        out += "  <owl:Class rdf:about=\"#" + text::xml_escape(fragment_for(id)) + "\">\n";
        out += "    <rdfs:label>" + text::xml_escape(n.label) + "</rdfs:label>\n";
        for (const auto& p : n.parents)
            out += "    <rdfs:subClassOf rdf:resource=\"#" + text::xml_escape(fragment_for(p)) + "\"/>\n";
        out += "  </owl:Class>\n";
    }
    out += "</rdf:RDF>\n";
    return out;
}

}  // namespace scholarlens
