#pragma once

#include "scholarlens/ontology.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace scholarlens {

struct RdfImport {
    Ontology ontology;
    /// One entry per ignored statement (anything other than class
    /// declarations, labels, rdf:type and subClassOf).
    std::vector<std::string> warnings;
};

/// Imports the class-hierarchy fragment of an RDF/XML document.
///
/// Recognized: owl:Class / rdfs:Class node elements, rdf:Description with
/// rdf:type owl:Class or rdfs:Class, nested rdfs:label and rdfs:subClassOf
/// (rdf:resource or a nested class node), and an owl:Ontology header whose
/// rdfs:label names the ontology. A class without rdfs:label takes its label
/// from the IRI local name with CamelCase and underscores split into words.
/// Classes that are only referenced as a superclass are declared implicitly.
///
/// Throws ParseError for malformed XML or a non rdf:RDF root, plus the
/// Ontology::build validation errors.
RdfImport parse_rdf_subclass_subset(std::string_view document);

/// Writes every class as an owl:Class with rdfs:label and one
/// rdfs:subClassOf per parent. Re-importing yields the same graph.
std::string export_rdf_subclass_subset(const Ontology& o, std::string_view base_iri = "urn:scholarlens:ontology");

}  // namespace scholarlens
