#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scholarlens::markup {

struct Attribute {
    std::string name;
    std::string value;  // entity-decoded
};

enum class NodeKind { element, text };

/// Element or text node of a parsed document. Byte offsets point into the
/// source the document was parsed from, so callers can recover the raw markup
/// of any element.
struct Node {
    NodeKind kind = NodeKind::element;
    std::string name;  // lowercased for HTML, verbatim for XML
    std::vector<Attribute> attributes;
    std::vector<Node> children;
    /// Text nodes only. Raw source for HTML; entity-decoded for XML.
    std::string text;

    std::size_t outer_begin = 0;
    std::size_t inner_begin = 0;
    std::size_t inner_end = 0;
    std::size_t outer_end = 0;
    /// Pre-order position among all elements of the document.
    std::size_t order = 0;

    bool is_element() const { return kind == NodeKind::element; }
    const std::string* attribute(std::string_view attr_name) const;
    /// Concatenated text of all descendant text nodes.
    std::string text_content() const;
    /// Element children only.
    std::vector<const Node*> elements() const;
};

class Document {
public:
    Document(std::string source, std::unique_ptr<Node> root);

    /// Synthetic container whose children are the top-level nodes.
    const Node& root() const { return *root_; }
    const std::string& source() const { return source_; }
    /// First top-level element (the XML document element).
    const Node* document_element() const;

    std::string_view inner_source(const Node& n) const;
    std::string_view outer_source(const Node& n) const;

private:
    std::string source_;
    std::unique_ptr<Node> root_;
};

/// Forgiving HTML parse: never fails. Handles void elements, raw-text
/// script/style, unquoted attributes, stray end tags and implied closes of
/// p/li/td/th/tr/option.
Document parse_html(std::string source);

/// Well-formed XML parse. Throws ParseError with line and column on any
/// violation. Supports CDATA, comments, processing instructions and internal
/// DTD subsets declaring simple general entities.
Document parse_xml(std::string source);

}  // namespace scholarlens::markup
