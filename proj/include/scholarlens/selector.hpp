#pragma once

#include "scholarlens/markup.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace scholarlens {

/// Compiled CSS selector over markup::Node trees. Supported grammar:
///
///     selector-list := selector (',' selector)*
///     selector      := compound ((' ' | '>') compound)*
///     compound      := (tag | '*')? ('.' class | '#' id | attr | pseudo)*
///     attr          := '[' name (('=' | '~=' | '^=' | '$=' | '*=') value)? ']'
///     pseudo        := ':first-child' | ':last-child'
///
/// Matching is scoped: every element of a chain must lie strictly inside the
/// context element passed to select(). Tag and attribute names are compared
/// case-insensitively for HTML trees (the parser lowercases them).
class CssSelector {
public:
    /// Throws RuleCompileError on syntax errors.
    static CssSelector compile(std::string_view expression);

    /// Matches below `context`, in document order, without duplicates.
    std::vector<const markup::Node*> select(const markup::Node& context) const;

    const std::string& expression() const { return expression_; }

    struct AttrTest {
        std::string name;
        char op = 0;  // 0 presence, '=', '~', '^', '$', '*'
        std::string value;
    };
    struct Compound {
        std::string tag;  // empty = any
        std::vector<std::string> classes;
        std::string id;
        std::vector<AttrTest> attrs;
        bool first_child = false;
        bool last_child = false;
    };
    struct Step {
        bool child = false;  // '>' relation to the previous step
        Compound compound;
    };
    using Chain = std::vector<Step>;

private:
    std::string expression_;
    std::vector<Chain> chains_;
};

}  // namespace scholarlens
