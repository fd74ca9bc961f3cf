#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace scholarlens {

/// Minimal JSONPath: `$` followed by `.name`, `['name']`, `[index]`, `[*]`
/// or `.*` steps. Evaluation never throws; missing keys yield no results.
class JsonPath {
public:
    /// Throws RuleCompileError.
    static JsonPath compile(std::string_view expression);

    std::vector<const nlohmann::json*> evaluate(const nlohmann::json& root) const;

    const std::string& expression() const { return expression_; }

private:
    struct Wildcard {};
    using Step = std::variant<std::string, std::size_t, Wildcard>;

    std::string expression_;
    std::vector<Step> steps_;
};

/// Scalar rendering used for extracted field values: strings verbatim,
/// integers without decimals, booleans as true/false. Null, objects and
/// arrays produce an empty string.
std::string json_scalar_text(const nlohmann::json& value);

}  // namespace scholarlens
