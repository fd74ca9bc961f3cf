#include "scholarlens/json_path.hpp"

#include "scholarlens/error.hpp"
#include "scholarlens/text.hpp"

#include <cctype>

namespace scholarlens {

JsonPath JsonPath::compile(std::string_view expression) {
    JsonPath p;
    p.expression_ = text::trim(expression);
    std::string_view s = p.expression_;
    auto fail = [&](const std::string& why) {
        throw RuleCompileError("bad JSON path '" + p.expression_ + "': " + why);
    };
    if (s.empty() || s[0] != '$') fail("must start with '$'");
    std::size_t i = 1;
    while (i < s.size()) {
        if (s[i] == '.') {
            ++i;
            if (i < s.size() && s[i] == '*') {
                p.steps_.emplace_back(Wildcard{});
                ++i;
                continue;
            }
            std::size_t b = i;
            while (i < s.size() && s[i] != '.' && s[i] != '[') ++i;
            if (b == i) fail("empty member name");
            p.steps_.emplace_back(std::string(s.substr(b, i - b)));
        } else if (s[i] == '[') {
            auto close = s.find(']', i);
            if (close == std::string_view::npos) fail("unterminated '['");
            auto inner = text::trim(s.substr(i + 1, close - i - 1));
            if (inner == "*") {
                p.steps_.emplace_back(Wildcard{});
            } else if (inner.size() >= 2 && (inner.front() == '\'' || inner.front() == '"') &&
                       inner.back() == inner.front()) {
                p.steps_.emplace_back(inner.substr(1, inner.size() - 2));
            } else {
                if (inner.empty()) fail("empty index");
                for (char c : inner)
                    if (std::isdigit(static_cast<unsigned char>(c)) == 0) fail("index must be a non-negative integer");
                p.steps_.emplace_back(static_cast<std::size_t>(std::stoull(inner)));
            }
            i = close + 1;
        } else {
            fail("unexpected '" + std::string(1, s[i]) + "'");
        }
    }
    return p;
}

std::vector<const nlohmann::json*> JsonPath::evaluate(const nlohmann::json& root) const {
    std::vector<const nlohmann::json*> cur{&root};
    for (const auto& step : steps_) {
        std::vector<const nlohmann::json*> next;
        for (const auto* node : cur) {
            if (const auto* name = std::get_if<std::string>(&step)) {
                if (node->is_object()) {
                    auto it = node->find(*name);
                    if (it != node->end()) next.push_back(&*it);
                }
            } else if (const auto* idx = std::get_if<std::size_t>(&step)) {
                if (node->is_array() && *idx < node->size()) next.push_back(&(*node)[*idx]);
            } else if (node->is_array() || node->is_object()) {
                for (const auto& child : *node) next.push_back(&child);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

std::string json_scalar_text(const nlohmann::json& value) {
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_integer() || value.is_number_unsigned()) return value.dump();
    if (value.is_number_float()) {
        double d = value.get<double>();
        return text::format_decimal(d);
    }
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    return {};
}

}  // namespace scholarlens
