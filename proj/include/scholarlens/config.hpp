#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scholarlens {

/// Sectioned key/value document:
///
///     # comment
///     [section]
///     key = value
///
/// Keys before the first header belong to the unnamed section "". Keys are
/// case-sensitive; values are trimmed. A repeated key within one section is a
/// ConfigError.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::string_view document, const std::string& origin = "<memory>");
    static KeyValueConfig load(const std::filesystem::path& path);

    std::optional<std::string> get(const std::string& section, const std::string& key) const;
    std::string require(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key, std::string fallback) const;
    long long get_int(const std::string& section, const std::string& key, long long fallback) const;

    bool has_section(const std::string& section) const;
    /// Section names in document order.
    const std::vector<std::string>& sections() const { return order_; }
    const std::map<std::string, std::string>& entries(const std::string& section) const;

    void set(const std::string& section, const std::string& key, std::string value);

    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::vector<std::string> order_;
    std::map<std::string, std::map<std::string, std::string>> values_;
};

}  // namespace scholarlens
