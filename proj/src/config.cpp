#include "scholarlens/config.hpp"

#include "scholarlens/error.hpp"
#include "scholarlens/text.hpp"

#include <fstream>
#include <sstream>

namespace scholarlens {

KeyValueConfig KeyValueConfig::parse(std::string_view document, const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::string section;
    std::size_t line_no = 0;
    for (const auto& raw : text::split(document, '\n')) {
        ++line_no;
        auto line = text::trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section header");
            section = text::trim(std::string_view(line).substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty section name");
            if (!cfg.has_section(section)) {
                cfg.order_.push_back(section);
                cfg.values_[section];
            }
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        auto key = text::trim(std::string_view(line).substr(0, eq));
        auto value = text::trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        if (!cfg.has_section(section)) {
            cfg.order_.push_back(section);
            cfg.values_[section];
        }
        auto [it, inserted] = cfg.values_[section].emplace(key, value);
        if (!inserted)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& section, const std::string& key) const {
    auto s = values_.find(section);
    if (s == values_.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

std::string KeyValueConfig::require(const std::string& section, const std::string& key) const {
    auto v = get(section, key);
    if (!v || v->empty())
        throw ConfigError(origin_ + ": missing required key '" + key + "' in [" + section + "]");
    return *v;
}

std::string KeyValueConfig::get_or(const std::string& section, const std::string& key, std::string fallback) const {
    auto v = get(section, key);
    return v ? *v : std::move(fallback);
}

long long KeyValueConfig::get_int(const std::string& section, const std::string& key, long long fallback) const {
    auto v = get(section, key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        long long n = std::stoll(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing characters");
        return n;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "' in [" + section + "] is not an integer: " + *v);
    }
}

bool KeyValueConfig::has_section(const std::string& section) const { return values_.count(section) != 0; }

const std::map<std::string, std::string>& KeyValueConfig::entries(const std::string& section) const {
    static const std::map<std::string, std::string> empty;
    auto s = values_.find(section);
    return s == values_.end() ? empty : s->second;
}

void KeyValueConfig::set(const std::string& section, const std::string& key, std::string value) {
    if (!has_section(section)) order_.push_back(section);
    values_[section][key] = std::move(value);
}

}  // namespace scholarlens
