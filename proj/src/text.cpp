#include "scholarlens/text.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace scholarlens::text {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

const std::unordered_map<std::string_view, unsigned long>& named_entities() {
    static const std::unordered_map<std::string_view, unsigned long> table = {
        {"amp", '&'},      {"lt", '<'},        {"gt", '>'},       {"quot", '"'},     {"apos", '\''},
        {"nbsp", 0xA0},    {"ndash", 0x2013},  {"mdash", 0x2014}, {"lsquo", 0x2018}, {"rsquo", 0x2019},
        {"ldquo", 0x201C}, {"rdquo", 0x201D},  {"hellip", 0x2026}, {"copy", 0xA9},   {"reg", 0xAE},
        {"trade", 0x2122}, {"eacute", 0xE9},   {"aacute", 0xE1},  {"iacute", 0xED},  {"oacute", 0xF3},
        {"uacute", 0xFA},  {"uuml", 0xFC},     {"ouml", 0xF6},    {"auml", 0xE4},    {"szlig", 0xDF},
        {"ccedil", 0xE7},  {"ntilde", 0xF1},   {"scaron", 0x161}, {"middot", 0xB7},  {"deg", 0xB0},
        {"times", 0xD7},   {"plusmn", 0xB1},   {"micro", 0xB5},   {"laquo", 0xAB},   {"raquo", 0xBB},
    };
    return table;
}

bool is_block_tag(std::string_view name) {
    static constexpr std::array<std::string_view, 22> blocks = {
        "p",  "div", "br", "li",  "ul",    "ol", "tr", "td", "th",      "table",   "h1",
        "h2", "h3",  "h4", "h5",  "h6",    "dd", "dt", "dl", "section", "article", "blockquote"};
    for (auto b : blocks)
        if (b == name) return true;
    return false;
}

}  // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = lower(c);
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

std::string collapse_ws(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending = false;
    for (char c : s) {
        if (is_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out.push_back(' ');
        pending = false;
        out.push_back(c);
    }
    return out;
}

std::string normalize(std::string_view s) { return to_lower(collapse_ws(s)); }

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (is_word_byte(static_cast<unsigned char>(c))) {
            cur.push_back(lower(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::size_t count_phrase(const std::vector<std::string>& phrase, const std::vector<std::string>& text) {
    if (phrase.empty() || phrase.size() > text.size()) return 0;
    std::size_t n = 0;
    std::size_t i = 0;
    while (i + phrase.size() <= text.size()) {
        bool hit = true;
        for (std::size_t k = 0; k < phrase.size(); ++k) {
            if (text[i + k] != phrase[k]) {
                hit = false;
                break;
            }
        }
        if (hit) {
            ++n;
            i += phrase.size();
        } else {
            ++i;
        }
    }
    return n;
}

std::size_t count_phrase(std::string_view phrase, std::string_view text) {
    return count_phrase(words(phrase), words(text));
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        auto semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(s[i++]);
            continue;
        }
        auto name = s.substr(i + 1, semi - i - 1);
        bool ok = false;
        unsigned long cp = 0;
        if (!name.empty() && name[0] == '#') {
            bool hex = name.size() > 1 && (name[1] == 'x' || name[1] == 'X');
            auto digits = name.substr(hex ? 2 : 1);
            ok = !digits.empty();
            for (char c : digits) {
                int v;
                if (c >= '0' && c <= '9') v = c - '0';
                else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
                else { ok = false; break; }
                cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(v);
                if (cp > 0x10FFFF) { ok = false; break; }
            }
        } else {
            auto it = named_entities().find(name);
            if (it != named_entities().end()) {
                ok = true;
                cp = it->second;
            }
        }
        if (!ok) {
            out.push_back(s[i++]);
            continue;
        }
        append_utf8(out, cp);
        i = semi + 1;
    }
    return out;
}

std::string strip_markup(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '<') {
            out.push_back(s[i++]);
            continue;
        }
        if (s.substr(i, 4) == "<!--") {
            auto end = s.find("-->", i + 4);
            i = end == std::string_view::npos ? s.size() : end + 3;
            continue;
        }
        auto close = s.find('>', i + 1);
        if (close == std::string_view::npos) {
            out.append(s.substr(i));
            break;
        }
        auto inner = s.substr(i + 1, close - i - 1);
        bool closing = !inner.empty() && inner[0] == '/';
        if (closing) inner.remove_prefix(1);
        std::size_t n = 0;
        while (n < inner.size() && (std::isalnum(static_cast<unsigned char>(inner[n])) != 0)) ++n;
        if (n == 0 && !closing && (inner.empty() || (inner[0] != '!' && inner[0] != '?'))) {
            // A bare '<' that does not start a tag.
            out.push_back(s[i++]);
            continue;
        }
        std::string name = to_lower(inner.substr(0, n));
        i = close + 1;
        if (!closing && (name == "script" || name == "style")) {
            auto end = to_lower(s.substr(i)).find("</" + name);
            if (end == std::string::npos) break;
            auto gt = s.find('>', i + end);
            i = gt == std::string_view::npos ? s.size() : gt + 1;
            continue;
        }
        if (is_block_tag(name)) out.push_back(' ');
    }
    return out;
}

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size() + 8);
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string percent_encode(std::string_view s) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) != 0 || c == '-' || c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0xF]);
        }
    }
    return out;
}

std::string percent_decode(std::string_view s) {
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size()) {
            int hi = nibble(s[i + 1]), lo = nibble(s[i + 2]);
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>(hi * 16 + lo));
                i += 2;
                continue;
            }
        }
        out.push_back(s[i]);
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out.append(sep);
        out.append(parts[i]);
    }
    return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

std::string utf8_truncate(std::string_view s, std::size_t width, std::string_view marker) {
    if (utf8_length(s) <= width) return std::string(s);
    std::size_t marker_len = utf8_length(marker);
    if (width <= marker_len) {
        // Not even room for the marker; keep a prefix of it.
        std::string out;
        std::size_t taken = 0;
        for (std::size_t i = 0; i < marker.size() && taken < width; ++i) {
            out.push_back(marker[i]);
            if (i + 1 == marker.size() || (static_cast<unsigned char>(marker[i + 1]) & 0xC0) != 0x80) ++taken;
        }
        return out;
    }
    std::size_t keep = width - marker_len;
    std::size_t cps = 0;
    std::size_t i = 0;
    for (; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
            if (cps == keep) break;
            ++cps;
        }
    }
    std::string out(s.substr(0, i));
    out.append(marker);
    return out;
}

std::string format_decimal(double value) {
    if (!std::isfinite(value)) return "0.0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    std::string out(buf);
    if (out == "-0.000000") out = "0.000000";
    auto dot = out.find('.');
    auto last = out.find_last_not_of('0');
    if (last == dot) last = dot + 1;
    out.erase(last + 1);
    return out;
}

}  // namespace scholarlens::text
