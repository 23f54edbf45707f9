#include "oss/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "oss/errors.hpp"

namespace oss {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find(sep, start);
        std::string item = trim(text.substr(start, end == std::string_view::npos ? end : end - start));
        if (!item.empty()) {
            out.push_back(std::move(item));
        }
        if (end == std::string_view::npos) {
            break;
        }
        start = end + 1;
    }
    return out;
}

double parse_double(const std::string& key, std::string_view text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key, "expected a number, got '" + t + "'");
    }
    return v;
}

std::int64_t parse_int(const std::string& key, std::string_view text) {
    const std::string t = trim(text);
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key, "expected an integer, got '" + t + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, std::string_view text) {
    std::string t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "on" || t == "yes" || t == "1") {
        return true;
    }
    if (t == "false" || t == "off" || t == "no" || t == "0") {
        return false;
    }
    throw ConfigError(key, "expected a boolean, got '" + t + "'");
}

ConfigFile ConfigFile::parse(std::string_view text, const std::string& origin) {
    ConfigFile cfg;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    auto where = [&] { return origin + ":" + std::to_string(lineno); };

    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        if (body.front() == '[') {
            if (body.back() != ']') {
                throw ConfigError(where(), "unterminated section header");
            }
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(where(), "expected 'key = value'");
        }
        std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.empty() || !std::all_of(key.begin(), key.end(), [](unsigned char c) {
                return std::isalnum(c) || c == '_' || c == '.' || c == '-';
            })) {
            throw ConfigError(where(), "invalid key '" + key + "'");
        }
        if (!section.empty()) {
            key = section + "." + key;
        }
        if (cfg.entries_.contains(key)) {
            throw ConfigError(where(), "duplicate key '" + key + "'");
        }
        cfg.entries_[key] = trim(std::string_view(body).substr(eq + 1));
    }
    return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), "cannot open config file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

std::optional<std::string> ConfigFile::raw(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) {
        return std::nullopt;
    }
    used_.insert(key);
    return it->second;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    return raw(key).value_or(fallback);
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    const auto v = raw(key);
    return v ? parse_double(key, *v) : fallback;
}

std::int64_t ConfigFile::get_int(const std::string& key, std::int64_t fallback) const {
    const auto v = raw(key);
    return v ? parse_int(key, *v) : fallback;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    const auto v = raw(key);
    return v ? parse_bool(key, *v) : fallback;
}

std::vector<std::string> ConfigFile::get_list(const std::string& key) const {
    const auto v = raw(key);
    return v ? split_list(*v) : std::vector<std::string>{};
}

std::vector<std::string> ConfigFile::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_) {
        if (!used_.contains(k)) {
            out.push_back(k);
        }
    }
    return out;
}

}  // namespace oss
