#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace oss {

/// Flat key/value configuration with dotted keys.
///
/// Grammar, one item per line:
///
///     # comment            (also after a value: `key = 1  # note`)
///     [section]            prefixes following keys with "section."
///     key = value          key: [A-Za-z0-9_.-]+, value: rest of line, trimmed
///
/// Duplicate keys are rejected. Lists are comma separated. Booleans accept
/// true/false/on/off/yes/no/1/0.
class ConfigFile {
public:
    static ConfigFile parse(std::string_view text, const std::string& origin = "<config>");
    static ConfigFile load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return entries_.contains(key); }
    void set(const std::string& key, const std::string& value) { entries_[key] = value; }
    void erase(const std::string& key) { entries_.erase(key); }

    std::optional<std::string> raw(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<std::string> get_list(const std::string& key) const;

    /// Keys that no getter has read yet.
    std::vector<std::string> unused_keys() const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> used_;
};

double parse_double(const std::string& key, std::string_view text);
std::int64_t parse_int(const std::string& key, std::string_view text);
bool parse_bool(const std::string& key, std::string_view text);
std::vector<std::string> split_list(std::string_view text, char sep = ',');
std::string trim(std::string_view s);

}  // namespace oss
