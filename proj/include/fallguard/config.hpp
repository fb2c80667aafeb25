#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "fallguard/errors.hpp"

namespace fallguard {

// Flat key-value document with dotted keys, one `key=value` per line,
// `#` comments. Typed getters record which keys were consumed so loaders can
// reject unknown keys afterwards.
class Config {
public:
    Config() = default;
    static Config parse_file(const std::filesystem::path& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint32_t get_uint32(const std::string& key, std::uint32_t fallback) const;

    void set(const std::string& key, const std::string& value);

    // Throws ConfigError naming the first key that no getter asked for.
    void require_all_consumed() const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    std::string origin_ = "<empty>";
    mutable std::set<std::string> consumed_;
};

}  // namespace fallguard
