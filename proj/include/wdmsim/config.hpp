#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wdmsim {

/// Flat `section.key = value` settings. Lines starting with `#` are
/// comments. Only documented keys are accepted.
class Config {
public:
    Config() = default;

    /// Throws std::invalid_argument naming the line on malformed input or
    /// an unknown key.
    static Config parse(std::istream& is);
    static Config load(const std::string& path);

    /// Sets (or overrides) one key; accepts `key=value` too via set_assignment.
    void set(const std::string& key, const std::string& value);
    void set_assignment(const std::string& assignment);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
    std::vector<std::uint64_t> get_uints(const std::string& key, std::vector<std::uint64_t> fallback) const;
    std::vector<std::string> get_strings(const std::string& key, std::vector<std::string> fallback) const;

    static const std::vector<std::string>& known_keys();

private:
    std::map<std::string, std::string> values_;
};

/// Parses `1,2,5` or an inclusive range `1..10`.
std::vector<std::uint64_t> parse_uint_list(const std::string& text);

}  // namespace wdmsim
