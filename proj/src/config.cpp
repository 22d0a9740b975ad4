#include "wdmsim/config.hpp"

#include "wdmsim/format.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wdmsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    if (!parse_double(trim(text), v)) throw std::invalid_argument(key + ": not a number: '" + text + "'");
    return v;
}

std::uint64_t to_uint(const std::string& what, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw std::invalid_argument(what + ": not a non-negative integer: '" + text + "'");
    return v;
}

}  // namespace

const std::vector<std::string>& Config::known_keys() {
    static const std::vector<std::string> keys = {
        "topology.nodes",      "topology.prob",         "topology.wavelengths", "topology.file",
        "sweep.nodes",         "sweep.wavelengths",     "sweep.factors",        "sweep.traffic",
        "traffic.kind",        "traffic.load_erlang",   "traffic.load_mode",    "traffic.mean_holding_s",
        "traffic.horizon_s",   "sim.warmup_s",          "sim.seeds",            "conv.factor",
        "conv.strategy",       "conv.degree",           "conv.range",           "rwa.routing",
        "rwa.k",               "rwa.assignment",        "knee.threshold",       "output.dir",
    };
    return keys;
}

Config Config::parse(std::istream& is) {
    Config c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        try {
            c.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    return parse(in);
}

void Config::set(const std::string& key, const std::string& value) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw std::invalid_argument("unknown key '" + key + "'");
    values_[key] = value;
}

void Config::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + assignment + "'");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::optional<std::string> Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    return v ? to_double(key, *v) : fallback;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
    const auto v = get(key);
    return v ? to_uint(key, *v) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& key, std::vector<double> fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const auto& item : split_list(*v)) out.push_back(to_double(key, item));
    return out;
}

std::vector<std::uint64_t> Config::get_uints(const std::string& key, std::vector<std::uint64_t> fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    try {
        return parse_uint_list(*v);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(key + ": " + e.what());
    }
}

std::vector<std::string> Config::get_strings(const std::string& key, std::vector<std::string> fallback) const {
    const auto v = get(key);
    return v ? split_list(*v) : fallback;
}

std::vector<std::uint64_t> parse_uint_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    for (const auto& item : split_list(text)) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_uint("list", item));
            continue;
        }
        const auto lo = to_uint("range", item.substr(0, dots));
        const auto hi = to_uint("range", item.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument("empty range '" + item + "'");
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
    }
    return out;
}

}  // namespace wdmsim
