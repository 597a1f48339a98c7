#include "veclap/config.hpp"

#include <cctype>
#include <climits>
#include <fstream>
#include <sstream>

#include "veclap/common.hpp"

namespace veclap {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream stream(value);
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ValidationError("empty element in list value '" + value + "'");
        parts.push_back(item);
    }
    return parts;
}

long parse_long(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long parsed = 0;
    try {
        parsed = std::stol(value, &used);
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': '" + value +
                              "' is not an integer");
    }
    if (used != value.size())
        throw ValidationError("config key '" + key + "': '" + value +
                              "' is not an integer");
    return parsed;
}

double parse_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double parsed = 0;
    try {
        parsed = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': '" + value +
                              "' is not a number");
    }
    if (used != value.size())
        throw ValidationError("config key '" + key + "': '" + value +
                              "' is not a number");
    return parsed;
}

} // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return from_text(text.str());
}

Config Config::from_text(const std::string& text) {
    Config config;
    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": empty key");
        if (value.empty())
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": empty value for key '" + key + "'");
        if (!config.values_.emplace(key, value).second)
            throw ValidationError("config key '" + key + "' appears twice");
        config.entries_.emplace_back(key, value);
    }
    return config;
}

bool Config::has(const std::string& key) const {
    return values_.count(key) != 0;
}

const std::string& Config::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw ValidationError("missing config key '" + key + "'");
    return it->second;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string_or(const std::string& key,
                                  const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

int Config::get_int(const std::string& key) const {
    const long parsed = parse_long(key, raw(key));
    if (parsed < INT_MIN || parsed > INT_MAX)
        throw ValidationError("config key '" + key + "' out of int range");
    return static_cast<int>(parsed);
}

int Config::get_int_or(const std::string& key, int fallback) const {
    return has(key) ? get_int(key) : fallback;
}

long Config::get_long_or(const std::string& key, long fallback) const {
    return has(key) ? parse_long(key, raw(key)) : fallback;
}

double Config::get_double(const std::string& key) const {
    return parse_double(key, raw(key));
}

double Config::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? parse_double(key, raw(key)) : fallback;
}

bool Config::get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& value = raw(key);
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ValidationError("config key '" + key + "': '" + value +
                          "' is not a boolean");
}

std::vector<int> Config::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (const std::string& part : split_list(raw(key)))
        out.push_back(static_cast<int>(parse_long(key, part)));
    return out;
}

std::vector<long> Config::get_long_list(const std::string& key) const {
    std::vector<long> out;
    for (const std::string& part : split_list(raw(key)))
        out.push_back(parse_long(key, part));
    return out;
}

void Config::require_known(const std::vector<std::string>& allowed) const {
    std::string offenders;
    for (const auto& [key, value] : entries_) {
        bool known = false;
        for (const std::string& candidate : allowed)
            if (key == candidate) {
                known = true;
                break;
            }
        if (!known) {
            if (!offenders.empty()) offenders += ", ";
            offenders += key;
        }
    }
    if (!offenders.empty())
        throw ValidationError("unknown config keys: " + offenders);
}

} // namespace veclap
