#pragma once

#include <map>
#include <string>
#include <vector>

namespace veclap {

/// Flat key=value experiment configuration. One `key = value` pair per
/// line; `#` starts a comment; blank lines are ignored. Keys may not
/// repeat. Values are single tokens or comma-separated lists. Consumers
/// declare the keys they understand through require_known, so a typo in
/// a config file fails instead of being silently ignored.
class Config {
public:
    static Config from_file(const std::string& path);
    static Config from_text(const std::string& text);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key,
                              const std::string& fallback) const;
    int get_int(const std::string& key) const;
    int get_int_or(const std::string& key, int fallback) const;
    long get_long_or(const std::string& key, long fallback) const;
    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& key) const;
    std::vector<long> get_long_list(const std::string& key) const;

    /// Throws ValidationError naming every key not in `allowed`.
    void require_known(const std::vector<std::string>& allowed) const;

    /// Insertion-ordered view of all pairs (for echoing a run's setup).
    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

private:
    const std::string& raw(const std::string& key) const;

    std::map<std::string, std::string> values_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

} // namespace veclap
