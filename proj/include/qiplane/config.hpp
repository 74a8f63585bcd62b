#pragma once

#include <map>
#include <string>
#include <vector>

namespace qip {

/// Plain-text key/value configuration with nested sections:
///
///   # comment
///   key = value          (top-level section "")
///   [section]
///   key = value
///
/// Values are strings; list values are comma-separated.
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    long long get_int(const std::string& section, const std::string& key) const;
    long long get_int_or(const std::string& section, const std::string& key,
                         long long fallback) const;
    std::vector<std::string> get_list(const std::string& section,
                                      const std::string& key) const;
    std::vector<double> get_double_list(const std::string& section,
                                        const std::string& key) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace qip
