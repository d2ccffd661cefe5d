#pragma once

#include <map>
#include <optional>
#include <string>

namespace chronoclock {

/// Sectioned key/value config file:
///   # comment
///   [section]
///   key = value
class Config {
public:
    static Config parse_file(const std::string& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key,
                      double fallback) const;
    long get_int(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }

private:
    std::optional<std::string> lookup(const std::string& section,
                                      const std::string& key) const;
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string origin_;
};

} // namespace chronoclock
