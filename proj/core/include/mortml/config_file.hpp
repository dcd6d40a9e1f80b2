#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mortml {

/// Minimal INI-style config reader: [section] headers, key = value pairs,
/// '#' or ';' comments, blank lines ignored. Names are case-sensitive.
/// Parse errors carry the origin and line number.
class IniFile {
public:
    static IniFile parse_file(const std::filesystem::path& path);
    static IniFile parse_string(const std::string& text, const std::string& origin = "<string>");

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;

    /// Comma-separated list; empty value yields an empty vector.
    std::vector<std::string> get_list(const std::string& section, const std::string& key,
                                      const std::vector<std::string>& fallback) const;

    std::vector<std::string> section_names() const;
    std::vector<std::string> keys(const std::string& section) const;

private:
    // section -> key -> raw value
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::string origin_;
};

}  // namespace mortml
