#include "mortml/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "mortml/errors.hpp"

namespace mortml {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string strip_comment(const std::string& line) {
    const auto pos = line.find_first_of("#;");
    return pos == std::string::npos ? line : line.substr(0, pos);
}

}  // namespace

IniFile IniFile::parse_string(const std::string& text, const std::string& origin) {
    IniFile ini;
    ini.origin_ = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(line_no);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            ini.sections_[section];  // an empty section is fine
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        if (section.empty()) throw ConfigError(where + ": key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": empty key");
        auto& sec = ini.sections_[section];
        if (sec.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        sec[key] = trim(line.substr(eq + 1));
    }
    return ini;
}

IniFile IniFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path.string());
}

bool IniFile::has_section(const std::string& section) const { return sections_.count(section) > 0; }

bool IniFile::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string IniFile::get_string(const std::string& section, const std::string& key,
                                const std::string& fallback) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return fallback;
    const auto kv = it->second.find(key);
    return kv == it->second.end() ? fallback : kv->second;
}

bool IniFile::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    std::string v = get_string(section, key, "");
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(origin_ + ": [" + section + "] " + key + ": '" + v + "' is not a boolean");
}

std::int64_t IniFile::get_int(const std::string& section, const std::string& key,
                              std::int64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(origin_ + ": [" + section + "] " + key + ": '" + v + "' is not an integer");
    return out;
}

double IniFile::get_double(const std::string& section, const std::string& key,
                           double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(origin_ + ": [" + section + "] " + key + ": '" + v + "' is not a number");
    return out;
}

std::vector<std::string> IniFile::get_list(const std::string& section, const std::string& key,
                                           const std::vector<std::string>& fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key, "");
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::string> IniFile::section_names() const {
    std::vector<std::string> out;
    out.reserve(sections_.size());
    for (const auto& [name, _] : sections_) out.push_back(name);
    return out;
}

std::vector<std::string> IniFile::keys(const std::string& section) const {
    std::vector<std::string> out;
    const auto it = sections_.find(section);
    if (it == sections_.end()) return out;
    out.reserve(it->second.size());
    for (const auto& [key, _] : it->second) out.push_back(key);
    return out;
}

}  // namespace mortml
