#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rhd {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key = value text configuration. Lines starting with '#' and blank
/// lines are ignored; later assignments win (CLI overrides are appended).
class Config {
public:
    static Config from_file(const std::string& path)
    {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        Config c;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            c.parse_line(line, path + ":" + std::to_string(lineno));
        }
        return c;
    }

    void parse_line(std::string line, const std::string& where)
    {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r\n");
            if (b == std::string::npos) return std::string();
            const auto e = s.find_last_not_of(" \t\r\n");
            return s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) return;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": empty key");
        kv_[key] = val;
    }

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& dflt) const
    {
        const auto it = kv_.find(key);
        return it == kv_.end() ? dflt : it->second;
    }

    double get_double(const std::string& key, double dflt) const
    {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError("config key '" + key + "': not a number: '" +
                              it->second + "'");
        }
    }

    int get_int(const std::string& key, int dflt) const
    {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        try {
            std::size_t pos = 0;
            const int v = std::stoi(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError("config key '" + key + "': not an integer: '" +
                              it->second + "'");
        }
    }

    bool get_bool(const std::string& key, bool dflt) const
    {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return dflt;
        std::string v = it->second;
        std::transform(v.begin(), v.end(), v.begin(), ::tolower);
        if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
        if (v == "off" || v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("config key '" + key + "': not a boolean: '" + it->second +
                          "'");
    }

    const std::map<std::string, std::string>& items() const { return kv_; }

    /// FNV-1a hash of the canonical (sorted) key=value text.
    std::uint64_t hash() const
    {
        std::uint64_t h = 1469598103934665603ull;
        for (const auto& [k, v] : kv_) {
            for (const char c : k + "=" + v + "\n") {
                h ^= static_cast<unsigned char>(c);
                h *= 1099511628211ull;
            }
        }
        return h;
    }

private:
    std::map<std::string, std::string> kv_;
};

} // namespace rhd
