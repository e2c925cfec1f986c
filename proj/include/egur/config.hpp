#pragma once

// Flat TOML-style configuration: `key = value` lines, `#` comments,
// optional double quotes around values. The CLI layers sources as
// flags > file > built-in defaults, with secrets (API keys) always read
// from the environment variable the file names, never stored inline.

#include <fstream>
#include <map>
#include <string>

#include "egur/common.hpp"

namespace egur {

struct KeyValueConfig {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) != 0; }

    std::string get_string(const std::string& key, const std::string& fallback = "") const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            std::size_t used = 0;
            std::int64_t v = std::stoll(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            throw RunError(ErrKind::config, "config key '" + key + "' is not an integer: '" +
                                                it->second + "'");
        }
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            std::size_t used = 0;
            double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            throw RunError(ErrKind::config,
                           "config key '" + key + "' is not a number: '" + it->second + "'");
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        if (it->second == "true") return true;
        if (it->second == "false") return false;
        throw RunError(ErrKind::config,
                       "config key '" + key + "' is not true/false: '" + it->second + "'");
    }
};

inline KeyValueConfig parse_config_text(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    std::size_t line_no = 0;
    for (const std::string& raw : split_lines(text)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw RunError(ErrKind::config, origin + ":" + std::to_string(line_no) +
                                                ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw RunError(ErrKind::config,
                           origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            std::string inner = value.substr(1, value.size() - 2);
            std::string unescaped;
            unescaped.reserve(inner.size());
            for (std::size_t i = 0; i < inner.size(); ++i) {
                if (inner[i] == '\\' && i + 1 < inner.size()) {
                    char c = inner[++i];
                    if (c == 'n') unescaped += '\n';
                    else if (c == 't') unescaped += '\t';
                    else unescaped += c;
                } else {
                    unescaped += inner[i];
                }
            }
            value = unescaped;
        } else {
            // Strip a trailing comment on unquoted values.
            std::size_t hash = value.find('#');
            if (hash != std::string::npos) value = trim(value.substr(0, hash));
        }
        if (cfg.values.count(key) != 0) {
            throw RunError(ErrKind::config, origin + ":" + std::to_string(line_no) +
                                                ": duplicate key '" + key + "'");
        }
        cfg.values[key] = value;
    }
    return cfg;
}

inline KeyValueConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RunError(ErrKind::config, "cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text, path);
}

}  // namespace egur
