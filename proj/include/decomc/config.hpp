// config.hpp - plain-text scenario configuration (schema v1).
//
// Sectioned key = value text, '#' comments, whitespace-separated numeric
// lists.  Diff-able and hand-editable; the effective text (file plus
// command-line overrides) is hashed into the output provenance header.

#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "decomc/errors.hpp"

namespace decomc {

class ConfigText {
  public:
    using Section = std::map<std::string, std::string>;

    static ConfigText parse(const std::string& text) {
        ConfigText cfg;
        cfg.raw_ = text;
        std::istringstream in(text);
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": unterminated section header");
                section = trim(line.substr(1, line.size() - 2));
                cfg.sections_[section];
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected key = value");
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": key outside any [section]");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) +
                                               ": empty key");
            cfg.sections_[section][key] = value;
        }
        return cfg;
    }

    static ConfigText load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream body;
        body << in.rdbuf();
        return parse(body.str());
    }

    // "section.key=value" command-line override.
    void apply_override(const std::string& spec) {
        const auto eq = spec.find('=');
        const auto dot = spec.find('.');
        if (eq == std::string::npos || dot == std::string::npos || dot > eq)
            throw ConfigError("override must look like section.key=value: " + spec);
        const std::string section = trim(spec.substr(0, dot));
        const std::string key = trim(spec.substr(dot + 1, eq - dot - 1));
        const std::string value = trim(spec.substr(eq + 1));
        if (section.empty() || key.empty())
            throw ConfigError("override must look like section.key=value: " + spec);
        sections_[section][key] = value;
        overrides_ += spec + "\n";
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key) const {
        const auto s = sections_.find(section);
        if (s == sections_.end() || !s->second.count(key))
            throw ConfigError("missing config key [" + section + "] " + key);
        return s->second.at(key);
    }

    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const {
        return has(section, key) ? get(section, key) : fallback;
    }

    double get_double(const std::string& section, const std::string& key) const {
        return to_double(get(section, key), section, key);
    }

    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const {
        return has(section, key) ? get_double(section, key) : fallback;
    }

    long long get_int(const std::string& section, const std::string& key) const {
        const std::string v = get(section, key);
        try {
            std::size_t pos = 0;
            const long long r = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw ConfigError("config [" + section + "] " + key + ": not an integer: " + v);
        }
    }

    long long get_int_or(const std::string& section, const std::string& key,
                         long long fallback) const {
        return has(section, key) ? get_int(section, key) : fallback;
    }

    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const {
        if (!has(section, key)) return fallback;
        const std::string v = get(section, key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError("config [" + section + "] " + key + ": not a boolean: " + v);
    }

    std::vector<double> get_list(const std::string& section, const std::string& key) const {
        std::istringstream in(get(section, key));
        std::vector<double> out;
        std::string tok;
        while (in >> tok) out.push_back(to_double(tok, section, key));
        if (out.empty()) throw ConfigError("config [" + section + "] " + key + ": empty list");
        return out;
    }

    // FNV-1a 64 over the file text plus any overrides: the provenance hash.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (const std::string* s : {&raw_, &overrides_}) {
            for (unsigned char c : *s) {
                h ^= c;
                h *= 1099511628211ull;
            }
        }
        return h;
    }

  private:
    static std::string trim(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    static double to_double(const std::string& v, const std::string& section,
                            const std::string& key) {
        if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
        try {
            std::size_t pos = 0;
            const double r = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw ConfigError("config [" + section + "] " + key + ": not a number: " + v);
        }
    }

    std::map<std::string, Section> sections_;
    std::string raw_;
    std::string overrides_;
};

} // namespace decomc
