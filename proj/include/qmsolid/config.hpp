#pragma once

/// \file config.hpp
/// Flat "section.key = value" configuration files. Every entry remembers its
/// line so that validation errors raised deep inside the solvers can be
/// reported against the file.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"

namespace qmsolid {

struct ConfigEntry
{
    std::string section;
    std::string key;
    std::string value;
    int line = 0;

    std::string qualified() const { return section + "." + key; }
};

class ConfigFile
{
public:
    ConfigFile() = default;

    /// Parses `text`; `origin` is used as the file name in messages.
    static ConfigFile parse(std::string_view text, std::string origin = "<config>")
    {
        ConfigFile cfg;
        cfg.origin_ = std::move(origin);
        std::size_t pos = 0;
        int line_no = 0;
        while (pos <= text.size()) {
            const std::size_t eol = std::min(text.find('\n', pos), text.size());
            std::string line(text.substr(pos, eol - pos));
            pos = eol + 1;
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty()) {
                if (eol == text.size())
                    break;
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                cfg.fail(line_no, "expected 'section.key = value'");
            const std::string lhs = trim(line.substr(0, eq));
            const std::string rhs = trim(line.substr(eq + 1));
            const auto dot = lhs.find('.');
            if (dot == std::string::npos || dot == 0 || dot + 1 == lhs.size())
                cfg.fail(line_no, "key '" + lhs + "' must have the form section.key");
            ConfigEntry e{lhs.substr(0, dot), lhs.substr(dot + 1), rhs, line_no};
            if (const ConfigEntry* prev = cfg.find(e.section, e.key))
                cfg.fail(line_no, "duplicate key '" + lhs + "' (first set on line " + std::to_string(prev->line) + ")");
            cfg.entries_.push_back(std::move(e));
            if (eol == text.size())
                break;
        }
        return cfg;
    }

    static ConfigFile load(const std::string& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open configuration file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path);
    }

    const std::string& origin() const noexcept { return origin_; }
    const std::vector<ConfigEntry>& entries() const noexcept { return entries_; }

    const ConfigEntry* find(std::string_view section, std::string_view key) const
    {
        for (const auto& e : entries_)
            if (e.section == section && e.key == key)
                return &e;
        return nullptr;
    }

    bool has_section(std::string_view section) const
    {
        return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.section == section; });
    }

    /// All keys of one section as a raw map.
    RawConfig section(std::string_view section) const
    {
        RawConfig out;
        for (const auto& e : entries_)
            if (e.section == section)
                out[e.key] = e.value;
        return out;
    }

    /// Replaces the value of an existing key; returns false if it is absent.
    bool set(std::string_view section, std::string_view key, std::string value)
    {
        for (auto& e : entries_)
            if (e.section == section && e.key == key) {
                e.value = std::move(value);
                return true;
            }
        return false;
    }

    /// Sets or appends a key (appended keys carry line 0).
    void assign(std::string section, std::string key, std::string value)
    {
        if (!set(section, key, value))
            entries_.push_back({std::move(section), std::move(key), std::move(value), 0});
    }

    /// Message prefixed with "file:line:" for the entry that matches `key`
    /// (a bare key or "section.key"), preferring `preferred_section`.
    std::string anchor(const std::string& message, std::string_view key, std::string_view preferred_section = {}) const
    {
        const ConfigEntry* hit = nullptr;
        if (!key.empty()) {
            for (const auto& e : entries_) {
                const bool match = e.key == key || e.qualified() == key;
                if (!match)
                    continue;
                if (!hit || (e.section == preferred_section && hit->section != preferred_section))
                    hit = &e;
            }
        }
        if (!hit)
            return origin_ + ": " + message;
        const std::string named =
            message.find(hit->key) == std::string::npos ? hit->qualified() + ": " + message : message;
        if (hit->line > 0)
            return origin_ + ":" + std::to_string(hit->line) + ": " + named;
        return origin_ + ": " + named;
    }

    static std::string trim(std::string_view s)
    {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
            ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
            --e;
        return std::string(s.substr(b, e - b));
    }

private:
    [[noreturn]] void fail(int line, const std::string& msg) const
    {
        throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
    }

    std::string origin_;
    std::vector<ConfigEntry> entries_;
};

/// Splits a comma separated list, trimming each item. Empty input gives an
/// empty list.
inline std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    if (ConfigFile::trim(s).empty())
        return out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = s.find(',', pos);
        out.push_back(ConfigFile::trim(s.substr(pos, comma == std::string_view::npos ? s.npos : comma - pos)));
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return out;
}

} // namespace qmsolid
