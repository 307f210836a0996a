// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "standardize/bundled_data.hpp"
#include "standardize/error.hpp"
#include "standardize/text_metrics.hpp"
#include "standardize/util.hpp"

namespace standardize {

using LevelId = std::string;

/// Descriptor key that applies to every level of a standard.
inline constexpr std::string_view kWildcardLevel = "*";

struct Exemplar {
    std::string title;
    std::string author;

    std::string citation() const { return author.empty() ? title : title + " by " + author; }

    friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

struct Aspect {
    std::string id;
    std::string name;
    std::map<LevelId, std::string> descriptors;
    std::vector<FlagId> flags;

    friend bool operator==(const Aspect&, const Aspect&) = default;
};

struct GradeRange {
    int low = 0;
    int high = 0;

    bool contains(int grade) const { return grade >= low && grade <= high; }
    friend bool operator==(const GradeRange&, const GradeRange&) = default;
};

struct Standard {
    std::string id;
    std::string name;
    std::string version;
    /// Ordered lowest to highest complexity.
    std::vector<LevelId> levels;
    std::vector<Aspect> aspects;
    std::map<LevelId, std::vector<Exemplar>> exemplars;

    // Matching data for prompt extraction.
    std::vector<std::string> aliases;
    std::map<LevelId, std::vector<std::string>> level_aliases;
    std::map<LevelId, GradeRange> level_grades;

    bool has_level(std::string_view level) const {
        return std::find(levels.begin(), levels.end(), level) != levels.end();
    }

    std::size_t level_index(std::string_view level) const {
        auto it = std::find(levels.begin(), levels.end(), level);
        if (it == levels.end()) {
            throw Error(ErrorCode::unknown_level,
                        "level '" + std::string(level) + "' is not defined by standard '" + id + "'", levels);
        }
        return static_cast<std::size_t>(it - levels.begin());
    }

    /// Union of all aspect flags, in aspect order, first occurrence wins.
    std::vector<FlagId> flag_ids() const {
        std::vector<FlagId> out;
        for (const auto& a : aspects) {
            for (const auto& f : a.flags) {
                if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
            }
        }
        return out;
    }

    friend bool operator==(const Standard&, const Standard&) = default;
};

struct AspectDescriptor {
    std::string aspect_id;
    std::string aspect_name;
    std::string text;
    std::vector<FlagId> flags;
};

/// Everything a standard says about one level.
struct LevelSpec {
    LevelId level;
    std::vector<AspectDescriptor> descriptors;
    std::vector<Exemplar> exemplars;
    std::vector<FlagId> flags;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline const ojson& require(const ojson& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        throw Error(ErrorCode::schema, where + ": missing field '" + key + "'");
    }
    return j.at(key);
}

inline std::string require_string(const ojson& j, const char* key, const std::string& where) {
    const auto& v = require(j, key, where);
    if (!v.is_string() || v.get<std::string>().empty()) {
        throw Error(ErrorCode::schema, where + ": field '" + key + "' must be a non-empty string");
    }
    return v.get<std::string>();
}

inline std::vector<std::string> string_array(const ojson& v, const std::string& where) {
    if (!v.is_array()) throw Error(ErrorCode::schema, where + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& x : v) {
        if (!x.is_string()) throw Error(ErrorCode::schema, where + " must be an array of strings");
        out.push_back(x.get<std::string>());
    }
    return out;
}

}  // namespace detail

/// Checks every invariant; throws schema / unknown_flag errors naming the
/// offending field.
inline void validate(const Standard& s) {
    if (s.id.empty()) throw Error(ErrorCode::schema, "standard: field 'id' is empty");
    if (s.levels.empty()) throw Error(ErrorCode::schema, s.id + ": field 'levels' is empty");
    for (std::size_t i = 0; i < s.levels.size(); ++i) {
        if (s.levels[i].empty() || s.levels[i] == kWildcardLevel) {
            throw Error(ErrorCode::schema, s.id + ": levels[" + std::to_string(i) + "] is not a valid level id");
        }
        for (std::size_t k = 0; k < i; ++k) {
            if (s.levels[k] == s.levels[i]) {
                throw Error(ErrorCode::schema, s.id + ": levels contains duplicate '" + s.levels[i] + "'");
            }
        }
    }
    for (const auto& a : s.aspects) {
        std::string where = s.id + ": aspects[" + a.id + "]";
        if (a.id.empty() || a.name.empty()) throw Error(ErrorCode::schema, where + ": id and name are required");
        if (a.descriptors.empty()) throw Error(ErrorCode::schema, where + ".descriptors is empty");
        for (const auto& [level, text] : a.descriptors) {
            if (level != kWildcardLevel && !s.has_level(level)) {
                throw Error(ErrorCode::schema, where + ".descriptors references unknown level '" + level + "'");
            }
            if (text.empty()) throw Error(ErrorCode::schema, where + ".descriptors['" + level + "'] is empty");
        }
        if (a.flags.empty()) throw Error(ErrorCode::schema, where + ".flags must bind at least one flag");
        for (const auto& f : a.flags) {
            if (!is_supported_flag(f)) {
                throw Error(ErrorCode::unknown_flag, where + ".flags: unknown flag '" + f + "'", supported_flags());
            }
        }
    }
    for (const auto& [level, list] : s.exemplars) {
        if (level != kWildcardLevel && !s.has_level(level)) {
            throw Error(ErrorCode::schema, s.id + ": exemplars references unknown level '" + level + "'");
        }
        for (const auto& e : list) {
            if (e.title.empty()) throw Error(ErrorCode::schema, s.id + ": exemplars['" + level + "'] has an empty title");
        }
    }
    for (const auto& [level, _] : s.level_aliases) {
        if (!s.has_level(level)) {
            throw Error(ErrorCode::schema, s.id + ": level_aliases references unknown level '" + level + "'");
        }
    }
    for (const auto& [level, range] : s.level_grades) {
        if (!s.has_level(level)) {
            throw Error(ErrorCode::schema, s.id + ": level_grades references unknown level '" + level + "'");
        }
        if (range.low > range.high) throw Error(ErrorCode::schema, s.id + ": level_grades['" + level + "'] is inverted");
    }
}

inline Standard parse_standard(const nlohmann::ordered_json& j) {
    using detail::require;
    using detail::require_string;
    if (!j.is_object()) throw Error(ErrorCode::schema, "standard definition must be a JSON object");
    Standard s;
    s.id = require_string(j, "id", "standard");
    const std::string where = s.id;
    s.name = require_string(j, "name", where);
    if (j.contains("version")) s.version = j.at("version").get<std::string>();
    s.levels = detail::string_array(require(j, "levels", where), where + ".levels");

    const auto& aspects = require(j, "aspects", where);
    if (!aspects.is_array()) throw Error(ErrorCode::schema, where + ".aspects must be an array");
    for (const auto& aj : aspects) {
        Aspect a;
        a.id = require_string(aj, "id", where + ".aspects[]");
        std::string awhere = where + ".aspects[" + a.id + "]";
        a.name = require_string(aj, "name", awhere);
        const auto& desc = require(aj, "descriptors", awhere);
        if (!desc.is_object()) throw Error(ErrorCode::schema, awhere + ".descriptors must be an object");
        for (const auto& [level, text] : desc.items()) {
            if (!text.is_string()) throw Error(ErrorCode::schema, awhere + ".descriptors['" + level + "'] must be a string");
            a.descriptors[level] = text.get<std::string>();
        }
        a.flags = detail::string_array(require(aj, "flags", awhere), awhere + ".flags");
        s.aspects.push_back(std::move(a));
    }

    const auto& exemplars = require(j, "exemplars", where);
    if (!exemplars.is_object()) throw Error(ErrorCode::schema, where + ".exemplars must be an object");
    for (const auto& [level, list] : exemplars.items()) {
        if (!list.is_array()) throw Error(ErrorCode::schema, where + ".exemplars['" + level + "'] must be an array");
        auto& out = s.exemplars[level];
        for (const auto& ej : list) {
            Exemplar e;
            e.title = require_string(ej, "title", where + ".exemplars['" + level + "']");
            if (ej.contains("author")) e.author = ej.at("author").get<std::string>();
            out.push_back(std::move(e));
        }
    }

    if (j.contains("aliases")) s.aliases = detail::string_array(j.at("aliases"), where + ".aliases");
    if (j.contains("level_aliases")) {
        for (const auto& [level, list] : j.at("level_aliases").items()) {
            s.level_aliases[level] = detail::string_array(list, where + ".level_aliases['" + level + "']");
        }
    }
    if (j.contains("level_grades")) {
        for (const auto& [level, range] : j.at("level_grades").items()) {
            if (!range.is_array() || range.size() != 2 || !range[0].is_number_integer() || !range[1].is_number_integer()) {
                throw Error(ErrorCode::schema, where + ".level_grades['" + level + "'] must be [low, high]");
            }
            s.level_grades[level] = GradeRange{range[0].get<int>(), range[1].get<int>()};
        }
    }
    validate(s);
    return s;
}

inline Standard parse_standard(std::string_view text, const std::string& source = "standard") {
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse, source + ": " + e.what());
    }
    try {
        return parse_standard(j);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::schema, source + ": " + e.what());
    }
}

inline Standard load_standard(const std::filesystem::path& path) {
    return parse_standard(util::read_file(path), path.string());
}

inline nlohmann::ordered_json to_json(const Standard& s) {
    nlohmann::ordered_json j;
    j["id"] = s.id;
    j["name"] = s.name;
    if (!s.version.empty()) j["version"] = s.version;
    if (!s.aliases.empty()) j["aliases"] = s.aliases;
    j["levels"] = s.levels;
    if (!s.level_aliases.empty()) {
        nlohmann::ordered_json la = nlohmann::ordered_json::object();
        for (const auto& level : s.levels) {
            if (auto it = s.level_aliases.find(level); it != s.level_aliases.end()) la[level] = it->second;
        }
        j["level_aliases"] = la;
    }
    if (!s.level_grades.empty()) {
        nlohmann::ordered_json lg = nlohmann::ordered_json::object();
        for (const auto& level : s.levels) {
            if (auto it = s.level_grades.find(level); it != s.level_grades.end()) {
                lg[level] = {it->second.low, it->second.high};
            }
        }
        j["level_grades"] = lg;
    }
    nlohmann::ordered_json aspects = nlohmann::ordered_json::array();
    for (const auto& a : s.aspects) {
        nlohmann::ordered_json desc = nlohmann::ordered_json::object();
        if (auto it = a.descriptors.find(std::string(kWildcardLevel)); it != a.descriptors.end()) desc[it->first] = it->second;
        for (const auto& level : s.levels) {
            if (auto it = a.descriptors.find(level); it != a.descriptors.end()) desc[level] = it->second;
        }
        aspects.push_back({{"id", a.id}, {"name", a.name}, {"descriptors", desc}, {"flags", a.flags}});
    }
    j["aspects"] = aspects;
    nlohmann::ordered_json ex = nlohmann::ordered_json::object();
    auto put = [&](const std::string& level) {
        auto it = s.exemplars.find(level);
        if (it == s.exemplars.end()) return;
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        for (const auto& e : it->second) list.push_back({{"title", e.title}, {"author", e.author}});
        ex[level] = list;
    };
    put(std::string(kWildcardLevel));
    for (const auto& level : s.levels) put(level);
    j["exemplars"] = ex;
    return j;
}

inline std::string serialize(const Standard& s) { return to_json(s).dump(2) + "\n"; }

/// Descriptors, exemplars and bound flags of one level. Wildcard descriptors
/// resolve to the same text for every level; a level-specific descriptor
/// takes precedence over the wildcard.
inline LevelSpec lookup(const Standard& s, std::string_view level) {
    s.level_index(level);
    LevelSpec out;
    out.level = std::string(level);
    for (const auto& a : s.aspects) {
        auto it = a.descriptors.find(std::string(level));
        if (it == a.descriptors.end()) it = a.descriptors.find(std::string(kWildcardLevel));
        if (it == a.descriptors.end()) continue;
        out.descriptors.push_back({a.id, a.name, it->second, a.flags});
    }
    if (auto it = s.exemplars.find(std::string(level)); it != s.exemplars.end()) out.exemplars = it->second;
    else if (auto w = s.exemplars.find(std::string(kWildcardLevel)); w != s.exemplars.end()) out.exemplars = w->second;
    out.flags = s.flag_ids();
    return out;
}

inline std::size_t level_distance(const Standard& s, std::string_view a, std::string_view b) {
    auto ia = s.level_index(a);
    auto ib = s.level_index(b);
    return ia > ib ? ia - ib : ib - ia;
}

/// Loaded standards keyed by id; immutable once built.
class Registry {
public:
    Registry() = default;

    void add(Standard s) {
        auto id = s.id;
        if (find(id)) throw Error(ErrorCode::schema, "standard '" + id + "' registered twice");
        standards_.push_back(std::move(s));
    }

    const Standard* find(std::string_view id) const {
        for (const auto& s : standards_) {
            if (s.id == id) return &s;
        }
        return nullptr;
    }

    const Standard& get(std::string_view id) const {
        if (const auto* s = find(id)) return *s;
        std::vector<std::string> ids;
        for (const auto& s : standards_) ids.push_back(s.id);
        throw Error(ErrorCode::unknown_standard, "unknown standard '" + std::string(id) + "'", ids);
    }

    const std::vector<Standard>& standards() const { return standards_; }
    bool empty() const { return standards_.empty(); }

    /// CEFR and CCS as shipped with the library.
    static Registry bundled() {
        Registry r;
        r.add(parse_standard(bundled::cefr_json, "bundled:cefr.json"));
        r.add(parse_standard(bundled::ccs_json, "bundled:ccs.json"));
        return r;
    }

private:
    std::vector<Standard> standards_;
};

}  // namespace standardize
