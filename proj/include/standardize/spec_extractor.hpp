// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

// Deterministic extraction of a target specification (standard, level,
// task, payload) from a natural-language prompt.

#pragma once

#include <algorithm>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "standardize/error.hpp"
#include "standardize/standards.hpp"
#include "standardize/util.hpp"

namespace standardize {

enum class TaskKind { context_assisted, theme_word };

inline std::string_view to_string(TaskKind k) {
    return k == TaskKind::context_assisted ? "context-assisted" : "theme-word";
}

inline TaskKind parse_task_kind(std::string_view s) {
    if (s == "context-assisted" || s == "context") return TaskKind::context_assisted;
    if (s == "theme-word" || s == "theme") return TaskKind::theme_word;
    throw Error(ErrorCode::invalid_argument, "unknown task kind '" + std::string(s) + "'",
                {"context-assisted", "theme-word"});
}

struct TargetSpec {
    std::string standard_id;
    LevelId level;
    TaskKind task = TaskKind::theme_word;
    /// Context passage or a single theme word.
    std::string payload;

    friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

inline TargetSpec make_spec(const Registry& registry, std::string_view standard_id, std::string_view level,
                            TaskKind task, std::string_view payload) {
    const Standard& s = registry.get(standard_id);
    s.level_index(level);
    auto p = util::trim(payload);
    if (p.empty()) throw Error(ErrorCode::empty_payload, "task payload is empty");
    if (task == TaskKind::theme_word &&
        std::any_of(p.begin(), p.end(), [](char c) { return util::is_space(c); })) {
        throw Error(ErrorCode::invalid_argument, "theme word must be a single token: '" + std::string(p) + "'");
    }
    return TargetSpec{s.id, std::string(level), task, std::string(p)};
}

/// Canonical prompt understood by `extract`.
inline std::string render_prompt(const TargetSpec& spec, const Registry& registry) {
    const Standard& s = registry.get(spec.standard_id);
    std::string out = "Write a story for " + spec.level + " readers on the " + s.name + " scale.\n";
    out += spec.task == TaskKind::context_assisted ? "CONTEXT: " : "THEME: ";
    out += spec.payload;
    return out;
}

namespace detail {

struct AliasMatch {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t standard = 0;
    std::optional<LevelId> level;
};

inline bool word_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           static_cast<unsigned char>(c) >= 0x80;
}

inline void find_alias(const std::string& haystack, const std::string& alias, std::size_t standard,
                       std::optional<LevelId> level, std::vector<AliasMatch>& out) {
    std::string needle = util::to_lower(util::trim(alias));
    if (needle.empty()) return;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        std::size_t end = pos + needle.size();
        bool left_ok = pos == 0 || !word_char(haystack[pos - 1]);
        bool right_ok = end >= haystack.size() || !word_char(haystack[end]);
        if (left_ok && right_ok) out.push_back({pos, end, standard, level});
        ++pos;
    }
}

/// "grade 6", "grades 9-12", "grade: 4 - 8", "grade4-8".
inline void find_grades(const std::string& haystack, const Registry& registry, std::vector<AliasMatch>& out) {
    static const std::regex re(R"(\bgrades?\s*:?\s*(\d{1,2})(?:\s*(?:-|to|through|\xE2\x80\x93)\s*(\d{1,2}))?\b)");
    for (auto it = std::sregex_iterator(haystack.begin(), haystack.end(), re); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        int lo = std::stoi(m[1].str());
        int hi = m[2].matched ? std::stoi(m[2].str()) : lo;
        auto begin = static_cast<std::size_t>(m.position(0));
        auto end = begin + static_cast<std::size_t>(m.length(0));
        const auto& standards = registry.standards();
        for (std::size_t si = 0; si < standards.size(); ++si) {
            for (const auto& [level, range] : standards[si].level_grades) {
                if (range.contains(lo) || range.contains(hi)) out.push_back({begin, end, si, level});
            }
        }
    }
}

}  // namespace detail

/// Parses the who (level) and what (standard) tags plus the task payload.
/// Ambiguity is reported as an error rather than resolved by guessing.
inline TargetSpec extract(std::string_view prompt, const Registry& registry) {
    if (registry.empty()) throw Error(ErrorCode::unknown_standard, "no standards are loaded");

    std::string text(prompt);
    std::size_t ctx = text.find("CONTEXT:");
    std::size_t theme = text.find("THEME:");
    std::size_t marker = std::min(ctx, theme);
    std::string header = text.substr(0, marker);

    std::optional<TaskKind> task;
    std::string payload;
    if (marker != std::string::npos) {
        if (marker == ctx) {
            task = TaskKind::context_assisted;
            payload = std::string(util::trim(std::string_view(text).substr(ctx + 8)));
        } else {
            task = TaskKind::theme_word;
            std::string rest(util::trim(std::string_view(text).substr(theme + 6)));
            static const std::regex word_re(R"([^\s"'.,;:!?]+(?:['\-][^\s"'.,;:!?]+)*)");
            std::smatch m;
            if (std::regex_search(rest, m, word_re)) payload = m.str();
        }
    } else {
        static const std::regex quoted_re(R"((?:"|\xE2\x80\x9C|')([^\s"']+)(?:"|\xE2\x80\x9D|'))");
        static const std::regex about_re(R"(\babout\s+([A-Za-z][A-Za-z'\-]*))", std::regex::icase);
        std::smatch m;
        if (std::regex_search(text, m, quoted_re)) {
            task = TaskKind::theme_word;
            payload = m[1].str();
        } else if (std::regex_search(text, m, about_re)) {
            task = TaskKind::theme_word;
            payload = m[1].str();
        }
    }

    std::string hay = util::to_lower(header);
    const auto& standards = registry.standards();
    std::vector<detail::AliasMatch> matches;
    for (std::size_t si = 0; si < standards.size(); ++si) {
        const Standard& s = standards[si];
        detail::find_alias(hay, s.id, si, std::nullopt, matches);
        detail::find_alias(hay, s.name, si, std::nullopt, matches);
        for (const auto& a : s.aliases) detail::find_alias(hay, a, si, std::nullopt, matches);
        for (const auto& level : s.levels) {
            detail::find_alias(hay, level, si, level, matches);
            if (auto it = s.level_aliases.find(level); it != s.level_aliases.end()) {
                for (const auto& a : it->second) detail::find_alias(hay, a, si, level, matches);
            }
        }
    }
    detail::find_grades(hay, registry, matches);

    // Longest match wins where matches overlap ("upper intermediate" over
    // "intermediate"); equal spans for different targets are all kept.
    std::stable_sort(matches.begin(), matches.end(), [](const auto& a, const auto& b) {
        auto la = a.end - a.begin, lb = b.end - b.begin;
        if (la != lb) return la > lb;
        return a.begin < b.begin;
    });
    std::vector<detail::AliasMatch> kept;
    for (const auto& m : matches) {
        bool blocked = std::any_of(kept.begin(), kept.end(), [&](const auto& k) {
            bool overlap = m.begin < k.end && k.begin < m.end;
            bool same_span = m.begin == k.begin && m.end == k.end;
            return overlap && !same_span;
        });
        if (!blocked) kept.push_back(m);
    }

    std::set<std::size_t> named_standards;
    for (const auto& m : kept) {
        if (!m.level) named_standards.insert(m.standard);
    }
    auto standard_ids = [&](const std::set<std::size_t>& idx) {
        std::vector<std::string> ids;
        for (auto i : idx) ids.push_back(standards[i].id);
        return ids;
    };
    if (named_standards.size() > 1) {
        auto ids = standard_ids(named_standards);
        throw Error(ErrorCode::ambiguous, "prompt names several standards: " + util::join(ids, ", "), ids);
    }

    std::set<std::size_t> level_standards;
    for (const auto& m : kept) {
        if (m.level && (named_standards.empty() || named_standards.count(m.standard))) level_standards.insert(m.standard);
    }
    std::size_t chosen = 0;
    if (named_standards.size() == 1) {
        chosen = *named_standards.begin();
    } else if (level_standards.size() == 1) {
        chosen = *level_standards.begin();
    } else if (level_standards.empty()) {
        std::vector<std::string> ids;
        for (const auto& s : standards) ids.push_back(s.id);
        throw Error(ErrorCode::no_standard_found, "prompt names no known standard or level", ids);
    } else {
        auto ids = standard_ids(level_standards);
        throw Error(ErrorCode::ambiguous, "prompt levels belong to several standards: " + util::join(ids, ", "), ids);
    }

    const Standard& s = standards[chosen];
    std::vector<LevelId> levels;
    for (const auto& level : s.levels) {
        bool hit = std::any_of(kept.begin(), kept.end(),
                               [&](const auto& m) { return m.standard == chosen && m.level && *m.level == level; });
        if (hit) levels.push_back(level);
    }
    if (levels.empty()) {
        throw Error(ErrorCode::no_level_found, "prompt names no level of standard '" + s.id + "'", s.levels);
    }
    if (levels.size() > 1) {
        throw Error(ErrorCode::ambiguous, "prompt names several levels: " + util::join(levels, ", "), levels);
    }
    if (!task || util::trim(payload).empty()) {
        throw Error(ErrorCode::missing_payload,
                    "prompt has no CONTEXT: or THEME: payload and no quoted theme word");
    }
    return make_spec(registry, s.id, levels.front(), *task, payload);
}

}  // namespace standardize
