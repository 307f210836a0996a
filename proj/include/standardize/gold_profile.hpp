// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

// Labeled gold corpora and the per-level mean/std profiles derived from them.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "standardize/error.hpp"
#include "standardize/standards.hpp"
#include "standardize/text_metrics.hpp"
#include "standardize/util.hpp"

namespace standardize {

struct CorpusItem {
    LevelId level;
    std::string text;
    std::string source_id;
};

struct LabeledCorpus {
    std::string standard_id;
    /// Level order of the referenced standard.
    std::vector<LevelId> level_order;
    std::vector<CorpusItem> items;
};

inline void validate_item(const CorpusItem& item, const Standard& standard) {
    if (!standard.has_level(item.level)) {
        throw Error(ErrorCode::unknown_level,
                    item.source_id + ": level '" + item.level + "' is not defined by standard '" + standard.id + "'",
                    standard.levels);
    }
    if (util::trim(item.text).empty()) {
        throw Error(ErrorCode::empty_text, item.source_id + ": text is empty");
    }
}

/// Reads either a JSONL file of {level, text, source_id} rows or a
/// directory with one sub-directory of .txt files per level.
inline LabeledCorpus load_corpus(const std::filesystem::path& path, const Standard& standard) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::exists(path, ec)) throw Error(ErrorCode::io, "corpus not found: " + path.string());

    LabeledCorpus corpus{standard.id, standard.levels, {}};
    if (fs::is_directory(path, ec)) {
        std::vector<fs::path> level_dirs;
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.is_directory()) level_dirs.push_back(entry.path());
        }
        std::sort(level_dirs.begin(), level_dirs.end());
        for (const auto& dir : level_dirs) {
            std::string level = dir.filename().string();
            std::vector<fs::path> files;
            for (const auto& entry : fs::directory_iterator(dir)) {
                if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
            }
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                CorpusItem item{level, util::read_file(f), level + "/" + f.filename().string()};
                validate_item(item, standard);
                corpus.items.push_back(std::move(item));
            }
        }
        return corpus;
    }

    std::string content = util::read_file(path);
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(content)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        std::string where = path.filename().string() + ":" + std::to_string(line_no);
        nlohmann::json row;
        try {
            row = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::parse, where + ": " + e.what());
        }
        if (!row.is_object() || !row.contains("level") || !row.contains("text") || !row["level"].is_string() ||
            !row["text"].is_string()) {
            throw Error(ErrorCode::schema, where + ": expected {level, text, source_id}");
        }
        CorpusItem item;
        item.level = row["level"].get<std::string>();
        item.text = row["text"].get<std::string>();
        item.source_id = row.contains("source_id") && row["source_id"].is_string() ? row["source_id"].get<std::string>()
                                                                                  : "line-" + std::to_string(line_no);
        validate_item(item, standard);
        corpus.items.push_back(std::move(item));
    }
    return corpus;
}

struct LevelProfile {
    LevelId level;
    std::map<FlagId, double> mean;
    /// Population standard deviation.
    std::map<FlagId, double> std;
    std::size_t n = 0;

    friend bool operator==(const LevelProfile&, const LevelProfile&) = default;
};

struct GoldProfile {
    std::string standard_id;
    std::vector<FlagId> flag_ids;
    /// Standard order, only levels present in the source corpus.
    std::vector<LevelProfile> levels;

    const LevelProfile* find(std::string_view level) const {
        for (const auto& l : levels) {
            if (l.level == level) return &l;
        }
        return nullptr;
    }

    const LevelProfile& level(std::string_view id) const {
        if (const auto* l = find(id)) return *l;
        std::vector<std::string> ids;
        for (const auto& l : levels) ids.push_back(l.level);
        throw Error(ErrorCode::unknown_level, "gold profile has no level '" + std::string(id) + "'", ids);
    }

    friend bool operator==(const GoldProfile&, const GoldProfile&) = default;
};

namespace detail {

// Sorting first makes the result independent of item order.
inline double ordered_sum(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    double sum = 0.0, comp = 0.0;
    for (double x : xs) {
        double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace detail

inline std::pair<double, double> mean_and_population_std(const std::vector<double>& xs) {
    double n = static_cast<double>(xs.size());
    double mean = detail::ordered_sum(xs) / n;
    std::vector<double> sq;
    sq.reserve(xs.size());
    for (double x : xs) sq.push_back((x - mean) * (x - mean));
    return {mean, std::sqrt(detail::ordered_sum(std::move(sq)) / n)};
}

inline GoldProfile compute_profile(const LabeledCorpus& corpus, const std::vector<FlagId>& flag_ids,
                                   const AoALexicon& lex = AoALexicon::bundled()) {
    validate_flags(flag_ids);
    GoldProfile profile{corpus.standard_id, flag_ids, {}};
    for (const auto& level : corpus.level_order) {
        std::vector<const CorpusItem*> items;
        for (const auto& item : corpus.items) {
            if (item.level == level) items.push_back(&item);
        }
        if (items.empty()) continue;
        if (items.size() < 2) {
            throw Error(ErrorCode::insufficient_items,
                        "level '" + level + "' has " + std::to_string(items.size()) + " item(s); at least 2 are required");
        }
        std::map<FlagId, std::vector<double>> columns;
        for (const auto* item : items) {
            FeatureVector fv;
            try {
                fv = extract_profile(item->text, flag_ids, lex);
            } catch (const Error& e) {
                throw Error(e.code(), item->source_id + ": " + e.what());
            }
            for (const auto& f : flag_ids) columns[f].push_back(fv.at(f));
        }
        LevelProfile lp;
        lp.level = level;
        lp.n = items.size();
        for (const auto& f : flag_ids) {
            auto [m, s] = mean_and_population_std(columns[f]);
            lp.mean[f] = m;
            lp.std[f] = s;
        }
        profile.levels.push_back(std::move(lp));
    }
    return profile;
}

struct LevelCorpusStats {
    LevelId level;
    std::size_t n = 0;
    double avg_word_count = 0.0;
    double avg_sentence_count = 0.0;
};

/// Average word and sentence counts per level; levels without items are
/// left out.
inline std::vector<LevelCorpusStats> corpus_stats(const LabeledCorpus& corpus) {
    std::vector<LevelCorpusStats> out;
    for (const auto& level : corpus.level_order) {
        std::vector<double> words, sentences;
        for (const auto& item : corpus.items) {
            if (item.level != level) continue;
            auto t = segment(item.text);
            words.push_back(static_cast<double>(t.token_count()));
            sentences.push_back(static_cast<double>(t.sentence_count()));
        }
        if (words.empty()) continue;
        double n = static_cast<double>(words.size());
        out.push_back({level, words.size(), detail::ordered_sum(words) / n, detail::ordered_sum(sentences) / n});
    }
    return out;
}

inline nlohmann::ordered_json to_json(const GoldProfile& p) {
    nlohmann::ordered_json levels = nlohmann::ordered_json::object();
    for (const auto& l : p.levels) {
        nlohmann::ordered_json mean = nlohmann::ordered_json::object(), std = nlohmann::ordered_json::object();
        for (const auto& f : p.flag_ids) {
            mean[f] = l.mean.at(f);
            std[f] = l.std.at(f);
        }
        levels[l.level] = {{"mean", mean}, {"std", std}, {"n", l.n}};
    }
    return {{"standard_id", p.standard_id}, {"flags", p.flag_ids}, {"levels", levels}};
}

inline GoldProfile parse_profile(const nlohmann::ordered_json& j) {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::schema, "gold profile: " + what); };
    if (!j.is_object()) fail("expected a JSON object");
    for (const char* key : {"standard_id", "flags", "levels"}) {
        if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
    }
    GoldProfile p;
    if (!j["standard_id"].is_string()) fail("standard_id must be a string");
    p.standard_id = j["standard_id"].get<std::string>();
    if (!j["flags"].is_array() || j["flags"].empty()) fail("flags must be a non-empty array");
    for (const auto& f : j["flags"]) {
        if (!f.is_string()) fail("flags must contain strings");
        p.flag_ids.push_back(f.get<std::string>());
    }
    validate_flags(p.flag_ids);
    if (!j["levels"].is_object() || j["levels"].empty()) fail("levels must be a non-empty object");
    for (const auto& [level, lj] : j["levels"].items()) {
        if (!lj.is_object() || !lj.contains("mean") || !lj.contains("std") || !lj.contains("n")) {
            fail("level '" + level + "' needs mean, std and n");
        }
        LevelProfile lp;
        lp.level = level;
        if (!lj["n"].is_number_unsigned() || lj["n"].get<std::size_t>() < 2) fail("level '" + level + "' needs n >= 2");
        lp.n = lj["n"].get<std::size_t>();
        for (const char* part : {"mean", "std"}) {
            const auto& values = lj[part];
            if (!values.is_object() || values.size() != p.flag_ids.size()) {
                fail("level '" + level + "' " + part + " must hold exactly the profile flags");
            }
            bool is_std = std::string_view(part) == "std";
            auto& target = is_std ? lp.std : lp.mean;
            for (const auto& f : p.flag_ids) {
                if (!values.contains(f) || !values[f].is_number()) {
                    fail("level '" + level + "' " + part + " is missing flag '" + f + "'");
                }
                double v = values[f].get<double>();
                if (!std::isfinite(v) || (is_std && v < 0.0)) {
                    fail("level '" + level + "' " + part + "['" + f + "'] is out of range");
                }
                target[f] = v;
            }
        }
        p.levels.push_back(std::move(lp));
    }
    return p;
}

inline void save_profile(const GoldProfile& p, const std::filesystem::path& path) {
    util::write_file(path, to_json(p).dump(2) + "\n");
}

inline GoldProfile load_profile(const std::filesystem::path& path) {
    std::string text = util::read_file(path);
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::schema, path.string() + ": " + e.what());
    }
    return parse_profile(j);
}

}  // namespace standardize
