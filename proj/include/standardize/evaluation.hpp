// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "standardize/distance.hpp"
#include "standardize/error.hpp"
#include "standardize/gold_profile.hpp"
#include "standardize/orchestrator.hpp"
#include "standardize/standards.hpp"
#include "standardize/text_metrics.hpp"
#include "standardize/util.hpp"

namespace standardize {

namespace detail {

inline void check_label_lists(const std::vector<LevelId>& preds, const std::vector<LevelId>& golds) {
    if (preds.size() != golds.size()) {
        throw Error(ErrorCode::length_mismatch, "got " + std::to_string(preds.size()) + " predictions for " +
                                                    std::to_string(golds.size()) + " gold labels");
    }
    if (preds.empty()) throw Error(ErrorCode::empty_input, "label lists are empty");
}

}  // namespace detail

inline double precise_accuracy(const std::vector<LevelId>& preds, const std::vector<LevelId>& golds) {
    detail::check_label_lists(preds, golds);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) hits += preds[i] == golds[i];
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

/// Adjacent accuracy needs an ordinal standard with at least three levels.
inline bool adjacent_applicable(const Standard& standard) { return standard.levels.size() >= 3; }

inline double adjacent_accuracy(const std::vector<LevelId>& preds, const std::vector<LevelId>& golds,
                                const Standard& standard) {
    detail::check_label_lists(preds, golds);
    if (!adjacent_applicable(standard)) {
        throw Error(ErrorCode::not_applicable, "adjacent accuracy is not defined for standard '" + standard.id +
                                                   "' with " + std::to_string(standard.levels.size()) + " levels");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) hits += level_distance(standard, preds[i], golds[i]) <= 1;
    return static_cast<double>(hits) / static_cast<double>(preds.size());
}

inline double distinct_n(const std::vector<std::string>& tokens, std::size_t n) {
    if (n == 0) throw Error(ErrorCode::invalid_argument, "distinct-n needs n >= 1");
    if (tokens.size() < n) {
        throw Error(ErrorCode::empty_text, "text has " + std::to_string(tokens.size()) + " tokens, fewer than n = " +
                                               std::to_string(n));
    }
    std::set<std::vector<std::string>> grams;
    std::size_t total = tokens.size() - n + 1;
    for (std::size_t i = 0; i < total; ++i) {
        std::vector<std::string> g;
        for (std::size_t k = 0; k < n; ++k) g.push_back(util::to_lower(tokens[i + k]));
        grams.insert(std::move(g));
    }
    return static_cast<double>(grams.size()) / static_cast<double>(total);
}

inline double distinct_n(std::string_view text, std::size_t n) { return distinct_n(segment(text).tokens(), n); }

// ---------------------------------------------------------------------------
// Classifiers

class LevelClassifier {
public:
    virtual ~LevelClassifier() = default;
    virtual LevelId classify(const FeatureVector& profile) const = 0;
    virtual std::string name() const = 0;
};

/// Nearest level mean. Under zscore each flag is centred on the grand mean
/// and scaled by the pooled within-level standard deviation (1 if zero).
class NearestCentroidClassifier : public LevelClassifier {
public:
    explicit NearestCentroidClassifier(GoldProfile gold, Normalization normalization = Normalization::zscore)
        : gold_(std::move(gold)), normalization_(normalization) {
        if (gold_.levels.empty()) throw Error(ErrorCode::empty_input, "gold profile has no levels");
        double total_n = 0;
        for (const auto& l : gold_.levels) total_n += static_cast<double>(l.n);
        for (const auto& f : gold_.flag_ids) {
            double mean = 0, var = 0;
            for (const auto& l : gold_.levels) {
                double w = static_cast<double>(l.n) / total_n;
                mean += w * l.mean.at(f);
                var += w * l.std.at(f) * l.std.at(f);
            }
            double sd = std::sqrt(var);
            center_[f] = normalization_ == Normalization::zscore ? mean : 0.0;
            scale_[f] = normalization_ == Normalization::zscore && sd > 0 ? sd : 1.0;
        }
    }

    LevelId classify(const FeatureVector& profile) const override {
        const LevelProfile* best = nullptr;
        double best_d = 0;
        for (const auto& l : gold_.levels) {
            double d = 0;
            for (const auto& f : gold_.flag_ids) {
                double x = (profile.at(f) - center_.at(f)) / scale_.at(f);
                double c = (l.mean.at(f) - center_.at(f)) / scale_.at(f);
                d += (x - c) * (x - c);
            }
            d = std::sqrt(d);
            // Levels are in ordinal order; a near-exact tie keeps the lower one.
            if (!best || d < best_d - 1e-12 * std::max(1.0, best_d)) {
                best = &l;
                best_d = d;
            }
        }
        return best->level;
    }

    std::string name() const override { return "nearest-centroid-" + std::string(to_string(normalization_)); }

private:
    GoldProfile gold_;
    Normalization normalization_;
    std::map<FlagId, double> center_;
    std::map<FlagId, double> scale_;
};

inline LevelId classify(const FeatureVector& profile, const GoldProfile& gold,
                        Normalization normalization = Normalization::zscore) {
    return NearestCentroidClassifier(gold, normalization).classify(profile);
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvaluationItem {
    std::string source_id;
    PromptMode mode = PromptMode::teacher;
    std::string text;
    LevelId intended;
    LevelId predicted;
    FeatureVector profile;
    double distance_to_gold = 0.0;
    double distinct1 = 0.0;
    double distinct2 = 0.0;
};

struct ModeSummary {
    PromptMode mode = PromptMode::teacher;
    std::size_t n = 0;
    double precise_accuracy = 0.0;
    std::optional<double> adjacent_accuracy;
    double mean_distance = 0.0;
    double mean_distinct = 0.0;
};

struct EvaluationReport {
    std::string standard_id;
    std::string classifier;
    Normalization normalization = Normalization::raw;
    std::vector<EvaluationItem> items;
    double precise_accuracy = 0.0;
    std::optional<double> adjacent_accuracy;
    /// Standard order; only levels present among the items.
    std::vector<std::pair<LevelId, double>> level_mean_distance;
    double mean_distinct1 = 0.0;
    double mean_distinct2 = 0.0;
    /// Mean of distinct-1 and distinct-2.
    double mean_distinct = 0.0;
    std::vector<ModeSummary> by_mode;
    std::vector<std::string> notes;
};

struct EvaluationConfig {
    Normalization distance = Normalization::raw;
    /// Defaults to nearest-centroid over z-scored flags.
    const LevelClassifier* classifier = nullptr;
    /// Carried into the report, e.g. skipped input files.
    std::vector<std::string> notes;
};

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
    return xs.empty() ? 0.0 : detail::ordered_sum(xs) / static_cast<double>(xs.size());
}

}  // namespace detail

inline EvaluationReport evaluate(const std::vector<GenerationResult>& results, const GoldProfile& gold,
                                 const Standard& standard, const EvaluationConfig& config = {},
                                 const AoALexicon& lex = AoALexicon::bundled()) {
    if (results.empty()) throw Error(ErrorCode::empty_input, "no generation results to evaluate");
    if (gold.standard_id != standard.id) {
        throw Error(ErrorCode::invalid_argument,
                    "gold profile is for '" + gold.standard_id + "', results target '" + standard.id + "'");
    }
    std::unique_ptr<NearestCentroidClassifier> fallback;
    const LevelClassifier* classifier = config.classifier;
    if (!classifier) {
        fallback = std::make_unique<NearestCentroidClassifier>(gold);
        classifier = fallback.get();
    }

    EvaluationReport report;
    report.standard_id = standard.id;
    report.classifier = classifier->name();
    report.normalization = config.distance;
    report.notes = config.notes;

    for (const auto& r : results) {
        if (r.spec.standard_id != standard.id) {
            throw Error(ErrorCode::invalid_argument,
                        r.job_id + ": targets standard '" + r.spec.standard_id + "', expected '" + standard.id + "'");
        }
        gold.level(r.spec.level);
        EvaluationItem item;
        item.source_id = r.job_id;
        item.mode = r.mode;
        item.text = r.final_text;
        item.intended = r.spec.level;
        auto tokens = segment(r.final_text);
        item.profile = extract_profile(tokens, gold.flag_ids, lex);
        item.predicted = classifier->classify(item.profile);
        if (!standard.has_level(item.predicted)) {
            throw Error(ErrorCode::unknown_level, classifier->name() + " predicted unknown level '" + item.predicted + "'",
                        standard.levels);
        }
        item.distance_to_gold = distance_to_level(item.profile, gold, item.intended, config.distance);
        auto toks = tokens.tokens();
        item.distinct1 = distinct_n(toks, 1);
        item.distinct2 = distinct_n(toks, 2);
        report.items.push_back(std::move(item));
    }

    auto summarize = [&](const std::vector<const EvaluationItem*>& items, ModeSummary& s) {
        std::vector<LevelId> preds, golds;
        std::vector<double> dist, div;
        for (const auto* it : items) {
            preds.push_back(it->predicted);
            golds.push_back(it->intended);
            dist.push_back(it->distance_to_gold);
            div.push_back((it->distinct1 + it->distinct2) / 2.0);
        }
        s.n = items.size();
        s.precise_accuracy = precise_accuracy(preds, golds);
        if (adjacent_applicable(standard)) s.adjacent_accuracy = adjacent_accuracy(preds, golds, standard);
        s.mean_distance = detail::mean_of(dist);
        s.mean_distinct = detail::mean_of(div);
    };

    std::vector<const EvaluationItem*> all;
    for (const auto& it : report.items) all.push_back(&it);
    ModeSummary overall;
    summarize(all, overall);
    report.precise_accuracy = overall.precise_accuracy;
    report.adjacent_accuracy = overall.adjacent_accuracy;

    for (const auto& level : standard.levels) {
        std::vector<double> d;
        for (const auto& it : report.items) {
            if (it.intended == level) d.push_back(it.distance_to_gold);
        }
        if (!d.empty()) report.level_mean_distance.emplace_back(level, detail::mean_of(d));
    }
    std::vector<double> d1, d2;
    for (const auto& it : report.items) {
        d1.push_back(it.distinct1);
        d2.push_back(it.distinct2);
    }
    report.mean_distinct1 = detail::mean_of(d1);
    report.mean_distinct2 = detail::mean_of(d2);
    report.mean_distinct = (report.mean_distinct1 + report.mean_distinct2) / 2.0;

    for (auto mode : kAllModes) {
        std::vector<const EvaluationItem*> sel;
        for (const auto& it : report.items) {
            if (it.mode == mode) sel.push_back(&it);
        }
        if (sel.empty()) continue;
        ModeSummary s;
        s.mode = mode;
        summarize(sel, s);
        report.by_mode.push_back(s);
    }
    return report;
}

inline nlohmann::ordered_json to_json(const EvaluationReport& r) {
    nlohmann::ordered_json summary;
    summary["standard_id"] = r.standard_id;
    summary["classifier"] = r.classifier;
    summary["distance_normalization"] = to_string(r.normalization);
    summary["n"] = r.items.size();
    summary["precise_accuracy"] = r.precise_accuracy;
    if (r.adjacent_accuracy) summary["adjacent_accuracy"] = *r.adjacent_accuracy;
    nlohmann::ordered_json per_level = nlohmann::ordered_json::object();
    for (const auto& [level, d] : r.level_mean_distance) per_level[level] = d;
    summary["mean_distance_by_level"] = per_level;
    summary["mean_distinct_1"] = r.mean_distinct1;
    summary["mean_distinct_2"] = r.mean_distinct2;
    summary["mean_distinct"] = r.mean_distinct;
    nlohmann::ordered_json modes = nlohmann::ordered_json::array();
    for (const auto& m : r.by_mode) {
        nlohmann::ordered_json mj;
        mj["mode"] = to_string(m.mode);
        mj["n"] = m.n;
        mj["precise_accuracy"] = m.precise_accuracy;
        if (m.adjacent_accuracy) mj["adjacent_accuracy"] = *m.adjacent_accuracy;
        mj["mean_distance"] = m.mean_distance;
        mj["mean_distinct"] = m.mean_distinct;
        modes.push_back(std::move(mj));
    }
    summary["by_mode"] = modes;
    summary["notes"] = r.notes;

    nlohmann::ordered_json items = nlohmann::ordered_json::array();
    for (const auto& it : r.items) {
        nlohmann::ordered_json ij;
        ij["source_id"] = it.source_id;
        ij["mode"] = to_string(it.mode);
        ij["intended"] = it.intended;
        ij["predicted"] = it.predicted;
        ij["distance_to_gold"] = it.distance_to_gold;
        ij["distinct_n"] = {{"1", it.distinct1}, {"2", it.distinct2}};
        ij["profile"] = it.profile;
        ij["text"] = it.text;
        items.push_back(std::move(ij));
    }
    return {{"summary", summary}, {"items", items}};
}

namespace detail {

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace detail

inline std::string to_csv(const EvaluationReport& r) {
    std::string out = "source_id,intended,predicted,distance,distinct1,distinct2\n";
    for (const auto& it : r.items) {
        out += detail::csv_field(it.source_id) + "," + detail::csv_field(it.intended) + "," +
               detail::csv_field(it.predicted) + "," + util::format_fixed(it.distance_to_gold, 6) + "," +
               util::format_fixed(it.distinct1, 6) + "," + util::format_fixed(it.distinct2, 6) + "\n";
    }
    return out;
}

}  // namespace standardize
