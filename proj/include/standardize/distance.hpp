// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "standardize/error.hpp"
#include "standardize/gold_profile.hpp"
#include "standardize/text_metrics.hpp"

namespace standardize {

enum class Normalization { raw, zscore };

inline std::string_view to_string(Normalization n) { return n == Normalization::raw ? "raw" : "zscore"; }

inline Normalization parse_normalization(std::string_view s) {
    if (s == "raw") return Normalization::raw;
    if (s == "zscore") return Normalization::zscore;
    throw Error(ErrorCode::invalid_argument, "unknown normalization '" + std::string(s) + "'", {"raw", "zscore"});
}

using FlagValues = std::map<FlagId, double>;

namespace detail {

inline double value_of(const FlagValues& v, const FlagId& f, const char* which) {
    auto it = v.find(f);
    if (it == v.end()) throw Error(ErrorCode::missing_flag, std::string(which) + " vector has no value for '" + f + "'");
    return it->second;
}

}  // namespace detail

/// Euclidean distance over `flags`. Under zscore every coordinate becomes
/// (x - mean_f) / std_f using `stats`, which must carry std_f > 0.
inline double euclidean_distance(const FlagValues& a, const FlagValues& b, const std::vector<FlagId>& flags,
                                 Normalization normalization, const LevelProfile* stats = nullptr) {
    if (normalization == Normalization::zscore && stats == nullptr) {
        throw Error(ErrorCode::invalid_argument, "zscore distance needs a profile");
    }
    double sum = 0.0;
    for (const auto& f : flags) {
        double x = detail::value_of(a, f, "first");
        double y = detail::value_of(b, f, "second");
        if (normalization == Normalization::zscore) {
            double mean = detail::value_of(stats->mean, f, "profile mean");
            double sd = detail::value_of(stats->std, f, "profile std");
            if (!(sd > 0.0)) throw Error(ErrorCode::zero_std, "flag '" + f + "' has zero standard deviation");
            x = (x - mean) / sd;
            y = (y - mean) / sd;
        }
        sum += (x - y) * (x - y);
    }
    return std::sqrt(sum);
}

inline double euclidean_distance(const FeatureVector& a, const FeatureVector& b, const std::vector<FlagId>& flags,
                                 Normalization normalization, const LevelProfile* stats = nullptr) {
    return euclidean_distance(a.values, b.values, flags, normalization, stats);
}

/// Distance of one feature vector to the mean of a gold level.
inline double distance_to_level(const FeatureVector& v, const GoldProfile& profile, std::string_view level,
                                Normalization normalization) {
    const auto& lp = profile.level(level);
    return euclidean_distance(v.values, lp.mean, profile.flag_ids, normalization, &lp);
}

inline double mean_distance(const std::vector<FeatureVector>& items, const GoldProfile& profile, std::string_view level,
                            Normalization normalization = Normalization::raw) {
    if (items.empty()) throw Error(ErrorCode::empty_input, "mean_distance needs at least one item");
    double sum = 0.0;
    for (const auto& v : items) sum += distance_to_level(v, profile, level, normalization);
    return sum / static_cast<double>(items.size());
}

}  // namespace standardize
