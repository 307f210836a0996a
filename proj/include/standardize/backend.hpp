// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "standardize/error.hpp"
#include "standardize/text_metrics.hpp"
#include "standardize/util.hpp"

namespace standardize {

struct DecodingConfig {
    int min_new_tokens = 30;
    int max_new_tokens = 300;
    double top_p = 0.95;
    std::optional<double> temperature;
    std::string model_id = "gpt-4";

    void validate() const {
        if (!(min_new_tokens > 0 && min_new_tokens <= max_new_tokens)) {
            throw Error(ErrorCode::invalid_argument, "decoding needs 0 < min_new_tokens <= max_new_tokens");
        }
        if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorCode::invalid_argument, "top_p must lie in (0, 1]");
        if (temperature && !(*temperature >= 0.0)) throw Error(ErrorCode::invalid_argument, "temperature must be >= 0");
        if (model_id.empty()) throw Error(ErrorCode::invalid_argument, "model_id is empty");
    }

    friend bool operator==(const DecodingConfig&, const DecodingConfig&) = default;
};

inline void to_json(nlohmann::ordered_json& j, const DecodingConfig& d) {
    j = nlohmann::ordered_json{{"model_id", d.model_id},
                               {"min_new_tokens", d.min_new_tokens},
                               {"max_new_tokens", d.max_new_tokens},
                               {"top_p", d.top_p}};
    j["temperature"] = d.temperature ? nlohmann::ordered_json(*d.temperature) : nlohmann::ordered_json(nullptr);
}

inline void from_json(const nlohmann::ordered_json& j, DecodingConfig& d) {
    d.model_id = j.at("model_id").get<std::string>();
    d.min_new_tokens = j.at("min_new_tokens").get<int>();
    d.max_new_tokens = j.at("max_new_tokens").get<int>();
    d.top_p = j.at("top_p").get<double>();
    d.temperature.reset();
    if (j.contains("temperature") && !j["temperature"].is_null()) d.temperature = j["temperature"].get<double>();
}

/// One raw backend response.
struct Completion {
    std::string text;
    /// Wall-clock time as reported by the backend; mocks report 0.
    double latency_ms = 0.0;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion generate(const std::string& prompt, const DecodingConfig& decoding) = 0;
    virtual std::string name() const = 0;
};

/// Result of `complete`: the length-enforced text plus bookkeeping.
struct CompletionResult {
    std::string text;
    /// Text of the last backend response before truncation.
    std::string raw_response;
    int attempts = 0;
    double elapsed_ms = 0.0;
};

inline std::size_t word_count(std::string_view text) {
    if (util::trim(text).empty()) return 0;
    try {
        return segment(text).token_count();
    } catch (const Error&) {
        return 0;
    }
}

/// Cuts `text` to at most `max_words` tokens, preferring the last whole
/// sentence that fits.
inline std::string truncate_words(std::string_view text, std::size_t max_words) {
    auto t = segment(text);
    if (t.token_count() <= max_words) return std::string(text);
    std::size_t used = 0;
    std::size_t cut = 0;
    for (std::size_t si = 0; si < t.sentences.size(); ++si) {
        if (used + t.sentences[si].size() > max_words) break;
        used += t.sentences[si].size();
        cut = si + 1 < t.sentences.size() ? t.spans[si + 1].front().begin : t.raw.size();
    }
    if (cut == 0) {
        std::size_t seen = 0;
        for (const auto& spans : t.spans) {
            for (const auto& sp : spans) {
                if (++seen == max_words) cut = sp.end;
            }
        }
    }
    return std::string(util::trim(std::string_view(t.raw).substr(0, cut)));
}

/// Calls the backend and enforces the word-length window. Short responses
/// are regenerated up to twice with an explicit minimum-length clause; long
/// ones are truncated.
inline CompletionResult complete(const std::string& prompt, const DecodingConfig& decoding, Backend& backend) {
    decoding.validate();
    CompletionResult out;
    const auto min_words = static_cast<std::size_t>(decoding.min_new_tokens);
    std::string request = prompt;
    for (int attempt = 0; attempt < 3; ++attempt) {
        Completion c = backend.generate(request, decoding);
        ++out.attempts;
        out.elapsed_ms += c.latency_ms;
        out.raw_response = c.text;
        std::size_t words = word_count(c.text);
        if (words >= min_words) {
            out.text = truncate_words(c.text, static_cast<std::size_t>(decoding.max_new_tokens));
            return out;
        }
        request = prompt + "\n\nWrite at least " + std::to_string(min_words) + " words.";
    }
    throw Error(ErrorCode::length_enforcement_exhausted,
                "response stayed below " + std::to_string(min_words) + " words after " + std::to_string(out.attempts) +
                    " attempts");
}

}  // namespace standardize
