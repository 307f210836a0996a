// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

// Scripted test backend. Modes:
//   canned     every call returns the same text
//   scripted   call k returns responses[k]; {"error": msg} raises instead
//   compliant  synthesizes stories and obeys rewrite directives
//   defiant    like compliant for first drafts, returns rewrites unchanged

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "standardize/backend.hpp"
#include "standardize/error.hpp"
#include "standardize/text_metrics.hpp"
#include "standardize/util.hpp"

namespace standardize {

/// Knobs of a synthetic story.
struct StoryShape {
    int sentences = 10;
    int words = 100;
    int content_types = 40;
    /// Alphanumeric characters over all content tokens.
    int content_chars = 450;
    int coordinators = 3;
    int subordinators = 2;
    int single_names = 3;
    int double_names = 0;
    int carriers = 0;
    double carrier_age = 6.0;
};

/// Deterministic generator of pseudo-word stories whose measured flags are
/// controlled by a StoryShape.
class StorySynthesizer {
public:
    explicit StorySynthesizer(const AoALexicon& lex = AoALexicon::bundled()) : lex_(&lex) {
        for (const auto& [w, age] : lex.entries()) {
            if (reserved(w) || w.size() < 3) continue;
            carriers_.emplace_back(age, w);
        }
        std::sort(carriers_.begin(), carriers_.end());
    }

    const AoALexicon& lexicon() const { return *lex_; }

    std::string render(StoryShape shape, std::uint64_t seed) const {
        clamp(shape);
        std::mt19937_64 rng(seed);
        std::set<std::string> used;

        // Fixed units: each is 1 or 2 tokens placed inside a sentence, never first.
        std::vector<std::vector<std::string>> units;
        std::vector<std::string> names;
        for (int i = 0; i < 6; ++i) names.push_back(fresh_name(rng, used));
        int name_i = 0;
        for (int i = 0; i < shape.coordinators; ++i) units.push_back({"and"});
        for (int i = 0; i < shape.subordinators; ++i) units.push_back({"because"});
        for (int i = 0; i < shape.single_names; ++i) units.push_back({names[name_i++ % names.size()]});
        for (int i = 0; i < shape.double_names; ++i) {
            units.push_back({names[name_i % names.size()], names[(name_i + 1) % names.size()]});
            name_i += 2;
        }
        auto [lo, hi] = carrier_pair(shape.carrier_age);
        int n_hi = 0;
        if (shape.carriers > 0 && hi.first != lo.first) {
            n_hi = static_cast<int>(std::lround(shape.carriers * (shape.carrier_age - lo.first) / (hi.first - lo.first)));
            n_hi = std::clamp(n_hi, 0, shape.carriers);
        }
        for (int i = 0; i < shape.carriers; ++i) units.push_back({i < n_hi ? hi.second : lo.second});
        shuffle(units, rng);

        // Sentence lengths.
        std::vector<int> len(shape.sentences, shape.words / shape.sentences);
        for (int i = 0; i < shape.words % shape.sentences; ++i) ++len[(i * 7) % shape.sentences];

        // Distribute units; each is preceded by at least one content token.
        std::vector<std::vector<std::size_t>> placed(shape.sentences);
        std::vector<int> used_len(shape.sentences, 0);
        std::size_t cursor = 0;
        for (std::size_t u = 0; u < units.size(); ++u) {
            int need = static_cast<int>(units[u].size()) + 1;
            for (int tries = 0; tries < shape.sentences; ++tries) {
                std::size_t s = (cursor + tries) % shape.sentences;
                if (used_len[s] + need <= len[s]) {
                    placed[s].push_back(u);
                    used_len[s] += need;
                    break;
                }
            }
            cursor = (cursor + 1) % shape.sentences;
        }

        int fixed_tokens = 0;
        for (const auto& p : placed) {
            for (auto u : p) fixed_tokens += static_cast<int>(units[u].size());
        }
        int content_tokens = shape.words - fixed_tokens;
        int types = std::clamp(shape.content_types, 1, std::max(1, content_tokens));
        std::vector<int> counts(types, content_tokens / types);
        for (int i = 0; i < content_tokens % types; ++i) ++counts[i];
        int chars = std::max(shape.content_chars, content_tokens * 2);
        std::vector<int> lengths = assign_lengths(counts, chars);
        std::vector<std::string> vocab;
        for (int j = 0; j < types; ++j) vocab.push_back(fresh_word(rng, lengths[j], used));

        // Content tokens cycle through the vocabulary.
        std::string out;
        int k = 0;
        auto next_content = [&] { return vocab[static_cast<std::size_t>(k++ % types)]; };
        for (int s = 0; s < shape.sentences; ++s) {
            std::vector<std::string> toks;
            int content_here = len[s];
            for (auto u : placed[s]) content_here -= static_cast<int>(units[u].size());
            // Interleave: content first, then a unit after every gap slot.
            std::vector<int> gaps(placed[s].size() + 1, 0);
            int spare = content_here - static_cast<int>(placed[s].size());
            for (std::size_t g = 0; g < placed[s].size(); ++g) gaps[g] = 1;
            for (int i = 0; i < spare; ++i) ++gaps[static_cast<std::size_t>(i) % gaps.size()];
            for (std::size_t g = 0; g < gaps.size(); ++g) {
                for (int i = 0; i < gaps[g]; ++i) toks.push_back(next_content());
                if (g < placed[s].size()) {
                    for (const auto& t : units[placed[s][g]]) toks.push_back(t);
                }
            }
            if (toks.empty()) continue;
            toks[0][0] = static_cast<char>(std::toupper(static_cast<unsigned char>(toks[0][0])));
            if (!out.empty()) out += ' ';
            out += util::join(toks, " ");
            out += '.';
        }
        return out;
    }

    /// Shape that makes the measured flags land near `target`. Flags absent
    /// from `target` take neutral defaults.
    StoryShape solve(const std::map<FlagId, double>& target, int max_words, int min_words) const {
        auto has = [&](std::string_view f) { return target.count(std::string(f)) > 0; };
        auto get = [&](std::string_view f) { return target.at(std::string(f)); };
        auto tol = [](double t) { return std::max(0.03 * std::abs(t), 0.02); };

        double t_s = has(flags::total_sentences) ? get(flags::total_sentences) : -1;
        double t_w = has(flags::total_words) ? get(flags::total_words) : -1;
        double t_a = has(flags::avg_sentence_length) ? get(flags::avg_sentence_length) : -1;
        int s0 = t_s > 0 ? static_cast<int>(std::lround(t_s))
                 : (t_w > 0 && t_a > 0) ? static_cast<int>(std::lround(t_w / t_a))
                                        : 10;
        s0 = std::max(s0, 1);

        auto count_for = [&](std::string_view f, double base, int fallback) {
            return has(f) ? static_cast<int>(std::lround(std::max(0.0, get(f)) * base)) : fallback;
        };
        auto density_err = [&](std::string_view f, int count, double base) {
            if (!has(f)) return 0.0;
            double t = get(f);
            return std::pow((count / base - t) / tol(t), 2);
        };

        // Sentence and word counts are searched jointly so that the integer
        // conjunction and name counts can still hit their densities.
        StoryShape best;
        double best_err = -1;
        for (int s = std::max(1, s0 - 6); s <= s0 + 6; ++s) {
            const double S = s;
            int coord = count_for(flags::coord_conj_density, S, s / 3);
            int sub = count_for(flags::subord_conj_density, S, s / 4);
            int ents = count_for(flags::entity_density, S, s / 3);
            double base_err = density_err(flags::coord_conj_density, coord, S) +
                              density_err(flags::subord_conj_density, sub, S) +
                              density_err(flags::entity_density, ents, S);
            if (t_s > 0) base_err += std::pow((s - t_s) / tol(t_s), 2);
            for (int w = std::max({min_words, s * 4, 1}); w <= max_words; ++w) {
                const double W = w;
                double err = base_err;
                if (t_w > 0) err += std::pow((W - t_w) / tol(t_w), 2);
                if (t_a > 0) err += std::pow((W / S - t_a) / tol(t_a), 2);
                if (t_w <= 0 && t_a <= 0) err += std::pow((W - 12.0 * S) / 50.0, 2);
                int singles = ents, doubles = 0;
                if (has(flags::proper_noun_density)) {
                    int tokens = count_for(flags::proper_noun_density, W, ents);
                    if (!has(flags::entity_density)) {
                        singles = tokens;
                    } else {
                        doubles = std::clamp(tokens - ents, 0, ents);
                        singles = ents - doubles;
                    }
                    err += density_err(flags::proper_noun_density, singles + 2 * doubles, W);
                }
                if (best_err < 0 || err < best_err) {
                    best_err = err;
                    best.sentences = s;
                    best.words = w;
                    best.coordinators = coord;
                    best.subordinators = sub;
                    best.single_names = singles;
                    best.double_names = doubles;
                }
            }
        }
        const double S = best.sentences, W = best.words;

        if (has(flags::aoa_mean)) {
            best.carriers = std::max(4, best.words / 6);
            double covered_sum = 0;
            int covered = best.carriers;
            if (const double* a = lex_->find("and")) {
                covered_sum += *a * best.coordinators;
                covered += best.coordinators;
            }
            if (const double* b = lex_->find("because")) {
                covered_sum += *b * best.subordinators;
                covered += best.subordinators;
            }
            best.carrier_age = (get(flags::aoa_mean) * covered - covered_sum) / best.carriers;
        }

        // Character budget from average word length and/or ARI.
        double awl = 0, weight = 0;
        if (has(flags::avg_word_length)) {
            double t = get(flags::avg_word_length);
            double w = 1.0 / std::pow(tol(t), 2);
            awl += w * t;
            weight += w;
        }
        if (has(flags::ari)) {
            double t = get(flags::ari);
            double w = 1.0 / std::pow(tol(t) / 4.71, 2);
            awl += w * (t + 21.43 - 0.5 * W / S) / 4.71;
            weight += w;
        }
        awl = weight > 0 ? awl / weight : 4.3;
        awl = std::clamp(awl, 2.2, 10.0);

        StoryShape probe = best;
        probe.content_types = 1;
        probe.content_chars = 0;
        auto fixed = fixed_footprint(probe);
        int content_tokens = std::max(1, best.words - fixed.tokens);
        best.content_chars = std::max(2 * content_tokens, static_cast<int>(std::lround(awl * W)) - fixed.chars);

        double types = 0.45 * W;
        if (has(flags::root_ttr)) types = get(flags::root_ttr) * std::sqrt(W);
        else if (has(flags::ttr)) types = get(flags::ttr) * W;
        best.content_types = std::clamp(static_cast<int>(std::lround(types)) - fixed.types, 1, content_tokens);
        return best;
    }

    /// Arbitrary first-draft shape derived from a hash.
    StoryShape draft(std::uint64_t h, int min_words, int max_words) const {
        StoryShape d;
        d.sentences = 5 + static_cast<int>(h % 8);
        int asl = 6 + static_cast<int>((h >> 5) % 10);
        d.words = std::clamp(d.sentences * asl, min_words, max_words);
        d.content_types = static_cast<int>(d.words * (0.30 + static_cast<double>((h >> 11) % 30) / 100.0));
        double awl = 3.6 + static_cast<double>((h >> 17) % 20) / 10.0;
        d.content_chars = static_cast<int>(awl * d.words);
        d.coordinators = static_cast<int>((h >> 23) % static_cast<std::uint64_t>(d.sentences));
        d.subordinators = static_cast<int>((h >> 29) % static_cast<std::uint64_t>(d.sentences / 2 + 1));
        d.single_names = static_cast<int>((h >> 35) % static_cast<std::uint64_t>(d.sentences));
        d.carriers = d.words / 10;
        d.carrier_age = 5.0 + static_cast<double>((h >> 41) % 50) / 10.0;
        return d;
    }

private:
    struct Footprint {
        int tokens = 0;
        int chars = 0;
        int types = 0;
    };

    Footprint fixed_footprint(const StoryShape& shape) const {
        Footprint f;
        f.tokens = shape.coordinators + shape.subordinators + shape.single_names + 2 * shape.double_names + shape.carriers;
        f.chars = 3 * shape.coordinators + 7 * shape.subordinators + 5 * (shape.single_names + 2 * shape.double_names);
        auto [lo, hi] = carrier_pair(shape.carrier_age);
        if (shape.carriers > 0) {
            int n_hi = hi.first != lo.first ? static_cast<int>(std::lround(shape.carriers * (shape.carrier_age - lo.first) /
                                                                           (hi.first - lo.first)))
                                            : 0;
            n_hi = std::clamp(n_hi, 0, shape.carriers);
            f.chars += n_hi * static_cast<int>(hi.second.size()) +
                       (shape.carriers - n_hi) * static_cast<int>(lo.second.size());
            f.types += (n_hi > 0) + (shape.carriers - n_hi > 0);
        }
        f.types += (shape.coordinators > 0) + (shape.subordinators > 0);
        f.types += std::min(6, shape.single_names + 2 * shape.double_names);
        return f;
    }

    static bool reserved(const std::string& w) {
        return coordinating_conjunctions().count(w) > 0 || subordinating_conjunctions().count(w) > 0 || w == "i";
    }

    void clamp(StoryShape& s) const {
        s.sentences = std::max(1, s.sentences);
        s.words = std::max(s.words, s.sentences);
        s.coordinators = std::max(0, s.coordinators);
        s.subordinators = std::max(0, s.subordinators);
        s.single_names = std::max(0, s.single_names);
        s.double_names = std::max(0, s.double_names);
        s.carriers = std::max(0, s.carriers);
        // Keep room for one leading content token per sentence and one spacer per unit.
        int budget = s.words - s.sentences;
        auto cost = [&] {
            return 2 * (s.coordinators + s.subordinators + s.single_names + s.carriers) + 3 * s.double_names;
        };
        while (cost() > budget) {
            if (s.carriers > 0) --s.carriers;
            else if (s.double_names > 0) --s.double_names;
            else if (s.single_names > 0) --s.single_names;
            else if (s.coordinators > 0) --s.coordinators;
            else if (s.subordinators > 0) --s.subordinators;
            else break;
        }
    }

    std::pair<std::pair<double, std::string>, std::pair<double, std::string>> carrier_pair(double age) const {
        if (carriers_.empty()) return {{0.0, "the"}, {0.0, "the"}};
        if (age <= carriers_.front().first) return {carriers_.front(), carriers_.front()};
        if (age >= carriers_.back().first) return {carriers_.back(), carriers_.back()};
        auto it = std::lower_bound(carriers_.begin(), carriers_.end(), std::make_pair(age, std::string()));
        return {*(it - 1), *it};
    }

    template <class T>
    static void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
    }

    static std::vector<int> assign_lengths(const std::vector<int>& counts, int chars) {
        int tokens = 0;
        for (int c : counts) tokens += c;
        int base = std::clamp(chars / std::max(tokens, 1), 2, 14);
        std::vector<int> lengths(counts.size(), base);
        int remaining = chars - base * tokens;
        for (std::size_t j = 0; j < counts.size() && remaining > 0; ++j) {
            if (base + 1 > 15) break;
            if (counts[j] <= remaining) {
                ++lengths[j];
                remaining -= counts[j];
            }
        }
        return lengths;
    }

    std::string fresh_word(std::mt19937_64& rng, int length, std::set<std::string>& used) const {
        static constexpr std::string_view cons = "bcdfghjklmnprstvwz";
        static constexpr std::string_view vow = "aeiou";
        for (int attempt = 0;; ++attempt) {
            std::string w;
            bool consonant = rng() % 2 == 0;
            for (int i = 0; i < length; ++i) {
                w += consonant ? cons[rng() % cons.size()] : vow[rng() % vow.size()];
                consonant = !consonant;
            }
            if (used.count(w) || lex_->find(w) || reserved(w) || w == "and" || w == "because") continue;
            used.insert(w);
            return w;
        }
    }

    std::string fresh_name(std::mt19937_64& rng, std::set<std::string>& used) const {
        std::string w = fresh_word(rng, 5, used);
        w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        return w;
    }

    const AoALexicon* lex_;
    std::vector<std::pair<double, std::string>> carriers_;
};

enum class MockMode { canned, scripted, compliant, defiant };

inline std::string_view to_string(MockMode m) {
    switch (m) {
    case MockMode::canned: return "canned";
    case MockMode::scripted: return "scripted";
    case MockMode::compliant: return "compliant";
    case MockMode::defiant: return "defiant";
    }
    return "canned";
}

struct MockResponse {
    std::string text;
    std::optional<std::string> error;
};

struct MockConfig {
    MockMode mode = MockMode::canned;
    std::string text;
    std::vector<MockResponse> responses;
    std::uint64_t seed = 1;
    /// Fraction of the gap to each directive target closed per rewrite.
    double compliance = 1.0;
};

inline MockConfig parse_mock_config(const nlohmann::json& j) {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::schema, "mock script: " + what); };
    if (!j.is_object() || !j.contains("mode") || !j["mode"].is_string()) fail("expected an object with a 'mode'");
    MockConfig c;
    auto mode = j["mode"].get<std::string>();
    if (mode == "canned") c.mode = MockMode::canned;
    else if (mode == "scripted") c.mode = MockMode::scripted;
    else if (mode == "compliant") c.mode = MockMode::compliant;
    else if (mode == "defiant") c.mode = MockMode::defiant;
    else fail("unknown mode '" + mode + "'");
    try {
        if (j.contains("text")) c.text = j["text"].get<std::string>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("compliance")) c.compliance = j["compliance"].get<double>();
        if (j.contains("responses")) {
            for (const auto& r : j["responses"]) {
                if (r.is_string()) c.responses.push_back({r.get<std::string>(), std::nullopt});
                else if (r.is_object() && r.contains("error")) c.responses.push_back({"", r["error"].get<std::string>()});
                else if (r.is_object() && r.contains("text")) c.responses.push_back({r["text"].get<std::string>(), std::nullopt});
                else fail("responses must be strings or {text}/{error} objects");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        fail(e.what());
    }
    if (c.mode == MockMode::canned && util::trim(c.text).empty()) fail("canned mode needs 'text'");
    if (c.mode == MockMode::scripted && c.responses.empty()) fail("scripted mode needs 'responses'");
    if (!(c.compliance > 0.0 && c.compliance <= 1.0)) fail("compliance must lie in (0, 1]");
    return c;
}

/// Directives recovered from a rewrite prompt.
struct ParsedRewrite {
    std::string story;
    /// flag -> target mean; nullopt for hold directives.
    std::map<FlagId, std::optional<double>> directives;
};

/// Reads verbalized directive lines and the STORY section back out of a
/// rewrite prompt. Returns nullopt for anything that is not a rewrite.
inline std::optional<ParsedRewrite> parse_rewrite_prompt(const std::string& prompt) {
    auto marker = prompt.rfind("STORY:");
    if (marker == std::string::npos) return std::nullopt;
    static const std::regex move_re(R"(^(Increase|Decrease) the (.+) of the story from (-?[0-9.]+) toward (-?[0-9.]+)\.$)");
    static const std::regex hold_re(R"(^Keep the (.+) of the story unchanged\.$)");
    std::map<std::string, FlagId> by_name;
    for (const auto& f : kFlagTable) by_name[std::string(f.display_name)] = std::string(f.id);

    ParsedRewrite out;
    out.story = std::string(util::trim(std::string_view(prompt).substr(marker + 6)));
    for (const auto& line : util::split_lines(std::string_view(prompt).substr(0, marker))) {
        std::smatch m;
        std::string l(util::trim(line));
        if (std::regex_match(l, m, move_re)) {
            auto it = by_name.find(m[2].str());
            if (it != by_name.end()) out.directives[it->second] = std::stod(m[4].str());
        } else if (std::regex_match(l, m, hold_re)) {
            auto it = by_name.find(m[1].str());
            if (it != by_name.end()) out.directives[it->second] = std::nullopt;
        }
    }
    if (out.story.empty()) return std::nullopt;
    return out;
}

class MockBackend : public Backend {
public:
    explicit MockBackend(MockConfig config, const AoALexicon& lex = AoALexicon::bundled())
        : config_(std::move(config)), synth_(lex) {}

    MockBackend(MockBackend&& other) noexcept
        : config_(std::move(other.config_)), synth_(other.synth_), calls_(other.calls_.load()) {}

    static MockBackend canned(std::string text) {
        MockConfig c;
        c.mode = MockMode::canned;
        c.text = std::move(text);
        return MockBackend(std::move(c));
    }

    static MockBackend compliant(std::uint64_t seed = 1, double compliance = 1.0) {
        MockConfig c;
        c.mode = MockMode::compliant;
        c.seed = seed;
        c.compliance = compliance;
        return MockBackend(std::move(c));
    }

    static MockBackend defiant(std::uint64_t seed = 1) {
        MockConfig c;
        c.mode = MockMode::defiant;
        c.seed = seed;
        return MockBackend(std::move(c));
    }

    static MockConfig load_config(const std::filesystem::path& path) {
        std::string text = util::read_file(path);
        try {
            return parse_mock_config(nlohmann::json::parse(text));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::parse, path.string() + ": " + e.what());
        }
    }

    Completion generate(const std::string& prompt, const DecodingConfig& decoding) override {
        std::size_t index = calls_.fetch_add(1);
        switch (config_.mode) {
        case MockMode::canned: return {config_.text, 0.0};
        case MockMode::scripted: {
            if (index >= config_.responses.size()) {
                throw Error(ErrorCode::backend, "mock script has no response for call " + std::to_string(index));
            }
            const auto& r = config_.responses[index];
            if (r.error) throw Error(ErrorCode::backend, *r.error);
            return {r.text, 0.0};
        }
        case MockMode::compliant:
        case MockMode::defiant: break;
        }
        if (auto rw = parse_rewrite_prompt(prompt)) {
            if (config_.mode == MockMode::defiant) return {rw->story, 0.0};
            return {rewrite(*rw, decoding), 0.0};
        }
        std::uint64_t h = util::fnv1a(prompt, 0xcbf29ce484222325ULL ^ config_.seed);
        auto shape = synth_.draft(h, decoding.min_new_tokens, decoding.max_new_tokens);
        return {synth_.render(shape, h), 0.0};
    }

    std::string name() const override { return "mock:" + std::string(to_string(config_.mode)); }
    std::size_t calls() const { return calls_.load(); }
    const MockConfig& config() const { return config_; }

private:
    std::string rewrite(const ParsedRewrite& rw, const DecodingConfig& decoding) const {
        if (rw.directives.empty()) return rw.story;
        std::vector<FlagId> ids;
        for (const auto& [f, _] : rw.directives) ids.push_back(f);
        FeatureVector current = extract_profile(rw.story, ids, synth_.lexicon());
        std::map<FlagId, double> target;
        bool any_move = false;
        for (const auto& [f, t] : rw.directives) {
            double cur = current.at(f);
            target[f] = t ? cur + config_.compliance * (*t - cur) : cur;
            any_move = any_move || t.has_value();
        }
        if (!any_move) return rw.story;
        auto shape = synth_.solve(target, decoding.max_new_tokens, decoding.min_new_tokens);
        return synth_.render(shape, util::fnv1a(rw.story, config_.seed));
    }

    MockConfig config_;
    StorySynthesizer synth_;
    std::atomic<std::size_t> calls_{0};
};

}  // namespace standardize
