// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

// Linguistic flags computed from raw text: segmentation, lexical diversity,
// readability, length statistics, conjunction densities, age-of-acquisition
// and capitalization-based entity densities.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "standardize/bundled_data.hpp"
#include "standardize/error.hpp"
#include "standardize/util.hpp"

namespace standardize {

using FlagId = std::string;

namespace flags {
inline constexpr std::string_view ari = "ari";
inline constexpr std::string_view ttr = "ttr";
inline constexpr std::string_view root_ttr = "root_ttr";
inline constexpr std::string_view total_words = "total_words";
inline constexpr std::string_view total_sentences = "total_sentences";
inline constexpr std::string_view avg_sentence_length = "avg_sentence_length";
inline constexpr std::string_view avg_word_length = "avg_word_length";
inline constexpr std::string_view coord_conj_density = "coord_conj_density";
inline constexpr std::string_view subord_conj_density = "subord_conj_density";
inline constexpr std::string_view aoa_mean = "aoa_mean";
inline constexpr std::string_view aoa_coverage = "aoa_coverage";
inline constexpr std::string_view entity_density = "entity_density";
inline constexpr std::string_view proper_noun_density = "proper_noun_density";
}  // namespace flags

struct FlagInfo {
    std::string_view id;
    /// Reader-facing name used when instructions are verbalized.
    std::string_view display_name;
};

inline constexpr std::array<FlagInfo, 13> kFlagTable{{
    {flags::ari, "readability grade (Automated Readability Index)"},
    {flags::ttr, "simple type-token ratio"},
    {flags::root_ttr, "vocabulary diversity (type-token ratio)"},
    {flags::total_words, "total word count"},
    {flags::total_sentences, "total sentence count"},
    {flags::avg_sentence_length, "average sentence length (words per sentence)"},
    {flags::avg_word_length, "average word length (characters per word)"},
    {flags::coord_conj_density, "number of coordinating conjunctions per sentence"},
    {flags::subord_conj_density, "number of subordinating conjunctions per sentence"},
    {flags::aoa_mean, "average age-of-acquisition of the words"},
    {flags::aoa_coverage, "share of words with a known age-of-acquisition"},
    {flags::entity_density, "number of named entities per sentence"},
    {flags::proper_noun_density, "proper noun density"},
}};

inline std::vector<FlagId> supported_flags() {
    std::vector<FlagId> out;
    for (const auto& f : kFlagTable) out.emplace_back(f.id);
    return out;
}

inline bool is_supported_flag(std::string_view id) {
    return std::any_of(kFlagTable.begin(), kFlagTable.end(),
                       [&](const FlagInfo& f) { return f.id == id; });
}

inline const FlagInfo& flag_info(std::string_view id) {
    for (const auto& f : kFlagTable) {
        if (f.id == id) return f;
    }
    throw Error(ErrorCode::unknown_flag, "unknown flag '" + std::string(id) + "'", supported_flags());
}

// ---------------------------------------------------------------------------
// Segmentation

struct TokenSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct TokenizedText {
    std::string raw;
    std::vector<std::vector<std::string>> sentences;
    /// Byte offsets into `raw`, parallel to `sentences`.
    std::vector<std::vector<TokenSpan>> spans;

    std::size_t sentence_count() const { return sentences.size(); }
    std::size_t token_count() const {
        std::size_t n = 0;
        for (const auto& s : sentences) n += s.size();
        return n;
    }
    std::vector<std::string> tokens() const {
        std::vector<std::string> out;
        out.reserve(token_count());
        for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
        return out;
    }
};

namespace detail {

enum class CharClass { word, space, joiner, terminal, closer, other };

struct Decoded {
    char32_t cp;
    std::size_t len;
};

inline Decoded decode_utf8(std::string_view s, std::size_t i) {
    auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return {b0, 1};
    std::size_t len = (b0 >= 0xF0) ? 4 : (b0 >= 0xE0) ? 3 : (b0 >= 0xC0) ? 2 : 1;
    if (len == 1 || i + len > s.size()) return {b0, 1};
    char32_t cp = b0 & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k) {
        auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return {b0, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len};
}

inline CharClass classify(char32_t cp) {
    if (cp < 0x80) {
        auto c = static_cast<char>(cp);
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')) return CharClass::word;
        if (util::is_space(c)) return CharClass::space;
        if (c == '\'' || c == '-') return CharClass::joiner;
        if (c == '.' || c == '!' || c == '?') return CharClass::terminal;
        if (c == '"' || c == ')' || c == ']' || c == '}') return CharClass::closer;
        return CharClass::other;
    }
    switch (cp) {
    case 0x00A0: case 0x2002: case 0x2003: case 0x2009: case 0x200B: case 0x3000:
        return CharClass::space;
    case 0x2019: case 0x2010: case 0x2011:
        return CharClass::joiner;
    case 0x2026:
        return CharClass::terminal;
    case 0x201D: case 0x00BB:
        return CharClass::closer;
    case 0x2018: case 0x201C: case 0x2013: case 0x2014: case 0x00AB: case 0x00BF: case 0x00A1:
    case 0x00B7: case 0x2022:
        return CharClass::other;
    default:
        return CharClass::word;
    }
}

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace detail

/// Sentence and token splitter. Sentences end on runs of . ! ? (and the
/// ellipsis character); a period closes a sentence only when it is followed
/// by whitespace, a closing quote/bracket or end of text, and the chunk it
/// terminates is not a listed abbreviation or a single-capital initial.
class Segmenter {
public:
    Segmenter() : Segmenter(util::parse_word_list(bundled::abbreviations_txt)) {}

    explicit Segmenter(const std::vector<std::string>& abbreviations) {
        for (const auto& a : abbreviations) abbreviations_.insert(util::to_lower(a));
    }

    static Segmenter from_file(const std::filesystem::path& path) {
        return Segmenter(util::parse_word_list(util::read_file(path)));
    }

    TokenizedText segment(std::string_view text) const {
        if (util::trim(text).empty()) {
            throw Error(ErrorCode::empty_text, "text is empty");
        }
        TokenizedText out;
        out.raw = std::string(text);
        const std::string& s = out.raw;

        std::vector<std::string> sentence;
        std::vector<TokenSpan> spans;
        auto flush = [&] {
            if (!sentence.empty()) {
                out.sentences.push_back(std::move(sentence));
                out.spans.push_back(std::move(spans));
            }
            sentence.clear();
            spans.clear();
        };

        std::size_t i = 0;
        while (i < s.size()) {
            auto d = detail::decode_utf8(s, i);
            auto cls = detail::classify(d.cp);
            if (cls == detail::CharClass::word) {
                std::size_t end = scan_token(s, i);
                sentence.push_back(s.substr(i, end - i));
                spans.push_back({i, end});
                i = end;
                continue;
            }
            if (cls == detail::CharClass::terminal) {
                std::size_t end = i;
                bool has_bang = false;
                while (end < s.size()) {
                    auto dd = detail::decode_utf8(s, end);
                    if (detail::classify(dd.cp) != detail::CharClass::terminal) break;
                    if (dd.cp != U'.') has_bang = true;
                    end += dd.len;
                }
                std::size_t after = end;
                while (after < s.size()) {
                    auto dd = detail::decode_utf8(s, after);
                    auto c = detail::classify(dd.cp);
                    if (c != detail::CharClass::closer && dd.cp != U'\'' && dd.cp != 0x2019) break;
                    after += dd.len;
                }
                bool at_boundary = after >= s.size() || detail::classify(detail::decode_utf8(s, after).cp) == detail::CharClass::space;
                bool single_period = !has_bang && end - i == 1;
                if (at_boundary && !(single_period && is_abbreviation(s, i))) {
                    flush();
                }
                i = after > end ? after : end;
                continue;
            }
            i += d.len;
        }
        flush();
        if (out.sentences.empty()) {
            throw Error(ErrorCode::empty_text, "text contains no word tokens");
        }
        return out;
    }

private:
    // A token is a run of word characters; apostrophes and hyphens stay inside
    // when flanked by word characters, as do '.' and ',' between digits.
    static std::size_t scan_token(const std::string& s, std::size_t i) {
        std::size_t end = i;
        while (end < s.size()) {
            auto d = detail::decode_utf8(s, end);
            auto cls = detail::classify(d.cp);
            if (cls == detail::CharClass::word) {
                end += d.len;
                continue;
            }
            std::size_t next = end + d.len;
            if (next >= s.size()) break;
            auto nd = detail::decode_utf8(s, next);
            bool next_word = detail::classify(nd.cp) == detail::CharClass::word;
            if (cls == detail::CharClass::joiner && next_word) {
                end = next;
                continue;
            }
            if ((d.cp == U'.' || d.cp == U',') && detail::is_digit(s[end - 1]) && detail::is_digit(s[next])) {
                end = next;
                continue;
            }
            break;
        }
        return end;
    }

    bool is_abbreviation(const std::string& s, std::size_t period) const {
        std::size_t start = period;
        while (start > 0 && !util::is_space(s[start - 1])) --start;
        std::string chunk = s.substr(start, period + 1 - start);
        while (!chunk.empty() && (chunk.front() == '(' || chunk.front() == '"' || chunk.front() == '\'' ||
                                  chunk.front() == '[')) {
            chunk.erase(0, 1);
        }
        if (chunk.size() == 2 && chunk[0] >= 'A' && chunk[0] <= 'Z') return true;
        return abbreviations_.count(util::to_lower(chunk)) > 0;
    }

    std::unordered_set<std::string> abbreviations_;
};

inline const Segmenter& default_segmenter() {
    static const Segmenter instance;
    return instance;
}

inline TokenizedText segment(std::string_view text) { return default_segmenter().segment(text); }

// ---------------------------------------------------------------------------
// Per-flag computations

inline void require_tokens(const TokenizedText& t) {
    if (t.token_count() == 0 || t.sentence_count() == 0) {
        throw Error(ErrorCode::empty_text, "tokenized text has no tokens");
    }
}

inline std::size_t type_count(const TokenizedText& t) {
    std::unordered_set<std::string> types;
    for (const auto& s : t.sentences) {
        for (const auto& tok : s) types.insert(util::to_lower(tok));
    }
    return types.size();
}

inline double ttr(const TokenizedText& t) {
    require_tokens(t);
    return static_cast<double>(type_count(t)) / static_cast<double>(t.token_count());
}

inline double root_ttr(const TokenizedText& t) {
    require_tokens(t);
    return static_cast<double>(type_count(t)) / std::sqrt(static_cast<double>(t.token_count()));
}

/// Alphanumeric characters in a token; each non-ASCII code point counts once.
inline std::size_t alnum_chars(std::string_view token) {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < token.size()) {
        auto d = detail::decode_utf8(token, i);
        if (detail::classify(d.cp) == detail::CharClass::word) ++n;
        i += d.len;
    }
    return n;
}

struct LengthStats {
    std::size_t total_sentences = 0;
    std::size_t total_words = 0;
    std::size_t total_chars = 0;
    double avg_sentence_length = 0.0;
    double avg_word_length = 0.0;
};

inline LengthStats length_stats(const TokenizedText& t) {
    require_tokens(t);
    LengthStats out;
    out.total_sentences = t.sentence_count();
    out.total_words = t.token_count();
    for (const auto& s : t.sentences) {
        for (const auto& tok : s) out.total_chars += alnum_chars(tok);
    }
    out.avg_sentence_length = static_cast<double>(out.total_words) / static_cast<double>(out.total_sentences);
    out.avg_word_length = static_cast<double>(out.total_chars) / static_cast<double>(out.total_words);
    return out;
}

/// Automated Readability Index from raw counts.
inline double ari_from_counts(double chars, double words, double sentences) {
    return 4.71 * (chars / words) + 0.5 * (words / sentences) - 21.43;
}

inline double ari(const TokenizedText& t) {
    auto ls = length_stats(t);
    return ari_from_counts(static_cast<double>(ls.total_chars), static_cast<double>(ls.total_words),
                           static_cast<double>(ls.total_sentences));
}

enum class ConjunctionKind { coordinating, subordinating };

inline ConjunctionKind parse_conjunction_kind(std::string_view name) {
    if (name == "coordinating") return ConjunctionKind::coordinating;
    if (name == "subordinating") return ConjunctionKind::subordinating;
    throw Error(ErrorCode::invalid_argument, "unknown conjunction kind '" + std::string(name) + "'",
                {"coordinating", "subordinating"});
}

inline const std::unordered_set<std::string>& coordinating_conjunctions() {
    static const std::unordered_set<std::string> words{"and", "but", "or", "nor", "for", "so", "yet"};
    return words;
}

inline const std::unordered_set<std::string>& subordinating_conjunctions() {
    static const std::unordered_set<std::string> words = [] {
        auto list = util::parse_word_list(bundled::subordinating_txt);
        return std::unordered_set<std::string>(list.begin(), list.end());
    }();
    return words;
}

inline std::size_t conjunction_count(const TokenizedText& t, ConjunctionKind kind) {
    const auto& list = kind == ConjunctionKind::coordinating ? coordinating_conjunctions()
                                                             : subordinating_conjunctions();
    std::size_t n = 0;
    for (const auto& s : t.sentences) {
        for (const auto& tok : s) n += list.count(util::to_lower(tok));
    }
    return n;
}

inline double conjunction_density(const TokenizedText& t, ConjunctionKind kind) {
    require_tokens(t);
    return static_cast<double>(conjunction_count(t, kind)) / static_cast<double>(t.sentence_count());
}

// ---------------------------------------------------------------------------
// Age of acquisition

class AoALexicon {
public:
    AoALexicon(std::unordered_map<std::string, double> entries, std::string source)
        : entries_(std::move(entries)), source_(std::move(source)) {
        if (entries_.empty()) {
            throw Error(ErrorCode::schema, "age-of-acquisition lexicon is empty (" + source_ + ")");
        }
    }

    /// word<TAB>age per line; '#' starts a comment line.
    static AoALexicon parse_tsv(std::string_view text, std::string source) {
        std::unordered_map<std::string, double> entries;
        std::size_t line_no = 0;
        for (const auto& line : util::split_lines(text)) {
            ++line_no;
            auto t = util::trim(line);
            if (t.empty() || t.front() == '#') continue;
            auto tab = t.find('\t');
            if (tab == std::string_view::npos) {
                throw Error(ErrorCode::parse, source + ":" + std::to_string(line_no) + ": expected word<TAB>age");
            }
            std::string word = util::to_lower(util::trim(t.substr(0, tab)));
            std::string age_text(util::trim(t.substr(tab + 1)));
            double age = 0.0;
            try {
                std::size_t used = 0;
                age = std::stod(age_text, &used);
                if (used != age_text.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw Error(ErrorCode::parse, source + ":" + std::to_string(line_no) + ": bad age '" + age_text + "'");
            }
            if (word.empty() || !(age > 0.0 && age < 25.0)) {
                throw Error(ErrorCode::schema,
                            source + ":" + std::to_string(line_no) + ": age must lie in (0, 25) for a non-empty word");
            }
            entries[word] = age;
        }
        return AoALexicon(std::move(entries), std::move(source));
    }

    static AoALexicon load(const std::filesystem::path& path) {
        return parse_tsv(util::read_file(path), path.string());
    }

    static const AoALexicon& bundled() {
        static const AoALexicon lex = parse_tsv(bundled::aoa_sample_tsv, "bundled:aoa_sample.tsv");
        return lex;
    }

    const double* find(std::string_view lowercase_word) const {
        auto it = entries_.find(std::string(lowercase_word));
        return it == entries_.end() ? nullptr : &it->second;
    }

    const std::unordered_map<std::string, double>& entries() const { return entries_; }
    const std::string& source() const { return source_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::unordered_map<std::string, double> entries_;
    std::string source_;
};

struct AoAStats {
    double mean_aoa = 0.0;
    double coverage = 0.0;
};

inline AoAStats aoa_density(const TokenizedText& t, const AoALexicon& lex) {
    require_tokens(t);
    double sum = 0.0;
    std::size_t covered = 0;
    for (const auto& s : t.sentences) {
        for (const auto& tok : s) {
            if (const double* age = lex.find(util::to_lower(tok))) {
                sum += *age;
                ++covered;
            }
        }
    }
    if (covered == 0) return {};
    return {sum / static_cast<double>(covered), static_cast<double>(covered) / static_cast<double>(t.token_count())};
}

// ---------------------------------------------------------------------------
// Entities (capitalization heuristic)

struct EntityCounts {
    std::size_t entity_tokens = 0;
    /// Runs of adjacent entity tokens separated only by whitespace.
    std::size_t entities = 0;
};

namespace detail {

inline bool capitalized(std::string_view tok) {
    if (tok.empty() || !(tok[0] >= 'A' && tok[0] <= 'Z')) return false;
    // The pronoun "I" and its contractions are not names.
    if (tok == "I") return false;
    if (tok.size() > 1 && (tok.substr(0, 2) == "I'" || util::starts_with_ci(tok, "I\xE2\x80\x99"))) return false;
    return true;
}

}  // namespace detail

/// Per-sentence flags marking entity tokens. A token is an entity when it
/// is capitalized and not sentence-initial, or sentence-initial and
/// capitalized with the same form also appearing capitalized mid-sentence.
inline std::vector<std::vector<bool>> entity_mask(const TokenizedText& t) {
    std::unordered_set<std::string> mid_caps;
    for (const auto& s : t.sentences) {
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (detail::capitalized(s[i])) mid_caps.insert(s[i]);
        }
    }
    std::vector<std::vector<bool>> mask;
    mask.reserve(t.sentences.size());
    for (const auto& s : t.sentences) {
        std::vector<bool> m(s.size(), false);
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!detail::capitalized(s[i])) continue;
            m[i] = i > 0 || mid_caps.count(s[i]) > 0;
        }
        mask.push_back(std::move(m));
    }
    return mask;
}

inline EntityCounts entity_counts(const TokenizedText& t) {
    EntityCounts out;
    auto mask = entity_mask(t);
    for (std::size_t si = 0; si < t.sentences.size(); ++si) {
        const auto& m = mask[si];
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (!m[i]) continue;
            ++out.entity_tokens;
            bool continues = false;
            if (i > 0 && m[i - 1]) {
                const auto& prev = t.spans[si][i - 1];
                const auto& cur = t.spans[si][i];
                std::string_view gap(t.raw.data() + prev.end, cur.begin - prev.end);
                continues = util::trim(gap).empty();
            }
            if (!continues) ++out.entities;
        }
    }
    return out;
}

inline double entity_density(const TokenizedText& t) {
    require_tokens(t);
    return static_cast<double>(entity_counts(t).entities) / static_cast<double>(t.sentence_count());
}

inline double proper_noun_density(const TokenizedText& t) {
    require_tokens(t);
    return static_cast<double>(entity_counts(t).entity_tokens) / static_cast<double>(t.token_count());
}

// ---------------------------------------------------------------------------
// Feature vectors

struct FeatureVector {
    std::map<FlagId, double> values;
    std::size_t token_count = 0;
    std::size_t sentence_count = 0;

    bool contains(std::string_view flag) const { return values.count(std::string(flag)) > 0; }

    double at(std::string_view flag) const {
        auto it = values.find(std::string(flag));
        if (it == values.end()) {
            throw Error(ErrorCode::missing_flag, "feature vector has no value for '" + std::string(flag) + "'");
        }
        return it->second;
    }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

inline void to_json(nlohmann::ordered_json& j, const FeatureVector& v) {
    nlohmann::ordered_json values = nlohmann::ordered_json::object();
    for (const auto& [k, x] : v.values) values[k] = x;
    j = nlohmann::ordered_json{{"values", values}, {"token_count", v.token_count}, {"sentence_count", v.sentence_count}};
}

inline void from_json(const nlohmann::ordered_json& j, FeatureVector& v) {
    v.values.clear();
    for (const auto& [k, x] : j.at("values").items()) v.values[k] = x.get<double>();
    v.token_count = j.at("token_count").get<std::size_t>();
    v.sentence_count = j.at("sentence_count").get<std::size_t>();
}

inline double compute_flag(const TokenizedText& t, std::string_view flag, const AoALexicon& lex) {
    if (flag == flags::ari) return ari(t);
    if (flag == flags::ttr) return ttr(t);
    if (flag == flags::root_ttr) return root_ttr(t);
    if (flag == flags::total_words) return static_cast<double>(t.token_count());
    if (flag == flags::total_sentences) return static_cast<double>(t.sentence_count());
    if (flag == flags::avg_sentence_length) return length_stats(t).avg_sentence_length;
    if (flag == flags::avg_word_length) return length_stats(t).avg_word_length;
    if (flag == flags::coord_conj_density) return conjunction_density(t, ConjunctionKind::coordinating);
    if (flag == flags::subord_conj_density) return conjunction_density(t, ConjunctionKind::subordinating);
    if (flag == flags::aoa_mean) return aoa_density(t, lex).mean_aoa;
    if (flag == flags::aoa_coverage) return aoa_density(t, lex).coverage;
    if (flag == flags::entity_density) return entity_density(t);
    if (flag == flags::proper_noun_density) return proper_noun_density(t);
    throw Error(ErrorCode::unknown_flag, "unknown flag '" + std::string(flag) + "'", supported_flags());
}

inline void validate_flags(const std::vector<FlagId>& flag_ids) {
    for (const auto& f : flag_ids) {
        if (!is_supported_flag(f)) {
            throw Error(ErrorCode::unknown_flag, "unknown flag '" + f + "'", supported_flags());
        }
    }
}

inline FeatureVector extract_profile(const TokenizedText& t, const std::vector<FlagId>& flag_ids,
                                     const AoALexicon& lex) {
    validate_flags(flag_ids);
    require_tokens(t);
    FeatureVector out;
    out.token_count = t.token_count();
    out.sentence_count = t.sentence_count();
    for (const auto& f : flag_ids) out.values[f] = compute_flag(t, f, lex);
    return out;
}

inline FeatureVector extract_profile(std::string_view text, const std::vector<FlagId>& flag_ids,
                                     const AoALexicon& lex = AoALexicon::bundled()) {
    validate_flags(flag_ids);
    return extract_profile(segment(text), flag_ids, lex);
}

}  // namespace standardize
