// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "standardize/artifacts.hpp"
#include "standardize/backend.hpp"
#include "standardize/mock_backend.hpp"
#include "test_support.hpp"

using namespace standardize;
namespace ts = testsupport;

namespace {

std::string words(int n, const std::string& w = "word") {
    std::string out;
    for (int i = 0; i < n; ++i) out += (i ? " " : "") + w;
    return out + ".";
}

DecodingConfig window(int lo, int hi) {
    DecodingConfig d;
    d.min_new_tokens = lo;
    d.max_new_tokens = hi;
    return d;
}

MockBackend scripted(std::vector<MockResponse> rs) {
    MockConfig c;
    c.mode = MockMode::scripted;
    c.responses = std::move(rs);
    return MockBackend(std::move(c));
}

}  // namespace

TEST(WordCount, Basics) {
    EXPECT_EQ(word_count(""), 0u);
    EXPECT_EQ(word_count("   \n"), 0u);
    EXPECT_EQ(word_count("The cat sat. It ran away!"), 6u);
}

TEST(Truncate, PrefersWholeSentences) {
    std::string text = "One two three. Four five six. Seven eight nine.";
    EXPECT_EQ(truncate_words(text, 9), text);
    EXPECT_EQ(truncate_words(text, 7), "One two three. Four five six.");
    EXPECT_EQ(truncate_words(text, 3), "One two three.");
    EXPECT_EQ(truncate_words("Alpha beta gamma delta epsilon.", 2), "Alpha beta");
}

TEST(Complete, WithinWindowPassesThrough) {
    auto b = MockBackend::canned(words(40));
    auto r = complete("p", window(30, 300), b);
    EXPECT_EQ(r.attempts, 1);
    EXPECT_EQ(r.text, words(40));
    EXPECT_EQ(r.elapsed_ms, 0.0);
}

TEST(Complete, LongResponsesAreTruncated) {
    auto b = MockBackend::canned(words(400));
    auto r = complete("p", window(30, 300), b);
    EXPECT_EQ(word_count(r.text), 300u);
    EXPECT_EQ(word_count(r.raw_response), 400u);
}

TEST(Complete, ShortResponsesAreRegenerated) {
    auto b = scripted({{words(5), std::nullopt}, {words(50), std::nullopt}});
    auto r = complete("p", window(30, 300), b);
    EXPECT_EQ(r.attempts, 2);
    EXPECT_EQ(word_count(r.text), 50u);
}

TEST(Complete, PersistentShortnessIsExhausted) {
    auto b = MockBackend::canned(words(5));
    try {
        complete("p", window(30, 300), b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::length_enforcement_exhausted);
    }
    EXPECT_EQ(b.calls(), 3u);
}

TEST(Complete, InvalidDecodingIsRejected) {
    auto b = MockBackend::canned(words(40));
    EXPECT_THROW(complete("p", window(0, 10), b), Error);
    EXPECT_THROW(complete("p", window(20, 10), b), Error);
    auto d = window(1, 10);
    d.top_p = 0.0;
    EXPECT_THROW(complete("p", d, b), Error);
}

TEST(DecodingConfig, JsonRoundTrip) {
    DecodingConfig d;
    d.temperature = 0.7;
    nlohmann::ordered_json j = d;
    EXPECT_EQ(j.get<DecodingConfig>(), d);
    DecodingConfig none;
    nlohmann::ordered_json jn = none;
    EXPECT_TRUE(jn["temperature"].is_null());
    EXPECT_EQ(jn.get<DecodingConfig>(), none);
}

TEST(MockBackend, ScriptedErrorsRaise) {
    auto b = scripted({{"", std::string("boom")}});
    try {
        b.generate("p", DecodingConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::backend);
    }
    EXPECT_THROW(b.generate("p", DecodingConfig{}), Error);
}

TEST(MockBackend, CompliantIsDeterministicPerSeed) {
    auto a = MockBackend::compliant(3), b = MockBackend::compliant(3), c = MockBackend::compliant(4);
    DecodingConfig d;
    EXPECT_EQ(a.generate("Write a story.", d).text, b.generate("Write a story.", d).text);
    EXPECT_NE(a.generate("Write a story.", d).text, c.generate("Write a story.", d).text);
    auto n = word_count(a.generate("Another prompt.", d).text);
    EXPECT_GE(n, 30u);
    EXPECT_LE(n, 300u);
    EXPECT_EQ(a.name(), "mock:compliant");
}

TEST(MockBackend, CompliantMovesTowardTargets) {
    auto b = MockBackend::compliant(1);
    DecodingConfig d;
    std::string story = b.generate("Write a story.", d).text;
    std::vector<FlagId> ids{"avg_sentence_length", "root_ttr", "coord_conj_density"};
    auto before = extract_profile(story, ids);
    std::map<FlagId, double> target{{"avg_sentence_length", 14.0}, {"root_ttr", 6.0}, {"coord_conj_density", 1.0}};
    std::vector<SignalDirective> ds;
    for (const auto& f : ids) {
        ds.push_back({f, before.at(f), target[f], 1.0, direction_for(before.at(f), target[f], 1.0)});
    }
    auto after = extract_profile(b.generate(build_rewrite_prompt(story, ds).text, d).text, ids);
    for (const auto& f : ids) {
        EXPECT_LE(std::abs(after.at(f) - target[f]), std::abs(before.at(f) - target[f]) + 1e-9) << f;
        EXPECT_NEAR(after.at(f), target[f], 0.1 * std::abs(target[f]) + 0.05) << f;
    }
}

TEST(MockBackend, DefiantReturnsStoryUnchanged) {
    auto b = MockBackend::defiant(1);
    std::string story = "Tom ran home. It was late and dark.";
    std::vector<SignalDirective> ds{{"avg_sentence_length", 4.0, 12.0, 1.0, Direction::increase}};
    EXPECT_EQ(b.generate(build_rewrite_prompt(story, ds).text, DecodingConfig{}).text, story);
}

TEST(MockConfig, ParsingAndErrors) {
    auto c = parse_mock_config(nlohmann::json::parse(
        R"({"mode": "scripted", "responses": ["one", {"text": "two"}, {"error": "x"}], "seed": 9})"));
    EXPECT_EQ(c.mode, MockMode::scripted);
    ASSERT_EQ(c.responses.size(), 3u);
    EXPECT_EQ(c.responses[1].text, "two");
    EXPECT_TRUE(c.responses[2].error.has_value());
    EXPECT_EQ(c.seed, 9u);
    for (const char* bad : {R"([])", R"({"mode": "psychic"})", R"({"mode": "canned"})", R"({"mode": "scripted"})",
                            R"({"mode": "compliant", "compliance": 0})", R"({"mode": "scripted", "responses": [1]})"}) {
        try {
            parse_mock_config(nlohmann::json::parse(bad));
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::schema) << bad;
        }
    }
}

TEST(MockConfig, LoadFromFile) {
    ts::TempDir dir("mock");
    util::write_file(dir / "m.json", R"({"mode": "canned", "text": "Hello there."})");
    EXPECT_EQ(MockBackend::load_config(dir / "m.json").text, "Hello there.");
    util::write_file(dir / "bad.json", "{");
    try {
        MockBackend::load_config(dir / "bad.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::parse);
    }
}

TEST(ParseRewritePrompt, RecoversDirectivesAndStory) {
    std::string story = "Tom ran home. It was late.";
    std::vector<SignalDirective> ds{{"avg_sentence_length", 3.0, 10.25, 2.0, Direction::increase},
                                    {"ari", 9.0, -1.5, 0.4, Direction::decrease},
                                    {"ttr", 0.5, 0.5, 0.1, Direction::hold}};
    auto parsed = parse_rewrite_prompt(build_rewrite_prompt(story, ds).text);
    ASSERT_TRUE(parsed.has_value());
    EXPECT_EQ(parsed->story, story);
    ASSERT_EQ(parsed->directives.size(), 3u);
    EXPECT_DOUBLE_EQ(*parsed->directives.at("avg_sentence_length"), 10.25);
    EXPECT_DOUBLE_EQ(*parsed->directives.at("ari"), -1.5);
    EXPECT_FALSE(parsed->directives.at("ttr").has_value());
    EXPECT_FALSE(parse_rewrite_prompt("Write a story for B1 readers. THEME: owls").has_value());
}
