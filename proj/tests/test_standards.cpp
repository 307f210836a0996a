// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include <gtest/gtest.h>

#include "standardize/standards.hpp"
#include "test_support.hpp"

using namespace standardize;
namespace ts = testsupport;

namespace {

const Registry& registry() {
    static const Registry r = Registry::bundled();
    return r;
}

nlohmann::ordered_json minimal_standard() {
    return nlohmann::ordered_json::parse(R"({
        "id": "toy", "name": "Toy", "levels": ["L1", "L2", "L3"],
        "aspects": [{"id": "a", "name": "A", "descriptors": {"L1": "one", "L2": "two", "L3": "three"}, "flags": ["ttr"]}],
        "exemplars": {"L1": [{"title": "T", "author": "U"}]}
    })");
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::io;
}

}  // namespace

TEST(Standards, BundledCefrShape) {
    const auto& cefr = registry().get("cefr");
    EXPECT_EQ(cefr.levels, (std::vector<LevelId>{"A2", "B1", "B2", "C1", "C2"}));
    ASSERT_EQ(cefr.aspects.size(), 3u);
    EXPECT_EQ(cefr.aspects[0].name, "Meaning / Purpose");
    EXPECT_EQ(cefr.aspects[1].name, "Organisation / Structure");
    EXPECT_EQ(cefr.aspects[2].name, "Grammatical Complexity");
}

TEST(Standards, BundledCcsShape) {
    const auto& ccs = registry().get("ccs");
    EXPECT_EQ(ccs.levels, (std::vector<LevelId>{"grade4-8", "grade9-12"}));
    ASSERT_EQ(ccs.aspects.size(), 3u);
    for (const auto& a : ccs.aspects) {
        ASSERT_EQ(a.descriptors.size(), 1u);
        EXPECT_EQ(a.descriptors.begin()->first, "*");
    }
}

TEST(Standards, RoundTripIsLossless) {
    for (const auto& s : registry().standards()) {
        auto text = serialize(s);
        auto back = parse_standard(text, "roundtrip");
        EXPECT_EQ(back, s) << s.id;
        EXPECT_EQ(serialize(back), text);
    }
}

TEST(Standards, LoadFromFileMatchesBundled) {
    EXPECT_EQ(load_standard(ts::data_dir() / "cefr.json"), registry().get("cefr"));
    EXPECT_EQ(load_standard(ts::data_dir() / "ccs.json"), registry().get("ccs"));
}

TEST(Standards, LookupCefrB1) {
    auto spec = lookup(registry().get("cefr"), "B1");
    ASSERT_EQ(spec.descriptors.size(), 3u);
    EXPECT_NE(spec.descriptors[1].text.find("can be long but not complex"), std::string::npos);
    ASSERT_FALSE(spec.exemplars.empty());
    EXPECT_EQ(spec.exemplars.front().citation(), "Frankenstein by Mary Shelley");
}

TEST(Standards, CcsDescriptorsAreLevelIndependent) {
    const auto& ccs = registry().get("ccs");
    auto a = lookup(ccs, "grade4-8"), b = lookup(ccs, "grade9-12");
    ASSERT_EQ(a.descriptors.size(), b.descriptors.size());
    for (std::size_t i = 0; i < a.descriptors.size(); ++i) EXPECT_EQ(a.descriptors[i].text, b.descriptors[i].text);
    EXPECT_NE(a.exemplars, b.exemplars);
}

TEST(Standards, LookupUnknownLevel) {
    EXPECT_EQ(code_of([] { lookup(registry().get("cefr"), "A1"); }), ErrorCode::unknown_level);
}

TEST(Standards, LookupIsTotal) {
    for (const auto& s : registry().standards()) {
        for (const auto& level : s.levels) {
            auto spec = lookup(s, level);
            EXPECT_EQ(spec.descriptors.size(), s.aspects.size());
            EXPECT_EQ(spec.flags, s.flag_ids());
            for (const auto& d : spec.descriptors) EXPECT_FALSE(d.text.empty());
        }
    }
}

TEST(Standards, LevelDistanceExamples) {
    const auto& cefr = registry().get("cefr");
    EXPECT_EQ(level_distance(cefr, "A2", "A2"), 0u);
    EXPECT_EQ(level_distance(cefr, "A2", "B1"), 1u);
    EXPECT_EQ(level_distance(cefr, "A2", "C2"), 4u);
    EXPECT_EQ(code_of([&] { level_distance(cefr, "A1", "A2"); }), ErrorCode::unknown_level);
}

TEST(Standards, LevelDistanceIsAMetric) {
    for (const auto& s : registry().standards()) {
        for (const auto& a : s.levels) {
            for (const auto& b : s.levels) {
                EXPECT_EQ(level_distance(s, a, b), level_distance(s, b, a));
                EXPECT_EQ(level_distance(s, a, b) == 0, a == b);
                for (const auto& c : s.levels) {
                    EXPECT_LE(level_distance(s, a, c), level_distance(s, a, b) + level_distance(s, b, c));
                }
            }
        }
    }
}

TEST(Standards, ExemplarLevelMustExist) {
    auto j = minimal_standard();
    j["exemplars"]["Z9"] = nlohmann::ordered_json::array({{{"title", "X"}, {"author", "Y"}}});
    EXPECT_EQ(code_of([&] { parse_standard(j); }), ErrorCode::schema);
}

TEST(Standards, SchemaViolationsNameTheField) {
    auto no_levels = minimal_standard();
    no_levels.erase("levels");
    try {
        parse_standard(no_levels);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::schema);
        EXPECT_NE(std::string(e.what()).find("levels"), std::string::npos);
    }

    auto dup = minimal_standard();
    dup["levels"] = {"L1", "L1"};
    EXPECT_EQ(code_of([&] { parse_standard(dup); }), ErrorCode::schema);

    auto empty_title = minimal_standard();
    empty_title["exemplars"]["L1"][0]["title"] = "";
    EXPECT_EQ(code_of([&] { parse_standard(empty_title); }), ErrorCode::schema);

    auto no_descriptors = minimal_standard();
    no_descriptors["aspects"][0]["descriptors"] = nlohmann::ordered_json::object();
    EXPECT_EQ(code_of([&] { parse_standard(no_descriptors); }), ErrorCode::schema);

    auto descriptor_level = minimal_standard();
    descriptor_level["aspects"][0]["descriptors"]["Q7"] = "x";
    EXPECT_EQ(code_of([&] { parse_standard(descriptor_level); }), ErrorCode::schema);
}

TEST(Standards, UnknownFlagIsRejected) {
    auto j = minimal_standard();
    j["aspects"][0]["flags"] = {"ttr", "sparkle"};
    EXPECT_EQ(code_of([&] { parse_standard(j); }), ErrorCode::unknown_flag);
    auto none = minimal_standard();
    none["aspects"][0]["flags"] = nlohmann::ordered_json::array();
    EXPECT_NE(code_of([&] { parse_standard(none); }), ErrorCode::io);
}

TEST(Standards, MalformedJsonIsAParseError) {
    EXPECT_EQ(code_of([] { parse_standard(std::string_view("{\"id\": "), "bad"); }), ErrorCode::parse);
}

TEST(Standards, WildcardCoversEveryLevel) {
    auto j = minimal_standard();
    j["aspects"][0]["descriptors"] = {{"*", "same everywhere"}};
    auto s = parse_standard(j);
    for (const auto& level : s.levels) EXPECT_EQ(lookup(s, level).descriptors[0].text, "same everywhere");
    EXPECT_TRUE(lookup(s, "L3").exemplars.empty());
}

TEST(Registry, RejectsDuplicatesAndUnknownIds) {
    Registry r = Registry::bundled();
    EXPECT_EQ(code_of([&] { r.add(r.get("cefr")); }), ErrorCode::schema);
    try {
        r.get("ielts");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::unknown_standard);
        EXPECT_EQ(e.candidates(), (std::vector<std::string>{"cefr", "ccs"}));
    }
}
