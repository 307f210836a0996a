// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

// Knowledge-artifact prompts: the teacher-style baseline, aspect criteria,
// exemplars, and the linguistic-signal rewrite prompt with its verbalizer.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "standardize/bundled_data.hpp"
#include "standardize/error.hpp"
#include "standardize/gold_profile.hpp"
#include "standardize/spec_extractor.hpp"
#include "standardize/standards.hpp"
#include "standardize/text_metrics.hpp"
#include "standardize/util.hpp"

namespace standardize {

enum class PromptMode { teacher, aspect, exemplar, signal };

inline std::string_view to_string(PromptMode m) {
    switch (m) {
    case PromptMode::teacher: return "teacher";
    case PromptMode::aspect: return "aspect";
    case PromptMode::exemplar: return "exemplar";
    case PromptMode::signal: return "signal";
    }
    return "teacher";
}

inline PromptMode parse_prompt_mode(std::string_view s) {
    if (s == "teacher") return PromptMode::teacher;
    if (s == "aspect") return PromptMode::aspect;
    if (s == "exemplar") return PromptMode::exemplar;
    if (s == "signal") return PromptMode::signal;
    throw Error(ErrorCode::invalid_argument, "unknown mode '" + std::string(s) + "'",
                {"teacher", "aspect", "exemplar", "signal"});
}

inline constexpr std::array<PromptMode, 4> kAllModes{PromptMode::teacher, PromptMode::aspect, PromptMode::exemplar,
                                                     PromptMode::signal};

struct Provenance {
    std::string source;
    std::string fragment;

    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct PromptArtifact {
    PromptMode mode = PromptMode::teacher;
    std::string text;
    std::vector<Provenance> provenance;

    friend bool operator==(const PromptArtifact&, const PromptArtifact&) = default;
};

// ---------------------------------------------------------------------------
// Templates

/// Prompt templates with {{placeholder}} fields. Names are file stems:
/// teacher_context, teacher_theme, aspect_context, aspect_theme,
/// exemplar_context, exemplar_theme, rewrite.
class TemplateSet {
public:
    static constexpr std::array<std::string_view, 7> kNames{"teacher_context", "teacher_theme",    "aspect_context",
                                                            "aspect_theme",    "exemplar_context", "exemplar_theme",
                                                            "rewrite"};

    static const TemplateSet& bundled() {
        static const TemplateSet set = [] {
            TemplateSet s;
            for (auto name : kNames) {
                const auto* f = bundled::find("templates/" + std::string(name) + ".txt");
                if (f == nullptr) throw Error(ErrorCode::io, "missing bundled template " + std::string(name));
                s.set(std::string(name), std::string(f->content));
            }
            return s;
        }();
        return set;
    }

    /// Loads `<dir>/<name>.txt` for every template; files that are absent
    /// keep the bundled text.
    static TemplateSet load_dir(const std::filesystem::path& dir) {
        TemplateSet s = bundled();
        for (auto name : kNames) {
            auto path = dir / (std::string(name) + ".txt");
            if (std::filesystem::exists(path)) s.set(std::string(name), util::read_file(path));
        }
        return s;
    }

    void set(std::string name, std::string text) {
        if (!text.empty() && text.back() == '\n') text.pop_back();
        templates_[std::move(name)] = std::move(text);
    }

    const std::string& get(std::string_view name) const {
        auto it = templates_.find(std::string(name));
        if (it == templates_.end()) throw Error(ErrorCode::schema, "no template named '" + std::string(name) + "'");
        return it->second;
    }

    std::string render(std::string_view name, const std::map<std::string, std::string>& vars) const {
        const std::string& tpl = get(name);
        std::string out;
        std::size_t pos = 0;
        while (true) {
            std::size_t open = tpl.find("{{", pos);
            if (open == std::string::npos) {
                out.append(tpl, pos, std::string::npos);
                break;
            }
            std::size_t close = tpl.find("}}", open + 2);
            if (close == std::string::npos) {
                throw Error(ErrorCode::schema, "template '" + std::string(name) + "' has an unterminated placeholder");
            }
            out.append(tpl, pos, open - pos);
            std::string key(util::trim(std::string_view(tpl).substr(open + 2, close - open - 2)));
            auto it = vars.find(key);
            if (it == vars.end()) {
                throw Error(ErrorCode::schema, "template '" + std::string(name) + "' uses unknown placeholder '" + key + "'");
            }
            out += it->second;
            pos = close + 2;
        }
        return out;
    }

private:
    std::map<std::string, std::string> templates_;
};

namespace detail {

inline std::string task_suffix(TaskKind k) { return k == TaskKind::context_assisted ? "_context" : "_theme"; }

inline std::map<std::string, std::string> base_vars(const TargetSpec& spec, std::string standard_name) {
    std::map<std::string, std::string> vars{{"level", spec.level}, {"standard_name", std::move(standard_name)}};
    vars["context"] = spec.task == TaskKind::context_assisted ? spec.payload : "";
    vars["theme"] = spec.task == TaskKind::theme_word ? spec.payload : "";
    return vars;
}

}  // namespace detail

inline PromptArtifact build_teacher_prompt(const TargetSpec& spec, const TemplateSet& templates = TemplateSet::bundled()) {
    auto vars = detail::base_vars(spec, "");
    return {PromptMode::teacher, templates.render("teacher" + detail::task_suffix(spec.task), vars), {}};
}

inline PromptArtifact build_aspect_prompt(const TargetSpec& spec, const Standard& standard,
                                          const TemplateSet& templates = TemplateSet::bundled()) {
    if (standard.aspects.empty()) {
        throw Error(ErrorCode::schema, "standard '" + standard.id + "' defines no aspects");
    }
    LevelSpec ls = lookup(standard, spec.level);
    PromptArtifact out{PromptMode::aspect, "", {}};
    std::vector<std::string> lines;
    for (const auto& d : ls.descriptors) {
        lines.push_back("- " + d.aspect_name + ": " + d.text);
        out.provenance.push_back({"aspect:" + d.aspect_id, d.text});
    }
    auto vars = detail::base_vars(spec, standard.name);
    vars["criteria_block"] = util::join(lines, "\n");
    out.text = templates.render("aspect" + detail::task_suffix(spec.task), vars);
    return out;
}

inline PromptArtifact build_exemplar_prompt(const TargetSpec& spec, const Standard& standard,
                                            const TemplateSet& templates = TemplateSet::bundled()) {
    LevelSpec ls = lookup(standard, spec.level);
    if (ls.exemplars.empty()) {
        throw Error(ErrorCode::no_exemplars, "standard '" + standard.id + "' lists no exemplars for level " + spec.level);
    }
    PromptArtifact out{PromptMode::exemplar, "", {}};
    std::vector<std::string> citations;
    for (std::size_t i = 0; i < ls.exemplars.size(); ++i) {
        citations.push_back(ls.exemplars[i].citation());
        out.provenance.push_back({"exemplar:" + spec.level + "[" + std::to_string(i) + "]", citations.back()});
    }
    auto vars = detail::base_vars(spec, standard.name);
    vars["exemplar_block"] = util::join(citations, ", ");
    out.text = templates.render("exemplar" + detail::task_suffix(spec.task), vars);
    return out;
}

// ---------------------------------------------------------------------------
// Linguistic signals

enum class Direction { increase, decrease, hold };

inline std::string_view to_string(Direction d) {
    switch (d) {
    case Direction::increase: return "increase";
    case Direction::decrease: return "decrease";
    case Direction::hold: return "hold";
    }
    return "hold";
}

inline Direction parse_direction(std::string_view s) {
    if (s == "increase") return Direction::increase;
    if (s == "decrease") return Direction::decrease;
    if (s == "hold") return Direction::hold;
    throw Error(ErrorCode::invalid_argument, "unknown direction '" + std::string(s) + "'");
}

/// Half-width of the tolerance band around a gold mean.
inline double hold_band(double target_mean, double target_std) {
    return std::max(0.05 * std::abs(target_mean), 0.25 * target_std);
}

inline Direction direction_for(double current, double target_mean, double target_std) {
    double band = hold_band(target_mean, target_std);
    if (current < target_mean - band) return Direction::increase;
    if (current > target_mean + band) return Direction::decrease;
    return Direction::hold;
}

struct SignalDirective {
    FlagId flag_id;
    double current = 0.0;
    double target_mean = 0.0;
    double target_std = 0.0;
    Direction direction = Direction::hold;

    friend bool operator==(const SignalDirective&, const SignalDirective&) = default;
};

inline std::vector<SignalDirective> make_directives(const FeatureVector& current, const GoldProfile& profile,
                                                    std::string_view level) {
    const auto& lp = profile.level(level);
    std::vector<SignalDirective> out;
    out.reserve(profile.flag_ids.size());
    for (const auto& f : profile.flag_ids) {
        double cur = current.at(f);
        double mean = lp.mean.at(f);
        double sd = lp.std.at(f);
        out.push_back({f, cur, mean, sd, direction_for(cur, mean, sd)});
    }
    return out;
}

inline bool all_hold(const std::vector<SignalDirective>& ds) {
    return std::all_of(ds.begin(), ds.end(), [](const auto& d) { return d.direction == Direction::hold; });
}

/// Clause for one directive; values carry two decimals.
inline std::string verbalize(const SignalDirective& d) {
    const auto name = std::string(flag_info(d.flag_id).display_name);
    switch (d.direction) {
    case Direction::increase:
        return "Increase the " + name + " of the story from " + util::format_fixed(d.current, 2) + " toward " +
               util::format_fixed(d.target_mean, 2) + ".";
    case Direction::decrease:
        return "Decrease the " + name + " of the story from " + util::format_fixed(d.current, 2) + " toward " +
               util::format_fixed(d.target_mean, 2) + ".";
    case Direction::hold:
        break;
    }
    return "Keep the " + name + " of the story unchanged.";
}

inline std::string verbalize(const std::vector<SignalDirective>& directives) {
    if (directives.empty()) throw Error(ErrorCode::invalid_argument, "nothing to verbalize");
    if (all_hold(directives)) return "Keep all measured properties unchanged.";
    std::vector<std::string> lines;
    for (const auto& d : directives) lines.push_back(verbalize(d));
    return util::join(lines, "\n");
}

inline PromptArtifact build_rewrite_prompt(std::string_view story, const std::vector<SignalDirective>& directives,
                                           const TemplateSet& templates = TemplateSet::bundled()) {
    if (util::trim(story).empty()) throw Error(ErrorCode::empty_text, "story to rewrite is empty");
    PromptArtifact out{PromptMode::signal, "", {}};
    for (const auto& d : directives) out.provenance.push_back({"flag:" + d.flag_id, verbalize(d)});
    std::map<std::string, std::string> vars{{"directive_block", verbalize(directives)}, {"story", std::string(story)}};
    out.text = templates.render("rewrite", vars);
    return out;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::ordered_json& j, const PromptArtifact& p) {
    nlohmann::ordered_json prov = nlohmann::ordered_json::array();
    for (const auto& e : p.provenance) prov.push_back({{"source", e.source}, {"fragment", e.fragment}});
    j = nlohmann::ordered_json{{"mode", to_string(p.mode)}, {"text", p.text}, {"provenance", prov}};
}

inline void from_json(const nlohmann::ordered_json& j, PromptArtifact& p) {
    p.mode = parse_prompt_mode(j.at("mode").get<std::string>());
    p.text = j.at("text").get<std::string>();
    p.provenance.clear();
    for (const auto& e : j.at("provenance")) {
        p.provenance.push_back({e.at("source").get<std::string>(), e.at("fragment").get<std::string>()});
    }
}

inline void to_json(nlohmann::ordered_json& j, const SignalDirective& d) {
    j = nlohmann::ordered_json{{"flag", d.flag_id},
                               {"current", d.current},
                               {"target_mean", d.target_mean},
                               {"target_std", d.target_std},
                               {"direction", to_string(d.direction)}};
}

inline void from_json(const nlohmann::ordered_json& j, SignalDirective& d) {
    d.flag_id = j.at("flag").get<std::string>();
    d.current = j.at("current").get<double>();
    d.target_mean = j.at("target_mean").get<double>();
    d.target_std = j.at("target_std").get<double>();
    d.direction = parse_direction(j.at("direction").get<std::string>());
}

}  // namespace standardize
