// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "standardize/artifacts.hpp"
#include "standardize/backend.hpp"
#include "standardize/distance.hpp"
#include "standardize/error.hpp"
#include "standardize/gold_profile.hpp"
#include "standardize/spec_extractor.hpp"
#include "standardize/standards.hpp"
#include "standardize/text_metrics.hpp"

namespace standardize {

struct LoopConfig {
    int max_iterations = 3;
    Normalization distance = Normalization::raw;
};

struct GenerationJob {
    std::string id;
    TargetSpec spec;
    PromptMode mode = PromptMode::teacher;
    DecodingConfig decoding;
    LoopConfig loop;
    /// Required for signal mode; optional elsewhere (enables distance_to_gold).
    std::shared_ptr<const GoldProfile> profile;
};

enum class Termination { converged, max_iterations, single_shot };

inline std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::converged: return "converged";
    case Termination::max_iterations: return "max_iterations";
    case Termination::single_shot: return "single_shot";
    }
    return "single_shot";
}

inline Termination parse_termination(std::string_view s) {
    if (s == "converged") return Termination::converged;
    if (s == "max_iterations") return Termination::max_iterations;
    if (s == "single_shot") return Termination::single_shot;
    throw Error(ErrorCode::schema, "unknown termination '" + std::string(s) + "'");
}

struct IterationRecord {
    int index = 0;
    PromptArtifact prompt;
    std::string raw_response;
    /// Length-enforced text that was measured.
    std::string text;
    int attempts = 1;
    double elapsed_ms = 0.0;
    FeatureVector profile;
    std::optional<double> distance_to_gold;
    std::vector<SignalDirective> directives;
};

struct GenerationResult {
    std::string job_id;
    TargetSpec spec;
    PromptMode mode = PromptMode::teacher;
    DecodingConfig decoding;
    Termination terminated_by = Termination::single_shot;
    std::string final_text;
    std::vector<IterationRecord> iterations;
};

/// Slug of the form <standard>_<level>_<mode>_<payload-word>.
inline std::string default_job_id(const TargetSpec& spec, PromptMode mode) {
    std::string slug;
    for (char c : spec.payload) {
        if (slug.size() >= 24) break;
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) slug += c;
        else if (c >= 'A' && c <= 'Z') slug += static_cast<char>(c - 'A' + 'a');
        else if (!slug.empty() && slug.back() != '-') slug += '-';
    }
    while (!slug.empty() && slug.back() == '-') slug.pop_back();
    if (slug.empty()) slug = "job";
    if (spec.task == TaskKind::context_assisted) {
        slug = "ctx-" + std::to_string(util::fnv1a(spec.payload) % 100000);
    }
    std::string level;
    for (char c : spec.level) level += (c == '/' || c == ' ') ? '-' : c;
    return spec.standard_id + "_" + level + "_" + std::string(to_string(mode)) + "_" + slug;
}

class Orchestrator {
public:
    Orchestrator(const Registry& registry, const AoALexicon& lexicon = AoALexicon::bundled(),
                 TemplateSet templates = TemplateSet::bundled())
        : registry_(&registry), lexicon_(&lexicon), templates_(std::move(templates)) {}

    void validate(const GenerationJob& job) const {
        const Standard& s = registry_->get(job.spec.standard_id);
        s.level_index(job.spec.level);
        job.decoding.validate();
        if (job.loop.max_iterations < 0) throw Error(ErrorCode::invalid_job, "max_iterations must be >= 0");
        if (util::trim(job.spec.payload).empty()) throw Error(ErrorCode::invalid_job, "job has an empty payload");
        if (job.mode == PromptMode::signal && !job.profile) {
            throw Error(ErrorCode::invalid_job, "signal mode needs a gold profile");
        }
        if (job.profile) {
            if (job.profile->standard_id != s.id) {
                throw Error(ErrorCode::invalid_job, "profile is for standard '" + job.profile->standard_id +
                                                        "', job targets '" + s.id + "'");
            }
            if (!job.profile->find(job.spec.level)) {
                throw Error(ErrorCode::invalid_job, "profile has no level '" + job.spec.level + "'");
            }
        }
    }

    GenerationResult run(const GenerationJob& job, Backend& backend) const {
        validate(job);
        const Standard& standard = registry_->get(job.spec.standard_id);
        GenerationResult result;
        result.job_id = job.id.empty() ? default_job_id(job.spec, job.mode) : job.id;
        result.spec = job.spec;
        result.mode = job.mode;
        result.decoding = job.decoding;

        PromptArtifact first;
        switch (job.mode) {
        case PromptMode::teacher: first = build_teacher_prompt(job.spec, templates_); break;
        case PromptMode::aspect:
        case PromptMode::signal: first = build_aspect_prompt(job.spec, standard, templates_); break;
        case PromptMode::exemplar: first = build_exemplar_prompt(job.spec, standard, templates_); break;
        }
        result.iterations.push_back(step(job, standard, std::move(first), backend, 0));

        if (job.mode != PromptMode::signal) {
            result.terminated_by = Termination::single_shot;
        } else {
            for (int k = 1; k <= job.loop.max_iterations && !all_hold(result.iterations.back().directives); ++k) {
                const auto& prev = result.iterations.back();
                auto prompt = build_rewrite_prompt(prev.text, prev.directives, templates_);
                result.iterations.push_back(step(job, standard, std::move(prompt), backend, k));
            }
            result.terminated_by =
                all_hold(result.iterations.back().directives) ? Termination::converged : Termination::max_iterations;
        }
        result.final_text = result.iterations.back().text;
        return result;
    }

    struct Outcome {
        std::string job_id;
        std::optional<GenerationResult> result;
        std::optional<Error> error;

        bool ok() const { return result.has_value(); }
    };

    /// Runs independent jobs on up to `parallelism` workers; slot i always
    /// holds job i. Failures are captured per slot.
    std::vector<Outcome> run_batch(const std::vector<GenerationJob>& jobs, Backend& backend,
                                   std::size_t parallelism = 1) const {
        if (parallelism == 0) throw Error(ErrorCode::invalid_argument, "parallelism must be positive");
        std::vector<Outcome> out(jobs.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
                const auto& job = jobs[i];
                out[i].job_id = job.id.empty() ? default_job_id(job.spec, job.mode) : job.id;
                try {
                    out[i].result = run(job, backend);
                } catch (const Error& e) {
                    out[i].error = e;
                } catch (const std::exception& e) {
                    out[i].error = Error(ErrorCode::backend, e.what());
                }
            }
        };
        std::size_t n = std::min(parallelism, jobs.size());
        if (n <= 1) {
            worker();
            return out;
        }
        {
            std::vector<std::jthread> pool;
            for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
        }
        return out;
    }

    const Registry& registry() const { return *registry_; }
    const TemplateSet& templates() const { return templates_; }

private:
    IterationRecord step(const GenerationJob& job, const Standard& standard, PromptArtifact prompt, Backend& backend,
                         int index) const {
        IterationRecord rec;
        rec.index = index;
        auto c = complete(prompt.text, job.decoding, backend);
        rec.prompt = std::move(prompt);
        rec.raw_response = std::move(c.raw_response);
        rec.text = std::move(c.text);
        rec.attempts = c.attempts;
        rec.elapsed_ms = c.elapsed_ms;
        const auto flag_ids = job.profile ? job.profile->flag_ids : standard.flag_ids();
        rec.profile = extract_profile(rec.text, flag_ids, *lexicon_);
        if (job.profile) {
            rec.distance_to_gold = distance_to_level(rec.profile, *job.profile, job.spec.level, job.loop.distance);
            if (job.mode == PromptMode::signal) rec.directives = make_directives(rec.profile, *job.profile, job.spec.level);
        }
        return rec;
    }

    const Registry* registry_;
    const AoALexicon* lexicon_;
    TemplateSet templates_;
};

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::ordered_json to_json(const TargetSpec& s) {
    return {{"standard_id", s.standard_id}, {"level", s.level}, {"task", to_string(s.task)}, {"payload", s.payload}};
}

inline TargetSpec spec_from_json(const nlohmann::ordered_json& j) {
    return {j.at("standard_id").get<std::string>(), j.at("level").get<std::string>(),
            parse_task_kind(j.at("task").get<std::string>()), j.at("payload").get<std::string>()};
}

inline nlohmann::ordered_json to_json(const GenerationResult& r) {
    nlohmann::ordered_json iterations = nlohmann::ordered_json::array();
    for (const auto& it : r.iterations) {
        nlohmann::ordered_json ij;
        ij["index"] = it.index;
        ij["prompt"] = it.prompt;
        ij["raw_response"] = it.raw_response;
        ij["text"] = it.text;
        ij["attempts"] = it.attempts;
        ij["elapsed_ms"] = it.elapsed_ms;
        ij["profile"] = it.profile;
        ij["distance_to_gold"] = it.distance_to_gold ? nlohmann::ordered_json(*it.distance_to_gold) : nlohmann::ordered_json(nullptr);
        ij["directives"] = it.directives;
        iterations.push_back(std::move(ij));
    }
    nlohmann::ordered_json j;
    j["job_id"] = r.job_id;
    j["spec"] = to_json(r.spec);
    j["mode"] = to_string(r.mode);
    j["decoding"] = r.decoding;
    j["terminated_by"] = to_string(r.terminated_by);
    j["final_text"] = r.final_text;
    j["iterations"] = std::move(iterations);
    return j;
}

inline GenerationResult parse_result(const nlohmann::ordered_json& j) {
    try {
        GenerationResult r;
        r.job_id = j.at("job_id").get<std::string>();
        r.spec = spec_from_json(j.at("spec"));
        r.mode = parse_prompt_mode(j.at("mode").get<std::string>());
        r.decoding = j.at("decoding").get<DecodingConfig>();
        r.terminated_by = parse_termination(j.at("terminated_by").get<std::string>());
        r.final_text = j.at("final_text").get<std::string>();
        for (const auto& ij : j.at("iterations")) {
            IterationRecord it;
            it.index = ij.at("index").get<int>();
            it.prompt = ij.at("prompt").get<PromptArtifact>();
            it.raw_response = ij.at("raw_response").get<std::string>();
            it.text = ij.at("text").get<std::string>();
            it.attempts = ij.at("attempts").get<int>();
            it.elapsed_ms = ij.at("elapsed_ms").get<double>();
            it.profile = ij.at("profile").get<FeatureVector>();
            if (!ij.at("distance_to_gold").is_null()) it.distance_to_gold = ij["distance_to_gold"].get<double>();
            it.directives = ij.at("directives").get<std::vector<SignalDirective>>();
            r.iterations.push_back(std::move(it));
        }
        if (r.iterations.empty()) throw Error(ErrorCode::schema, "result has no iterations");
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::schema, std::string("generation result: ") + e.what());
    }
}

inline GenerationResult load_result(const std::filesystem::path& path) {
    std::string text = util::read_file(path);
    try {
        return parse_result(nlohmann::ordered_json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::parse, path.string() + ": " + e.what());
    }
}

}  // namespace standardize
