// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "standardize/standardize.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace standardize;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::transport:
    case ErrorCode::backend:
    case ErrorCode::length_enforcement_exhausted:
    case ErrorCode::zero_std:
    case ErrorCode::not_applicable:
        return kExitRuntime;
    default:
        return kExitUsage;
    }
}

void print_error(const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (!e.candidates().empty()) std::cerr << "  candidates: " << util::join(e.candidates(), ", ") << "\n";
}

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto t = util::trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::string fmt(double v, int digits = 3) { return util::format_fixed(v, digits); }

/// Left-aligned text table for stdout summaries.
void print_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows) {
        for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& r) {
        std::string s;
        for (std::size_t c = 0; c < r.size(); ++c) {
            s += r[c];
            if (c + 1 < r.size()) s += std::string(width[c] - r[c].size() + 2, ' ');
        }
        std::cout << s << "\n";
    };
    line(header);
    std::vector<std::string> rule;
    for (auto w : width) rule.emplace_back(w, '-');
    line(rule);
    for (const auto& r : rows) line(r);
}

// ---------------------------------------------------------------------------
// Run configuration: flags > environment > config file.

struct RunConfig {
    std::vector<std::string> standard_files;
    std::optional<std::string> profile;
    std::optional<std::string> base_url;
    std::optional<std::string> api_key;
    RetryPolicy retry;
    std::optional<std::string> mock;
    std::uint64_t mock_seed = 1;
    DecodingConfig decoding;
    LoopConfig loop;
    std::optional<std::string> templates_dir;
    std::optional<std::string> lexicon;
    std::string out = "out";
    std::size_t parallel = 1;
};

/// Raw flag values; `count()` on the CLI11 option tells whether each was given.
struct RunFlags {
    std::string config;
    std::vector<std::string> standard_files;
    std::string profile, base_url, model, mock, templates_dir, lexicon, out, distance;
    std::uint64_t seed = 1;
    int min_new_tokens = 0, max_new_tokens = 0, max_iterations = 0;
    double top_p = 0, temperature = 0;
    std::size_t parallel = 1;
    std::map<std::string, CLI::Option*> opts;

    bool given(const std::string& name) const {
        auto it = opts.find(name);
        return it != opts.end() && it->second->count() > 0;
    }
};

void add_run_flags(CLI::App& app, RunFlags& f, bool with_parallel) {
    f.opts["config"] = app.add_option("--config", f.config, "JSON run configuration");
    f.opts["standard-file"] = app.add_option("--standard-file", f.standard_files, "extra standard definition (JSON)");
    f.opts["profile"] = app.add_option("--profile", f.profile, "gold profile JSON");
    f.opts["base-url"] = app.add_option("--base-url", f.base_url, "OpenAI-compatible endpoint");
    f.opts["model"] = app.add_option("--model", f.model, "model id sent to the endpoint");
    f.opts["mock"] = app.add_option("--mock", f.mock, "mock backend: compliant, defiant or a mock script JSON");
    f.opts["seed"] = app.add_option("--seed", f.seed, "seed for the built-in mocks");
    f.opts["min-new-tokens"] = app.add_option("--min-new-tokens", f.min_new_tokens);
    f.opts["max-new-tokens"] = app.add_option("--max-new-tokens", f.max_new_tokens);
    f.opts["top-p"] = app.add_option("--top-p", f.top_p);
    f.opts["temperature"] = app.add_option("--temperature", f.temperature);
    f.opts["max-iterations"] = app.add_option("--max-iterations", f.max_iterations, "rewrite budget for signal mode");
    f.opts["distance"] = app.add_option("--distance", f.distance, "raw or zscore");
    f.opts["templates-dir"] = app.add_option("--templates-dir", f.templates_dir, "directory overriding prompt templates");
    f.opts["lexicon"] = app.add_option("--lexicon", f.lexicon, "age-of-acquisition TSV (default: bundled sample)");
    f.opts["out"] = app.add_option("--out", f.out, "output directory");
    if (with_parallel) f.opts["parallel"] = app.add_option("--parallel", f.parallel, "concurrent jobs");
}

void apply_config_file(RunConfig& rc, const std::string& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(util::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::parse, path + ": " + e.what());
    }
    try {
        if (!j.is_object()) throw Error(ErrorCode::schema, path + ": expected a JSON object");
        auto base = fs::path(path).parent_path();
        auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
        if (j.contains("standards")) {
            for (const auto& s : j["standards"]) rc.standard_files.push_back(resolve(s.get<std::string>()));
        }
        if (j.contains("profile")) rc.profile = resolve(j["profile"].get<std::string>());
        if (j.contains("backend")) {
            const auto& b = j["backend"];
            if (b.contains("base_url")) rc.base_url = b["base_url"].get<std::string>();
            if (b.contains("model_id")) rc.decoding.model_id = b["model_id"].get<std::string>();
            if (b.contains("mock")) {
                auto m = b["mock"].get<std::string>();
                rc.mock = (m == "compliant" || m == "defiant") ? m : resolve(m);
            }
            if (b.contains("seed")) rc.mock_seed = b["seed"].get<std::uint64_t>();
            if (b.contains("max_attempts")) rc.retry.max_attempts = b["max_attempts"].get<int>();
            if (b.contains("initial_backoff_ms")) rc.retry.initial_backoff_ms = b["initial_backoff_ms"].get<double>();
        }
        if (j.contains("decoding")) {
            const auto& d = j["decoding"];
            if (d.contains("model_id")) rc.decoding.model_id = d["model_id"].get<std::string>();
            if (d.contains("min_new_tokens")) rc.decoding.min_new_tokens = d["min_new_tokens"].get<int>();
            if (d.contains("max_new_tokens")) rc.decoding.max_new_tokens = d["max_new_tokens"].get<int>();
            if (d.contains("top_p")) rc.decoding.top_p = d["top_p"].get<double>();
            if (d.contains("temperature") && !d["temperature"].is_null()) rc.decoding.temperature = d["temperature"].get<double>();
        }
        if (j.contains("loop")) {
            const auto& l = j["loop"];
            if (l.contains("max_iterations")) rc.loop.max_iterations = l["max_iterations"].get<int>();
            if (l.contains("distance")) rc.loop.distance = parse_normalization(l["distance"].get<std::string>());
        }
        if (j.contains("templates_dir")) rc.templates_dir = resolve(j["templates_dir"].get<std::string>());
        if (j.contains("lexicon")) rc.lexicon = resolve(j["lexicon"].get<std::string>());
        if (j.contains("out")) rc.out = j["out"].get<std::string>();
        if (j.contains("parallel")) rc.parallel = j["parallel"].get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::schema, path + ": " + e.what());
    }
}

RunConfig resolve_run_config(const RunFlags& f) {
    RunConfig rc;
    if (f.given("config")) apply_config_file(rc, f.config);

    if (auto v = env("STANDARDIZE_API_KEY")) rc.api_key = v;
    if (auto v = env("STANDARDIZE_BASE_URL")) rc.base_url = v;
    if (auto v = env("STANDARDIZE_MODEL")) rc.decoding.model_id = *v;
    if (auto v = env("STANDARDIZE_TEMPLATES_DIR")) rc.templates_dir = v;

    for (const auto& s : f.standard_files) rc.standard_files.push_back(s);
    if (f.given("profile")) rc.profile = f.profile;
    if (f.given("mock") && f.given("base-url")) throw UsageError("--mock and --base-url are mutually exclusive");
    if (f.given("base-url")) {
        rc.base_url = f.base_url;
        rc.mock.reset();
    }
    if (f.given("mock")) rc.mock = f.mock;
    if (f.given("seed")) rc.mock_seed = f.seed;
    if (f.given("model")) rc.decoding.model_id = f.model;
    if (f.given("min-new-tokens")) rc.decoding.min_new_tokens = f.min_new_tokens;
    if (f.given("max-new-tokens")) rc.decoding.max_new_tokens = f.max_new_tokens;
    if (f.given("top-p")) rc.decoding.top_p = f.top_p;
    if (f.given("temperature")) rc.decoding.temperature = f.temperature;
    if (f.given("max-iterations")) rc.loop.max_iterations = f.max_iterations;
    if (f.given("distance")) rc.loop.distance = parse_normalization(f.distance);
    if (f.given("templates-dir")) rc.templates_dir = f.templates_dir;
    if (f.given("lexicon")) rc.lexicon = f.lexicon;
    if (f.given("out")) rc.out = f.out;
    if (f.given("parallel")) rc.parallel = f.parallel;

    rc.decoding.validate();
    if (rc.parallel == 0) throw UsageError("--parallel must be at least 1");
    if (rc.loop.max_iterations < 0) throw UsageError("--max-iterations must be >= 0");
    if (rc.retry.max_attempts < 1) throw UsageError("backend.max_attempts must be at least 1");
    return rc;
}

Registry build_registry(const std::vector<std::string>& files) {
    Registry r;
    for (const auto& f : files) r.add(load_standard(f));
    auto bundled = Registry::bundled();
    for (const auto& s : bundled.standards()) {
        if (!r.find(s.id)) r.add(s);
    }
    return r;
}

/// The bundled sample lexicon unless a TSV path is given.
class LexiconHolder {
public:
    explicit LexiconHolder(const std::string& path) {
        if (!path.empty()) owned_ = std::make_unique<AoALexicon>(AoALexicon::load(path));
    }
    const AoALexicon& get() const { return owned_ ? *owned_ : AoALexicon::bundled(); }

private:
    std::unique_ptr<AoALexicon> owned_;
};

TemplateSet build_templates(const RunConfig& rc) {
    return rc.templates_dir ? TemplateSet::load_dir(*rc.templates_dir) : TemplateSet::bundled();
}

std::unique_ptr<Backend> build_backend(const RunConfig& rc) {
    if (rc.mock) {
        if (*rc.mock == "compliant") return std::make_unique<MockBackend>(MockBackend::compliant(rc.mock_seed));
        if (*rc.mock == "defiant") return std::make_unique<MockBackend>(MockBackend::defiant(rc.mock_seed));
        return std::make_unique<MockBackend>(MockBackend::load_config(*rc.mock));
    }
    if (rc.base_url) {
        HttpBackendConfig hc;
        hc.base_url = *rc.base_url;
        if (rc.api_key) hc.api_key = *rc.api_key;
        hc.retry = rc.retry;
        return std::make_unique<HttpBackend>(std::move(hc));
    }
    throw UsageError("no backend configured: pass --mock or --base-url (or set STANDARDIZE_BASE_URL)");
}

std::shared_ptr<const GoldProfile> load_gold(const RunConfig& rc, const Standard& standard) {
    if (!rc.profile) return nullptr;
    auto p = std::make_shared<GoldProfile>(load_profile(*rc.profile));
    if (p->standard_id != standard.id) {
        throw UsageError("profile " + *rc.profile + " is for standard '" + p->standard_id + "', not '" + standard.id +
                         "'");
    }
    return p;
}

void write_json(const fs::path& path, const ordered_json& j) { util::write_file(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// profile

struct ProfileArgs {
    std::string corpus, standard = "cefr", out, flags, lexicon;
    std::vector<std::string> standard_files;
};

int cmd_profile(const ProfileArgs& a) {
    auto registry = build_registry(a.standard_files);
    const Standard& standard = registry.get(a.standard);
    if (!fs::exists(a.corpus)) {
        std::cerr << "error: corpus not found: " << a.corpus << "\n";
        return kExitUsage;
    }
    auto flags = a.flags.empty() ? standard.flag_ids() : split_csv(a.flags);
    validate_flags(flags);
    LexiconHolder lex(a.lexicon);
    auto corpus = load_corpus(a.corpus, standard);
    auto profile = compute_profile(corpus, flags, lex.get());
    if (!a.out.empty()) {
        auto parent = fs::path(a.out).parent_path();
        if (!parent.empty()) fs::create_directories(parent);
        save_profile(profile, a.out);
    }

    std::vector<std::vector<std::string>> rows;
    for (const auto& s : corpus_stats(corpus)) {
        rows.push_back({s.level, std::to_string(s.n), fmt(s.avg_word_count, 2), fmt(s.avg_sentence_count, 2)});
    }
    std::cout << "Corpus statistics (" << standard.name << ")\n";
    print_table({"level", "texts", "avg word count", "avg sentence count"}, rows);
    if (!a.out.empty()) std::cout << "profile written to " << a.out << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// features

int cmd_features(const std::string& file, const std::string& flags_arg, const std::string& lexicon) {
    auto flags = flags_arg.empty() ? supported_flags() : split_csv(flags_arg);
    validate_flags(flags);
    std::string text = util::read_file(file);
    if (util::trim(text).empty()) throw Error(ErrorCode::empty_text, file + " is empty");
    LexiconHolder lex(lexicon);
    ordered_json j = extract_profile(text, flags, lex.get());
    std::cout << j.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// generate

struct SpecArgs {
    std::string standard = "cefr";
    std::vector<std::string> levels;
    std::vector<std::string> themes;
    std::string themes_file;
    std::vector<std::string> context_files;
    std::string prompt;
    std::string mode = "teacher";
};

void add_spec_flags(CLI::App& app, SpecArgs& s, bool many) {
    app.add_option("--standard", s.standard, "standard id")->capture_default_str();
    if (many) {
        app.add_option("--level", s.levels, "target level (repeatable, or 'all')");
        app.add_option("--theme", s.themes, "theme word (repeatable)");
        app.add_option("--context-file", s.context_files, "context passage file (repeatable)");
        app.add_option("--themes-file", s.themes_file, "file with one theme word per line");
    } else {
        app.add_option("--level", s.levels, "target level")->expected(1);
        app.add_option("--theme", s.themes, "theme word")->expected(1);
        app.add_option("--context-file", s.context_files, "context passage file")->expected(1);
    }
    app.add_option("--prompt", s.prompt, "free-form request, parsed into a target spec");
}

std::vector<TargetSpec> build_specs(const SpecArgs& a, const Registry& registry) {
    if (!a.prompt.empty()) {
        if (!a.levels.empty() || !a.themes.empty() || !a.context_files.empty() || !a.themes_file.empty()) {
            throw UsageError("--prompt cannot be combined with --level/--theme/--context-file/--themes-file");
        }
        return {extract(a.prompt, registry)};
    }
    const Standard& standard = registry.get(a.standard);
    if (a.levels.empty()) throw UsageError("--level is required");
    std::vector<LevelId> levels;
    for (const auto& l : a.levels) {
        if (l == "all") levels.insert(levels.end(), standard.levels.begin(), standard.levels.end());
        else levels.push_back(l);
    }
    std::vector<std::pair<TaskKind, std::string>> payloads;
    for (const auto& t : a.themes) payloads.emplace_back(TaskKind::theme_word, t);
    if (!a.themes_file.empty()) {
        for (const auto& w : util::parse_word_list(util::read_file(a.themes_file))) payloads.emplace_back(TaskKind::theme_word, w);
    }
    for (const auto& f : a.context_files) payloads.emplace_back(TaskKind::context_assisted, util::read_file(f));
    if (payloads.empty()) throw UsageError("give at least one --theme, --themes-file, --context-file or --prompt");

    std::vector<TargetSpec> specs;
    for (const auto& level : levels) {
        for (const auto& [task, payload] : payloads) specs.push_back(make_spec(registry, standard.id, level, task, payload));
    }
    return specs;
}

std::vector<GenerationJob> build_jobs(const std::vector<TargetSpec>& specs, const std::vector<PromptMode>& modes,
                                      const RunConfig& rc, const std::shared_ptr<const GoldProfile>& gold) {
    std::vector<GenerationJob> jobs;
    std::map<std::string, int> seen;
    for (const auto& spec : specs) {
        for (auto mode : modes) {
            GenerationJob job;
            job.spec = spec;
            job.mode = mode;
            job.decoding = rc.decoding;
            job.loop = rc.loop;
            job.profile = gold;
            job.id = default_job_id(spec, mode);
            int n = ++seen[job.id];
            if (n > 1) job.id += "-" + std::to_string(n);
            jobs.push_back(std::move(job));
        }
    }
    return jobs;
}

ordered_json outcome_entry(const Orchestrator::Outcome& o) {
    ordered_json e;
    e["job_id"] = o.job_id;
    if (o.ok()) {
        e["status"] = "ok";
        e["terminated_by"] = to_string(o.result->terminated_by);
        e["iterations"] = o.result->iterations.size();
        e["result"] = o.job_id + ".json";
        e["text"] = o.job_id + ".txt";
    } else {
        e["status"] = "error";
        e["error_code"] = to_string(o.error->code());
        e["error"] = o.error->what();
    }
    return e;
}

void write_outcome(const fs::path& out, const Orchestrator::Outcome& o) {
    if (!o.ok()) return;
    write_json(out / (o.job_id + ".json"), to_json(*o.result));
    util::write_file(out / (o.job_id + ".txt"), o.result->final_text + "\n");
}

std::string last_distance(const GenerationResult& r) {
    const auto& d = r.iterations.back().distance_to_gold;
    return d ? fmt(*d, 3) : "-";
}

int cmd_generate(const RunFlags& f, const SpecArgs& a) {
    auto rc = resolve_run_config(f);
    auto mode = parse_prompt_mode(a.mode);
    auto registry = build_registry(rc.standard_files);
    auto specs = build_specs(a, registry);
    const Standard& standard = registry.get(specs.front().standard_id);
    if (mode == PromptMode::signal && !rc.profile) throw UsageError("--mode signal requires --profile");
    auto gold = load_gold(rc, standard);
    auto backend = build_backend(rc);
    LexiconHolder lex(rc.lexicon.value_or(""));
    Orchestrator orch(registry, lex.get(), build_templates(rc));
    auto jobs = build_jobs(specs, {mode}, rc, gold);
    for (const auto& job : jobs) orch.validate(job);

    fs::path out(rc.out);
    fs::create_directories(out);
    auto outcomes = orch.run_batch(jobs, *backend, rc.parallel);

    ordered_json manifest;
    manifest["standard_id"] = standard.id;
    manifest["mode"] = to_string(mode);
    manifest["backend"] = backend->name();
    manifest["jobs"] = ordered_json::array();
    std::size_t failed = 0;
    std::vector<std::vector<std::string>> rows;
    for (const auto& o : outcomes) {
        write_outcome(out, o);
        manifest["jobs"].push_back(outcome_entry(o));
        if (o.ok()) {
            rows.push_back({o.job_id, std::string(to_string(o.result->terminated_by)),
                            std::to_string(o.result->iterations.size()), last_distance(*o.result)});
        } else {
            ++failed;
            rows.push_back({o.job_id, "error", "-", "-"});
            std::cerr << "error: " << o.job_id << ": " << o.error->what() << "\n";
        }
    }
    manifest["failed"] = failed;
    write_json(out / "manifest.json", manifest);
    print_table({"job", "terminated_by", "iterations", "distance"}, rows);
    std::cout << (jobs.size() - failed) << "/" << jobs.size() << " jobs succeeded; outputs in " << out.string() << "\n";
    return failed == 0 ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
    std::vector<std::string> results;
    std::string profile, standard, out, distance = "raw", classifier_cmd, lexicon;
    std::vector<std::string> standard_files;
};

bool own_artifact(const fs::path& p) {
    static const std::set<std::string> names{"manifest.json", "report.json", "compare.json"};
    return names.count(p.filename().string()) > 0;
}

int cmd_evaluate(const EvaluateArgs& a) {
    auto registry = build_registry(a.standard_files);
    auto gold = load_profile(a.profile);
    const Standard& standard = registry.get(a.standard.empty() ? gold.standard_id : a.standard);

    std::vector<fs::path> files;
    for (const auto& r : a.results) {
        if (fs::is_directory(r)) {
            for (const auto& e : fs::directory_iterator(r)) {
                if (e.is_regular_file() && e.path().extension() == ".json" && !own_artifact(e.path())) {
                    files.push_back(e.path());
                }
            }
        } else if (fs::exists(r)) {
            files.emplace_back(r);
        } else {
            throw Error(ErrorCode::io, "results not found: " + r);
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<GenerationResult> results;
    EvaluationConfig config;
    config.distance = parse_normalization(a.distance);
    for (const auto& p : files) {
        try {
            results.push_back(load_result(p));
        } catch (const Error& e) {
            std::cerr << "warning: skipping " << p.string() << ": " << e.what() << "\n";
            config.notes.push_back("skipped " + p.filename().string() + ": " + std::string(to_string(e.code())));
        }
    }
    if (results.empty()) throw Error(ErrorCode::empty_input, "no readable generation results");

    std::unique_ptr<LevelClassifier> external;
    if (!a.classifier_cmd.empty()) {
        external = std::make_unique<ExternalClassifier>(a.classifier_cmd);
        config.classifier = external.get();
    }
    LexiconHolder lex(a.lexicon);
    auto report = evaluate(results, gold, standard, config, lex.get());

    fs::path out = a.out.empty() ? (fs::is_directory(a.results.front()) ? fs::path(a.results.front()) : fs::path("."))
                                 : fs::path(a.out);
    fs::create_directories(out);
    write_json(out / "report.json", to_json(report));
    util::write_file(out / "report.csv", to_csv(report));

    std::vector<std::vector<std::string>> rows;
    auto row = [&](const std::string& name, std::size_t n, double precise, const std::optional<double>& adjacent,
                   double dist, double distinct) {
        std::vector<std::string> r{name, std::to_string(n), fmt(precise)};
        if (adjacent_applicable(standard)) r.push_back(adjacent ? fmt(*adjacent) : "-");
        r.push_back(fmt(dist, 2));
        r.push_back(fmt(distinct));
        rows.push_back(std::move(r));
    };
    for (const auto& m : report.by_mode) {
        row(std::string(to_string(m.mode)), m.n, m.precise_accuracy, m.adjacent_accuracy, m.mean_distance,
            m.mean_distinct);
    }
    std::vector<double> dists;
    for (const auto& it : report.items) dists.push_back(it.distance_to_gold);
    row("all", report.items.size(), report.precise_accuracy, report.adjacent_accuracy, detail::mean_of(dists),
        report.mean_distinct);

    std::vector<std::string> header{"mode", "n", "precise"};
    if (adjacent_applicable(standard)) header.push_back("adjacent");
    header.insert(header.end(), {"distance", "distinct-n"});
    std::cout << standard.name << " evaluation (" << report.classifier << ")\n";
    print_table(header, rows);
    for (const auto& n : report.notes) std::cout << "note: " << n << "\n";
    std::cout << "report written to " << (out / "report.json").string() << "\n";
    return report.notes.empty() ? kExitOk : kExitRuntime;
}

// ---------------------------------------------------------------------------
// compare

int cmd_compare(const RunFlags& f, const SpecArgs& a) {
    auto rc = resolve_run_config(f);
    auto registry = build_registry(rc.standard_files);
    auto specs = build_specs(a, registry);
    if (specs.size() != 1) throw UsageError("compare takes exactly one target spec");
    const Standard& standard = registry.get(specs.front().standard_id);
    if (!rc.profile) throw UsageError("compare requires --profile");
    auto gold = load_gold(rc, standard);
    auto backend = build_backend(rc);
    LexiconHolder lex(rc.lexicon.value_or(""));
    Orchestrator orch(registry, lex.get(), build_templates(rc));
    std::vector<PromptMode> modes(kAllModes.begin(), kAllModes.end());
    auto jobs = build_jobs(specs, modes, rc, gold);
    NearestCentroidClassifier classifier(*gold);

    fs::path out(rc.out);
    fs::create_directories(out);
    ordered_json summary;
    summary["spec"] = to_json(specs.front());
    summary["rows"] = ordered_json::array();
    std::vector<std::vector<std::string>> rows;
    std::size_t failed = 0;
    // Modes run one after another so a failing mode cannot starve the rest.
    for (const auto& job : jobs) {
        auto o = orch.run_batch({job}, *backend, 1).front();
        write_outcome(out, o);
        ordered_json r = outcome_entry(o);
        r["mode"] = to_string(job.mode);
        if (o.ok()) {
            const auto& res = *o.result;
            auto fv = extract_profile(res.final_text, gold->flag_ids, lex.get());
            auto predicted = classifier.classify(fv);
            double dist = distance_to_level(fv, *gold, res.spec.level, rc.loop.distance);
            r["predicted"] = predicted;
            r["distance_to_gold"] = dist;
            rows.push_back({std::string(to_string(job.mode)), std::string(to_string(res.terminated_by)),
                            std::to_string(res.iterations.size()), predicted, fmt(dist, 3)});
        } else {
            ++failed;
            rows.push_back({std::string(to_string(job.mode)), "error", "-", "-", "-"});
            std::cerr << "error: " << to_string(job.mode) << ": " << o.error->what() << "\n";
        }
        summary["rows"].push_back(std::move(r));
    }
    summary["failed"] = failed;
    write_json(out / "compare.json", summary);
    std::cout << standard.name << " " << specs.front().level << " comparison\n";
    print_table({"mode", "terminated_by", "iterations", "predicted", "distance"}, rows);
    return failed == 0 ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Standard-aligned story generation and evaluation toolkit", "standardize"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "standardize 0.1.0");

    ProfileArgs profile_args;
    auto* profile = app.add_subcommand("profile", "compute a gold profile from a labeled corpus");
    profile->add_option("--corpus", profile_args.corpus, "JSONL file or directory of level folders")->required();
    profile->add_option("--standard", profile_args.standard, "standard id")->capture_default_str();
    profile->add_option("--out", profile_args.out, "profile JSON to write");
    profile->add_option("--flags", profile_args.flags, "comma-separated flag ids (default: the standard's flags)");
    profile->add_option("--standard-file", profile_args.standard_files, "extra standard definition (JSON)");
    profile->add_option("--lexicon", profile_args.lexicon, "age-of-acquisition TSV (default: bundled sample)");

    RunFlags gen_flags;
    SpecArgs gen_spec;
    auto* generate = app.add_subcommand("generate", "generate stories for one or more target specs");
    add_run_flags(*generate, gen_flags, true);
    add_spec_flags(*generate, gen_spec, true);
    generate->add_option("--mode", gen_spec.mode, "teacher, aspect, exemplar or signal")->capture_default_str();

    EvaluateArgs eval_args;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score generation results against a gold profile");
    evaluate_cmd->add_option("--results", eval_args.results, "result files or directories")->required();
    evaluate_cmd->add_option("--profile", eval_args.profile, "gold profile JSON")->required();
    evaluate_cmd->add_option("--standard", eval_args.standard, "standard id (default: the profile's)");
    evaluate_cmd->add_option("--out", eval_args.out, "directory for report.json and report.csv");
    evaluate_cmd->add_option("--distance", eval_args.distance, "raw or zscore")->capture_default_str();
    evaluate_cmd->add_option("--classifier-cmd", eval_args.classifier_cmd, "external classifier command");
    evaluate_cmd->add_option("--standard-file", eval_args.standard_files, "extra standard definition (JSON)");
    evaluate_cmd->add_option("--lexicon", eval_args.lexicon, "age-of-acquisition TSV (default: bundled sample)");

    std::string feat_file, feat_flags, feat_lexicon;
    auto* features = app.add_subcommand("features", "print the linguistic flags of a text file");
    features->add_option("file", feat_file, "text file")->required();
    features->add_option("--flags", feat_flags, "comma-separated flag ids (default: all)");
    features->add_option("--lexicon", feat_lexicon, "age-of-acquisition TSV (default: bundled sample)");

    RunFlags cmp_flags;
    SpecArgs cmp_spec;
    auto* compare = app.add_subcommand("compare", "run every prompt mode on one target spec");
    add_run_flags(*compare, cmp_flags, false);
    add_spec_flags(*compare, cmp_spec, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (profile->parsed()) return cmd_profile(profile_args);
        if (generate->parsed()) return cmd_generate(gen_flags, gen_spec);
        if (evaluate_cmd->parsed()) return cmd_evaluate(eval_args);
        if (features->parsed()) return cmd_features(feat_file, feat_flags, feat_lexicon);
        if (compare->parsed()) return cmd_compare(cmp_flags, cmp_spec);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        print_error(e);
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
