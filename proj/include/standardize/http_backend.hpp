// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

// OpenAI-compatible chat-completions client.

#pragma once

#include <chrono>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "standardize/backend.hpp"
#include "standardize/error.hpp"

namespace standardize {

struct RetryPolicy {
    int max_attempts = 5;
    double initial_backoff_ms = 500.0;
    double multiplier = 2.0;
    double max_backoff_ms = 16000.0;

    double backoff_ms(int failed_attempts) const {
        double d = initial_backoff_ms;
        for (int i = 1; i < failed_attempts; ++i) d *= multiplier;
        return std::min(d, max_backoff_ms);
    }
};

struct HttpBackendConfig {
    std::string base_url = "https://api.openai.com";
    std::string api_key;
    RetryPolicy retry;
    int connect_timeout_s = 10;
    int read_timeout_s = 120;
};

struct AttemptRecord {
    int attempt = 0;
    /// HTTP status, or 0 when the request never got a response.
    int status = 0;
    std::string error;
    double backoff_ms = 0.0;
};

namespace detail {

struct SplitUrl {
    std::string origin;
    std::string path_prefix;
};

inline SplitUrl split_url(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) throw Error(ErrorCode::invalid_argument, "base_url needs a scheme: " + url);
    auto slash = url.find('/', scheme + 3);
    SplitUrl out{url.substr(0, slash), slash == std::string::npos ? "" : url.substr(slash)};
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
    return out;
}

inline bool retryable_status(int status) {
    return status == 408 || status == 429 || status == 500 || status == 502 || status == 503 || status == 504;
}

}  // namespace detail

class HttpBackend : public Backend {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit HttpBackend(HttpBackendConfig config, Sleeper sleeper = {})
        : config_(std::move(config)), sleeper_(std::move(sleeper)) {
        if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
        if (config_.retry.max_attempts < 1) throw Error(ErrorCode::invalid_argument, "retry needs max_attempts >= 1");
        url_ = detail::split_url(config_.base_url);
    }

    /// Reads STANDARDIZE_API_KEY when `api_key` is empty.
    static HttpBackendConfig with_env_key(HttpBackendConfig c) {
        if (c.api_key.empty()) {
            if (const char* k = std::getenv("STANDARDIZE_API_KEY")) c.api_key = k;
        }
        return c;
    }

    static nlohmann::ordered_json request_body(const std::string& prompt, const DecodingConfig& d) {
        nlohmann::ordered_json body{{"model", d.model_id},
                                    {"messages", nlohmann::ordered_json::array({{{"role", "user"}, {"content", prompt}}})},
                                    {"top_p", d.top_p},
                                    {"max_tokens", d.max_new_tokens}};
        if (d.temperature) body["temperature"] = *d.temperature;
        return body;
    }

    static std::string parse_response(const std::string& body) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::backend, std::string("unparseable response: ") + e.what());
        }
        if (j.contains("error")) {
            const auto& e = j["error"];
            std::string msg = e.is_object() && e.contains("message") && e["message"].is_string()
                                  ? e["message"].get<std::string>()
                                  : e.dump();
            throw Error(ErrorCode::backend, "backend error: " + msg);
        }
        try {
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::backend, "response has no choices[0].message.content");
        }
    }

    Completion generate(const std::string& prompt, const DecodingConfig& decoding) override {
        const std::string body = request_body(prompt, decoding).dump();
        httplib::Headers headers;
        if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);
        const std::string path = url_.path_prefix + "/v1/chat/completions";

        std::string last_error;
        for (int attempt = 1; attempt <= config_.retry.max_attempts; ++attempt) {
            httplib::Client client(url_.origin);
            client.set_connection_timeout(config_.connect_timeout_s, 0);
            client.set_read_timeout(config_.read_timeout_s, 0);
            auto start = std::chrono::steady_clock::now();
            auto res = client.Post(path, headers, body, "application/json");
            double latency =
                std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

            AttemptRecord rec{attempt, 0, "", 0.0};
            bool retry = false;
            if (!res) {
                rec.error = httplib::to_string(res.error());
                retry = true;
            } else {
                rec.status = res->status;
                if (res->status == 200) {
                    log(rec);
                    return {parse_response(res->body), latency};
                }
                rec.error = "HTTP " + std::to_string(res->status);
                retry = detail::retryable_status(res->status);
                if (!retry) {
                    log(rec);
                    std::string detail_msg;
                    try {
                        parse_response(res->body);
                    } catch (const Error& e) {
                        detail_msg = std::string(": ") + e.what();
                    }
                    throw Error(ErrorCode::backend, rec.error + detail_msg);
                }
            }
            last_error = rec.error;
            if (attempt < config_.retry.max_attempts) rec.backoff_ms = config_.retry.backoff_ms(attempt);
            log(rec);
            if (rec.backoff_ms > 0) sleeper_(std::chrono::milliseconds(static_cast<long long>(rec.backoff_ms)));
        }
        throw Error(ErrorCode::transport, "request failed after " + std::to_string(config_.retry.max_attempts) +
                                              " attempts: " + last_error);
    }

    std::string name() const override { return "http:" + config_.base_url; }

    std::vector<AttemptRecord> attempts() const {
        std::lock_guard lock(mu_);
        return attempts_;
    }

    void on_attempt(std::function<void(const AttemptRecord&)> sink) { sink_ = std::move(sink); }

private:
    void log(const AttemptRecord& rec) {
        {
            std::lock_guard lock(mu_);
            attempts_.push_back(rec);
        }
        if (sink_) sink_(rec);
    }

    HttpBackendConfig config_;
    Sleeper sleeper_;
    detail::SplitUrl url_;
    mutable std::mutex mu_;
    std::vector<AttemptRecord> attempts_;
    std::function<void(const AttemptRecord&)> sink_;
};

}  // namespace standardize
