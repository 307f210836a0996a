// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <thread>

#include <gtest/gtest.h>

#include "standardize/http_backend.hpp"

using namespace standardize;

namespace {

std::string ok_body(const std::string& content) {
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

// Fake chat-completions server; `statuses` lists the reply status per call.
class FakeServer {
public:
    explicit FakeServer(std::vector<int> statuses, std::string error_body = "")
        : statuses_(std::move(statuses)), error_body_(std::move(error_body)) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            std::size_t i = calls_.fetch_add(1);
            {
                std::lock_guard lock(mu_);
                bodies_.push_back(req.body);
                auth_.push_back(req.get_header_value("Authorization"));
            }
            int status = i < statuses_.size() ? statuses_[i] : 200;
            res.status = status;
            res.set_content(status == 200 ? ok_body("reply " + std::to_string(i)) : error_body_, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~FakeServer() {
        server_.stop();
        thread_.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
    std::size_t calls() const { return calls_.load(); }
    std::vector<std::string> bodies() const {
        std::lock_guard lock(mu_);
        return bodies_;
    }
    std::vector<std::string> auth() const {
        std::lock_guard lock(mu_);
        return auth_;
    }

private:
    httplib::Server server_;
    std::vector<int> statuses_;
    std::string error_body_;
    int port_ = 0;
    std::thread thread_;
    std::atomic<std::size_t> calls_{0};
    mutable std::mutex mu_;
    std::vector<std::string> bodies_;
    std::vector<std::string> auth_;
};

struct Backoffs {
    std::vector<long long> ms;
    HttpBackend::Sleeper sleeper() {
        return [this](std::chrono::milliseconds d) { ms.push_back(d.count()); };
    }
};

HttpBackendConfig config_for(const FakeServer& s, int attempts = 5) {
    HttpBackendConfig c;
    c.base_url = s.url();
    c.api_key = "sk-test";
    c.retry.max_attempts = attempts;
    c.read_timeout_s = 5;
    return c;
}

}  // namespace

TEST(RetryPolicy, ExponentialWithCap) {
    RetryPolicy p;
    EXPECT_EQ(p.backoff_ms(1), 500.0);
    EXPECT_EQ(p.backoff_ms(2), 1000.0);
    EXPECT_EQ(p.backoff_ms(4), 4000.0);
    EXPECT_EQ(p.backoff_ms(10), 16000.0);
}

TEST(HttpBackend, SuccessSendsRequestShape) {
    FakeServer s({200});
    Backoffs b;
    HttpBackend backend(config_for(s), b.sleeper());
    DecodingConfig d;
    d.model_id = "test-model";
    d.max_new_tokens = 123;
    auto c = backend.generate("Hello", d);
    EXPECT_EQ(c.text, "reply 0");
    ASSERT_EQ(s.bodies().size(), 1u);
    auto body = nlohmann::json::parse(s.bodies()[0]);
    EXPECT_EQ(body["model"], "test-model");
    EXPECT_EQ(body["messages"][0]["role"], "user");
    EXPECT_EQ(body["messages"][0]["content"], "Hello");
    EXPECT_EQ(body["max_tokens"], 123);
    EXPECT_DOUBLE_EQ(body["top_p"].get<double>(), 0.95);
    EXPECT_FALSE(body.contains("temperature"));
    EXPECT_EQ(s.auth()[0], "Bearer sk-test");
    EXPECT_TRUE(b.ms.empty());
}

TEST(HttpBackend, RetriesRateLimitsWithBackoff) {
    FakeServer s({429, 429, 200});
    Backoffs b;
    HttpBackend backend(config_for(s), b.sleeper());
    EXPECT_EQ(backend.generate("x", DecodingConfig{}).text, "reply 2");
    auto log = backend.attempts();
    ASSERT_EQ(log.size(), 3u);
    EXPECT_EQ(log[0].status, 429);
    EXPECT_EQ(log[1].status, 429);
    EXPECT_EQ(log[2].status, 200);
    EXPECT_EQ(b.ms, (std::vector<long long>{500, 1000}));
}

TEST(HttpBackend, ExhaustedRetriesAreTransportErrors) {
    FakeServer s({503, 503, 503});
    Backoffs b;
    HttpBackend backend(config_for(s, 3), b.sleeper());
    try {
        backend.generate("x", DecodingConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::transport);
    }
    EXPECT_EQ(s.calls(), 3u);
    EXPECT_EQ(b.ms, (std::vector<long long>{500, 1000}));
}

TEST(HttpBackend, ClientErrorsAreNotRetried) {
    FakeServer s({400}, R"({"error": {"message": "bad model"}})");
    Backoffs b;
    HttpBackend backend(config_for(s), b.sleeper());
    try {
        backend.generate("x", DecodingConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::backend);
        EXPECT_NE(std::string(e.what()).find("bad model"), std::string::npos);
    }
    EXPECT_EQ(s.calls(), 1u);
}

TEST(HttpBackend, UnreachableHostIsTransport) {
    HttpBackendConfig c;
    c.base_url = "http://127.0.0.1:9";
    c.retry.max_attempts = 2;
    c.connect_timeout_s = 1;
    Backoffs b;
    HttpBackend backend(c, b.sleeper());
    try {
        backend.generate("x", DecodingConfig{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::transport);
    }
    EXPECT_EQ(b.ms.size(), 1u);
}

TEST(HttpBackend, ResponseParsing) {
    EXPECT_EQ(HttpBackend::parse_response(ok_body("hi")), "hi");
    EXPECT_THROW(HttpBackend::parse_response("not json"), Error);
    EXPECT_THROW(HttpBackend::parse_response(R"({"choices": []})"), Error);
    EXPECT_THROW(HttpBackend::parse_response(R"({"error": "quota"})"), Error);
}

TEST(HttpBackend, TemperatureOnlyWhenSet) {
    DecodingConfig d;
    d.temperature = 0.3;
    EXPECT_DOUBLE_EQ(HttpBackend::request_body("x", d)["temperature"].get<double>(), 0.3);
}

TEST(HttpBackend, ConfigValidation) {
    HttpBackendConfig c;
    c.base_url = "no-scheme";
    EXPECT_THROW(HttpBackend{c}, Error);
    HttpBackendConfig z;
    z.retry.max_attempts = 0;
    EXPECT_THROW(HttpBackend{z}, Error);
}
