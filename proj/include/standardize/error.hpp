// Copyright (C) 2026 The Standardize Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace standardize {

enum class ErrorCode {
    io,
    parse,
    schema,
    unknown_flag,
    unknown_level,
    unknown_standard,
    no_standard_found,
    no_level_found,
    ambiguous,
    missing_payload,
    empty_text,
    empty_payload,
    insufficient_items,
    no_exemplars,
    missing_flag,
    zero_std,
    length_mismatch,
    empty_input,
    not_applicable,
    invalid_argument,
    invalid_job,
    transport,
    backend,
    length_enforcement_exhausted,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::schema: return "schema";
    case ErrorCode::unknown_flag: return "unknown_flag";
    case ErrorCode::unknown_level: return "unknown_level";
    case ErrorCode::unknown_standard: return "unknown_standard";
    case ErrorCode::no_standard_found: return "no_standard_found";
    case ErrorCode::no_level_found: return "no_level_found";
    case ErrorCode::ambiguous: return "ambiguous";
    case ErrorCode::missing_payload: return "missing_payload";
    case ErrorCode::empty_text: return "empty_text";
    case ErrorCode::empty_payload: return "empty_payload";
    case ErrorCode::insufficient_items: return "insufficient_items";
    case ErrorCode::no_exemplars: return "no_exemplars";
    case ErrorCode::missing_flag: return "missing_flag";
    case ErrorCode::zero_std: return "zero_std";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::not_applicable: return "not_applicable";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::invalid_job: return "invalid_job";
    case ErrorCode::transport: return "transport";
    case ErrorCode::backend: return "backend";
    case ErrorCode::length_enforcement_exhausted: return "length_enforcement_exhausted";
    }
    return "unknown";
}

/// Every failure raised by the library. `candidates` lists the competing
/// names for ambiguity and lookup failures so callers can report them.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::vector<std::string> candidates = {})
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          candidates_(std::move(candidates)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::vector<std::string>& candidates() const noexcept { return candidates_; }

    /// Transport failures are the only ones worth retrying.
    bool retryable() const noexcept { return code_ == ErrorCode::transport; }

private:
    ErrorCode code_;
    std::vector<std::string> candidates_;
};

}  // namespace standardize
