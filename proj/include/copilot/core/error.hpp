// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace copilot {

enum class ErrorKind {
    InvalidArgument,
    Precondition,
    NotFound,
    AlreadyExists,
    Validation,
    Parse,
    Io,
    Budget,
    Timeout,
    Guardrail,
    Transport,
    MalformedPayload,
    Backend,
    Routing,
    NotFinished,
    JobFailed,
    Unavailable,
};

/// Stable lowercase name used in traces, HTTP error bodies and the eval taxonomy.
std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view category() const noexcept { return to_string(kind_); }

private:
    ErrorKind kind_;
};

} // namespace copilot
