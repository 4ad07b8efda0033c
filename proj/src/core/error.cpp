// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/error.hpp"

namespace copilot {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::AlreadyExists: return "already_exists";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::Budget: return "budget";
    case ErrorKind::Timeout: return "timeout";
    case ErrorKind::Guardrail: return "guardrail";
    case ErrorKind::Transport: return "transport";
    case ErrorKind::MalformedPayload: return "malformed_payload";
    case ErrorKind::Backend: return "backend";
    case ErrorKind::Routing: return "routing";
    case ErrorKind::NotFinished: return "not_finished";
    case ErrorKind::JobFailed: return "job_failed";
    case ErrorKind::Unavailable: return "unavailable";
    }
    return "error";
}

} // namespace copilot
