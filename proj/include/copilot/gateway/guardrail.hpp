// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/runtime/message.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace copilot::gateway {

enum class PiiPattern { Credential, NetworkAddress };

std::string_view to_string(PiiPattern p) noexcept;
PiiPattern parse_pii_pattern(std::string_view s);

struct GuardrailPolicy {
    bool enabled = true;
    std::vector<std::string> blocked_substrings;
    std::vector<PiiPattern> pii_patterns;

    /// eval, exec, open(, input(, subprocess plus both PII categories.
    static GuardrailPolicy defaults();

    void check() const;
};

void to_json(Json& j, const GuardrailPolicy& p);
void from_json(const Json& j, GuardrailPolicy& p);

struct ScreenResult {
    bool blocked = false;
    std::string category;  // "blocked_keyword" | "credential" | "network_address"
    std::string reason;    // never contains matched secret content

    explicit operator bool() const noexcept { return !blocked; }
};

/// Blocks iff any blocked substring (case-sensitive) or PII pattern matches.
/// Categories are checked in order: keyword, credential, network address.
ScreenResult guardrail_screen(std::string_view text, const GuardrailPolicy& policy);

/// Screens every non-system message body and tool-call argument.
ScreenResult guardrail_screen(const std::vector<Message>& messages, const GuardrailPolicy& policy);

namespace detail {
bool has_credential_token(std::string_view text);
bool has_dotted_quad(std::string_view text);
} // namespace detail

} // namespace copilot::gateway
