// SPDX-License-Identifier: Apache-2.0
#include "copilot/gateway/guardrail.hpp"

#include "copilot/core/error.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <map>

namespace copilot::gateway {

std::string_view to_string(PiiPattern p) noexcept
{
    switch (p) {
    case PiiPattern::Credential: return "credential";
    case PiiPattern::NetworkAddress: return "network_address";
    }
    return "credential";
}

PiiPattern parse_pii_pattern(std::string_view s)
{
    if (s == "credential")
        return PiiPattern::Credential;
    if (s == "network_address")
        return PiiPattern::NetworkAddress;
    throw Error(ErrorKind::Parse, "unknown PII pattern '" + std::string(s) + "'");
}

GuardrailPolicy GuardrailPolicy::defaults()
{
    GuardrailPolicy p;
    p.blocked_substrings = {"eval", "exec", "open(", "input(", "subprocess"};
    p.pii_patterns = {PiiPattern::Credential, PiiPattern::NetworkAddress};
    return p;
}

void GuardrailPolicy::check() const
{
    if (enabled && (blocked_substrings.empty() || pii_patterns.empty()))
        throw Error(ErrorKind::Validation, "enabled guardrail policy needs blocked substrings and PII patterns");
}

void to_json(Json& j, const GuardrailPolicy& p)
{
    Json patterns = Json::array();
    for (auto pat : p.pii_patterns)
        patterns.push_back(to_string(pat));
    j = Json{{"enabled", p.enabled}, {"blocked_substrings", p.blocked_substrings}, {"pii_patterns", patterns}};
}

void from_json(const Json& j, GuardrailPolicy& p)
{
    auto d = GuardrailPolicy::defaults();
    p.enabled = j.value("enabled", true);
    p.blocked_substrings = j.value("blocked_substrings", d.blocked_substrings);
    p.pii_patterns.clear();
    if (j.contains("pii_patterns")) {
        for (const auto& s : j["pii_patterns"])
            p.pii_patterns.push_back(parse_pii_pattern(s.get<std::string>()));
    } else {
        p.pii_patterns = d.pii_patterns;
    }
}

namespace detail {

namespace {

double shannon_bits_per_char(std::string_view s)
{
    if (s.empty())
        return 0.0;
    std::array<int, 256> counts{};
    for (unsigned char c : s)
        ++counts[c];
    double h = 0.0;
    for (int c : counts) {
        if (!c)
            continue;
        double p = static_cast<double>(c) / static_cast<double>(s.size());
        h -= p * std::log2(p);
    }
    return h;
}

struct KeyShape {
    std::string_view prefix;
    std::size_t min_len;
    std::size_t max_len;
    bool uppercase_only;
};

// Vendor access-key shapes: fixed prefix followed by a random-looking suffix.
constexpr std::array<KeyShape, 5> kShapes{{
    {"AKIA", 16, 16, true},
    {"ASIA", 16, 16, true},
    {"sk-", 20, 200, false},
    {"ghp_", 36, 36, false},
    {"xoxb-", 20, 200, false},
}};

constexpr double kMinSuffixEntropy = 3.0;

bool suffix_char(char c, bool uppercase_only)
{
    auto u = static_cast<unsigned char>(c);
    if (uppercase_only)
        return std::isupper(u) || std::isdigit(u);
    return std::isalnum(u) || c == '-' || c == '_';
}

} // namespace

bool has_credential_token(std::string_view text)
{
    for (const auto& shape : kShapes) {
        std::size_t pos = 0;
        while ((pos = text.find(shape.prefix, pos)) != std::string_view::npos) {
            bool left_ok = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
            auto start = pos + shape.prefix.size();
            auto end = start;
            while (end < text.size() && suffix_char(text[end], shape.uppercase_only))
                ++end;
            auto len = end - start;
            bool right_ok = end >= text.size() || !std::isalnum(static_cast<unsigned char>(text[end]));
            if (left_ok && right_ok && len >= shape.min_len && len <= shape.max_len &&
                shannon_bits_per_char(text.substr(start, len)) >= kMinSuffixEntropy)
                return true;
            ++pos;
        }
    }
    return false;
}

bool has_dotted_quad(std::string_view text)
{
    auto digit = [&](std::size_t i) { return i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); };
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!digit(i))
            continue;
        if (i > 0 && (digit(i - 1) || text[i - 1] == '.' || std::isalpha(static_cast<unsigned char>(text[i - 1]))))
            continue;
        std::size_t p = i;
        int groups = 0;
        bool ok = true;
        while (groups < 4) {
            std::size_t start = p;
            int value = 0;
            while (digit(p) && p - start < 4) {
                value = value * 10 + (text[p] - '0');
                ++p;
            }
            auto len = p - start;
            if (len == 0 || len > 3 || value > 255) {
                ok = false;
                break;
            }
            ++groups;
            if (groups < 4) {
                if (p < text.size() && text[p] == '.')
                    ++p;
                else {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok)
            continue;
        // Reject longer dotted runs such as version strings "1.2.3.4.5".
        if (digit(p) || (p + 1 < text.size() && text[p] == '.' && digit(p + 1)))
            continue;
        return true;
    }
    return false;
}

} // namespace detail

ScreenResult guardrail_screen(std::string_view text, const GuardrailPolicy& policy)
{
    if (!policy.enabled)
        return {};
    for (const auto& token : policy.blocked_substrings)
        if (!token.empty() && text.find(token) != std::string_view::npos)
            return {true, "blocked_keyword", "blocked keyword '" + token + "'"};
    for (auto pattern : policy.pii_patterns) {
        if (pattern == PiiPattern::Credential && detail::has_credential_token(text))
            return {true, "credential", "credential-shaped token detected"};
    }
    for (auto pattern : policy.pii_patterns) {
        if (pattern == PiiPattern::NetworkAddress && detail::has_dotted_quad(text))
            return {true, "network_address", "network address detected"};
    }
    return {};
}

ScreenResult guardrail_screen(const std::vector<Message>& messages, const GuardrailPolicy& policy)
{
    for (const auto& m : messages) {
        if (m.role == Role::System)
            continue;
        if (auto r = guardrail_screen(m.content, policy); r.blocked)
            return r;
        for (const auto& call : m.tool_calls)
            for (const auto& [k, v] : call.raw_args)
                if (auto r = guardrail_screen(v, policy); r.blocked)
                    return r;
    }
    return {};
}

} // namespace copilot::gateway
