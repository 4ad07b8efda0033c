// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace copilot {

using Json = nlohmann::json;

enum class Role { System, User, Assistant, Tool };

std::string_view to_string(Role role) noexcept;
Role parse_role(std::string_view s);

/// A model-issued request to run one tool. Arguments arrive as text and are
/// normalized against the tool's schema before execution.
struct ToolCall {
    std::string call_id;
    std::string name;
    std::map<std::string, std::string> raw_args;

    bool operator==(const ToolCall&) const = default;
};

struct Message {
    Role role = Role::User;
    std::string content;
    std::vector<ToolCall> tool_calls;
    std::string tool_call_id;  // set on Role::Tool messages
    std::string origin_agent;  // empty for user messages

    bool operator==(const Message&) const = default;

    static Message user(std::string text);
    static Message system(std::string text);
    static Message assistant(std::string text, std::string agent = {});
    static Message tool(std::string call_id, std::string payload, std::string agent = {});
};

void to_json(Json& j, const ToolCall& call);
void from_json(const Json& j, ToolCall& call);
void to_json(Json& j, const Message& message);
void from_json(const Json& j, Message& message);

/// Checks that every tool message answers an earlier tool call in the same list.
bool tool_messages_paired(const std::vector<Message>& messages);

} // namespace copilot
