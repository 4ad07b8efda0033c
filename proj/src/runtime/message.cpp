// SPDX-License-Identifier: Apache-2.0
#include "copilot/runtime/message.hpp"

#include "copilot/core/error.hpp"

#include <set>

namespace copilot {

std::string_view to_string(Role role) noexcept
{
    switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    case Role::Tool: return "tool";
    }
    return "user";
}

Role parse_role(std::string_view s)
{
    if (s == "system")
        return Role::System;
    if (s == "user")
        return Role::User;
    if (s == "assistant")
        return Role::Assistant;
    if (s == "tool")
        return Role::Tool;
    throw Error(ErrorKind::Parse, "unknown role '" + std::string(s) + "'");
}

Message Message::user(std::string text) { return {Role::User, std::move(text), {}, {}, {}}; }
Message Message::system(std::string text) { return {Role::System, std::move(text), {}, {}, {}}; }
Message Message::assistant(std::string text, std::string agent)
{
    return {Role::Assistant, std::move(text), {}, {}, std::move(agent)};
}
Message Message::tool(std::string call_id, std::string payload, std::string agent)
{
    return {Role::Tool, std::move(payload), {}, std::move(call_id), std::move(agent)};
}

void to_json(Json& j, const ToolCall& call)
{
    j = Json{{"call_id", call.call_id}, {"name", call.name}, {"args", call.raw_args}};
}

void from_json(const Json& j, ToolCall& call)
{
    call.call_id = j.at("call_id").get<std::string>();
    call.name = j.at("name").get<std::string>();
    call.raw_args = j.value("args", std::map<std::string, std::string>{});
}

void to_json(Json& j, const Message& m)
{
    j = Json{{"role", to_string(m.role)}, {"content", m.content}};
    if (!m.tool_calls.empty())
        j["tool_calls"] = m.tool_calls;
    if (!m.tool_call_id.empty())
        j["tool_call_id"] = m.tool_call_id;
    if (!m.origin_agent.empty())
        j["origin_agent"] = m.origin_agent;
}

void from_json(const Json& j, Message& m)
{
    m.role = parse_role(j.at("role").get<std::string>());
    m.content = j.value("content", std::string{});
    m.tool_calls = j.value("tool_calls", std::vector<ToolCall>{});
    m.tool_call_id = j.value("tool_call_id", std::string{});
    m.origin_agent = j.value("origin_agent", std::string{});
}

bool tool_messages_paired(const std::vector<Message>& messages)
{
    std::set<std::string> issued;
    std::set<std::string> answered;
    for (const auto& m : messages) {
        for (const auto& call : m.tool_calls)
            issued.insert(call.call_id);
        if (m.role == Role::Tool) {
            if (!issued.count(m.tool_call_id) || answered.count(m.tool_call_id))
                return false;
            answered.insert(m.tool_call_id);
        }
    }
    return true;
}

} // namespace copilot
