// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/core/util.hpp"
#include "copilot/runtime/message.hpp"

#include <optional>
#include <string>
#include <vector>

namespace copilot::orchestrator {

struct RunMode {
    enum class Kind { FullCopilot, DirectTool };

    Kind kind = Kind::FullCopilot;
    std::string agent;               // DirectTool only
    std::optional<std::string> tool; // DirectTool only, optional

    static RunMode full() { return {}; }
    static RunMode direct(std::string agent, std::optional<std::string> tool = std::nullopt)
    {
        return {Kind::DirectTool, std::move(agent), std::move(tool)};
    }
    bool is_direct() const noexcept { return kind == Kind::DirectTool; }

    bool operator==(const RunMode&) const = default;
};

struct GraphState {
    std::string session_id;
    std::vector<Message> transcript;
    std::optional<std::string> active_agent;
    std::optional<std::string> pending_handoff;
    RunMode mode;
    std::size_t step_count = 0;

    bool operator==(const GraphState&) const = default;
};

struct RoutingDecision {
    enum class Kind { Handoff, RespondDirectly, Clarify };

    Kind kind = Kind::RespondDirectly;
    std::string target;    // Handoff only
    std::string content;   // reply or clarifying question
    std::string rationale;

    bool operator==(const RoutingDecision&) const = default;
};

std::string_view to_string(RoutingDecision::Kind kind) noexcept;

struct CheckpointToken {
    std::string token;
    Timestamp created_at;
};

void to_json(Json& j, const RunMode& m);
void from_json(const Json& j, RunMode& m);
void to_json(Json& j, const GraphState& s);
void from_json(const Json& j, GraphState& s);
void to_json(Json& j, const RoutingDecision& d);

} // namespace copilot::orchestrator
