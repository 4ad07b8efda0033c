// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/core/error.hpp"
#include "copilot/gateway/gateway.hpp"
#include "copilot/runtime/tool_registry.hpp"

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace copilot {

struct AgentSpec {
    std::string name;
    std::string description;   // one line shown to the supervisor
    std::string system_prompt;
    std::vector<std::string> tool_names;
    std::string model_binding; // backend id; empty means gateway default

    bool operator==(const AgentSpec&) const = default;
};

void to_json(Json& j, const AgentSpec& spec);
void from_json(const Json& j, AgentSpec& spec);

enum class StepKind { Model, Tool };

struct ReactStep {
    StepKind kind = StepKind::Model;
    std::string agent;
    std::optional<gateway::ModelResponse> response;  // Model steps
    std::optional<ToolCall> call;                    // Tool steps
    std::optional<Observation> observation;          // Tool steps

    bool operator==(const ReactStep&) const = default;
};

void to_json(Json& j, const ReactStep& step);

struct ReactOptions {
    std::size_t budget = 16;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    /// Restricts callable tools (Direct Tool mode); empty means the agent's own list.
    std::vector<std::string> tool_filter;
    /// Call ids already present in the session; colliding model ids are renamed.
    std::set<std::string> reserved_call_ids;
    ToolContext context;
};

struct ReactResult {
    bool ok = false;
    std::optional<Message> final;
    std::vector<ReactStep> trace;
    std::vector<Message> messages;  // everything the loop appended, in order
    std::size_t steps = 0;
    std::optional<ErrorKind> failure;
    std::string error;
};

/// Runs one stateless ReAct agent until a completion without tool calls or
/// until the step budget runs out. Tool errors are fed back as observations.
ReactResult react_loop(const AgentSpec& agent, const std::vector<Message>& task, gateway::Gateway& gateway,
                       const ToolRegistry& tools, const ReactOptions& options);

} // namespace copilot
