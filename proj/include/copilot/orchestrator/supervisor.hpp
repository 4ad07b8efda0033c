// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/gateway/gateway.hpp"
#include "copilot/orchestrator/agent_registry.hpp"
#include "copilot/orchestrator/graph_state.hpp"

#include <string>

namespace copilot::orchestrator {

inline constexpr std::string_view kSupervisorName = "supervisor";
inline constexpr std::string_view kTransferPrefix = "transfer_to_";

struct SupervisorConfig {
    std::string prompt;
    std::string model_binding;
};

/// Configured prompt followed by the agent roster and the directive format.
std::string supervisor_system_prompt(const SupervisorConfig& config, const AgentRegistry& registry);

/// One argument-free transfer_to_<agent> tool per registered agent.
std::vector<ToolSpec> transfer_tools(const AgentRegistry& registry);

/// Structured directives: a transfer_to_<agent> tool call, or a JSON object
/// {"route": agent} / {"respond": text} / {"clarify": text}. Anything else,
/// including a route to an unregistered agent, is RespondDirectly.
RoutingDecision parse_directive(const gateway::ModelResponse& response, const AgentRegistry& registry);

/// Requires FullCopilot mode. Backend failures surface as Error(Routing)
/// unless the cause is a guardrail block; the state is never modified.
RoutingDecision supervisor_decide(const GraphState& state, const AgentRegistry& registry, gateway::Gateway& gateway,
                                  const SupervisorConfig& config);

} // namespace copilot::orchestrator
