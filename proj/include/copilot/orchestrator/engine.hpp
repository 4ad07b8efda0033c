// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/orchestrator/agent_registry.hpp"
#include "copilot/orchestrator/checkpoint.hpp"
#include "copilot/orchestrator/graph_state.hpp"
#include "copilot/orchestrator/supervisor.hpp"

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace copilot::orchestrator {

struct TraceEvent {
    enum class Kind { Routing, AgentStart, Step, AgentEnd };

    Kind kind = Kind::Routing;
    std::string agent;
    std::optional<RoutingDecision> decision;
    std::optional<ReactStep> step;
};

struct Trace {
    std::vector<TraceEvent> events;

    std::vector<RoutingDecision> decisions() const;
    /// Agents activated, in first-activation order.
    std::vector<std::string> agents() const;
    /// Tools invoked, in first-invocation order.
    std::vector<std::string> tools() const;
    std::vector<std::string> artifacts() const;
    std::size_t activations() const;
};

void to_json(Json& j, const Trace& trace);

struct TurnResult {
    bool ok = false;
    Message final;
    Trace trace;
    std::size_t step_count = 0;
    std::string failure_category;  // "budget", "timeout", "routing", "guardrail", ...
    std::string error;
    std::optional<CheckpointToken> checkpoint;
};

struct EngineConfig {
    std::size_t step_budget = 16;
    std::chrono::milliseconds turn_timeout{std::chrono::minutes(10)};
    SupervisorConfig supervisor;
};

/// Runs turns over in-memory sessions. Concurrent sessions are independent;
/// turns within one session are serialized. A failed turn leaves the session
/// transcript untouched.
class Engine {
public:
    Engine(EngineConfig config, const AgentRegistry& agents, const ToolRegistry& tools, gateway::Gateway& gateway);

    TurnResult run_turn(const std::string& session_id, const std::string& user_message, const RunMode& mode);

    bool has_session(const std::string& session_id) const;
    GraphState session(const std::string& session_id) const;

    CheckpointToken save_checkpoint(const GraphState& state);
    GraphState restore_checkpoint(const std::string& token) const;
    /// Replaces a session's state with a checkpointed one.
    void resume_from(const std::string& token);

    const EngineConfig& config() const noexcept { return config_; }
    const AgentRegistry& agents() const noexcept { return agents_; }
    const ToolRegistry& tools() const noexcept { return tools_; }

private:
    struct Session {
        std::mutex turn;
        mutable std::mutex state_mutex;
        GraphState state;
    };

    std::shared_ptr<Session> session_for(const std::string& session_id);
    void check_mode(const RunMode& mode) const;

    EngineConfig config_;
    const AgentRegistry& agents_;
    const ToolRegistry& tools_;
    gateway::Gateway& gateway_;
    CheckpointStore checkpoints_;

    mutable std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

} // namespace copilot::orchestrator
