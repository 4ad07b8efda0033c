// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/runtime/react_loop.hpp"
#include "copilot/runtime/tool_registry.hpp"

#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace copilot::orchestrator {

struct AgentHandle {
    std::size_t index = 0;
    std::string name;
};

/// Agents addressable by the supervisor and by Direct Tool mode. Populated at
/// startup from the configuration document.
class AgentRegistry {
public:
    /// Throws AlreadyExists on a duplicate name, NotFound when a referenced tool
    /// is not in `tools`, Validation on an empty prompt.
    AgentHandle register_agent(AgentSpec spec, const ToolRegistry& tools);

    bool contains(const std::string& name) const;
    const AgentSpec& get(const std::string& name) const;
    std::vector<AgentSpec> agents() const;  // registration order
    std::vector<std::string> names() const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::deque<AgentSpec> agents_;
    std::map<std::string, std::size_t> by_name_;
};

} // namespace copilot::orchestrator
