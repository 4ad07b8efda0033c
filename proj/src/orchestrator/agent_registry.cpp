// SPDX-License-Identifier: Apache-2.0
#include "copilot/orchestrator/agent_registry.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/text.hpp"

namespace copilot::orchestrator {

AgentHandle AgentRegistry::register_agent(AgentSpec spec, const ToolRegistry& tools)
{
    if (spec.name.empty())
        throw Error(ErrorKind::Validation, "agent name must not be empty");
    if (spec.name == "supervisor")
        throw Error(ErrorKind::Validation, "'supervisor' is reserved");
    if (text::trim(spec.system_prompt).empty())
        throw Error(ErrorKind::Validation, "agent '" + spec.name + "' has an empty prompt");
    for (const auto& tool : spec.tool_names)
        if (!tools.contains(tool))
            throw Error(ErrorKind::NotFound, "agent '" + spec.name + "' references unknown tool '" + tool + "'");

    std::lock_guard lock(mutex_);
    if (by_name_.count(spec.name))
        throw Error(ErrorKind::AlreadyExists, "agent '" + spec.name + "' is already registered");
    AgentHandle handle{agents_.size(), spec.name};
    by_name_[spec.name] = agents_.size();
    agents_.push_back(std::move(spec));
    return handle;
}

bool AgentRegistry::contains(const std::string& name) const
{
    std::lock_guard lock(mutex_);
    return by_name_.count(name) > 0;
}

const AgentSpec& AgentRegistry::get(const std::string& name) const
{
    std::lock_guard lock(mutex_);
    auto it = by_name_.find(name);
    if (it == by_name_.end())
        throw Error(ErrorKind::NotFound, "unknown agent '" + name + "'");
    return agents_[it->second];
}

std::vector<AgentSpec> AgentRegistry::agents() const
{
    std::lock_guard lock(mutex_);
    return {agents_.begin(), agents_.end()};
}

std::vector<std::string> AgentRegistry::names() const
{
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& a : agents_)
        out.push_back(a.name);
    return out;
}

std::size_t AgentRegistry::size() const
{
    std::lock_guard lock(mutex_);
    return agents_.size();
}

} // namespace copilot::orchestrator
