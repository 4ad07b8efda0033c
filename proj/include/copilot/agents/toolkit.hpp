// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/agents/analysis.hpp"
#include "copilot/agents/hypothesis.hpp"
#include "copilot/agents/osti.hpp"
#include "copilot/jobs/jobs.hpp"
#include "copilot/orchestrator/agent_registry.hpp"
#include "copilot/runtime/tool_registry.hpp"

#include <memory>
#include <string>
#include <vector>

namespace copilot::agents {

/// Everything the domain tools call into. Null members leave their tools out.
struct ToolkitServices {
    std::shared_ptr<OstiClient> osti;
    std::shared_ptr<DatasetAnalyzer> analyzer;
    std::shared_ptr<HypothesisGenerator> hypothesis;
    std::shared_ptr<jobs::JobScheduler> jobs;
    std::shared_ptr<dataplane::ObjectStore> job_inputs;
    std::size_t default_osti_rows = 5;
};

/// Registers every available domain tool. Returns the names added.
std::vector<std::string> register_domain_tools(ToolRegistry& tools, const ToolkitServices& services);

/// The six stock agents. Agents whose tools are missing from `tools` are skipped.
std::vector<AgentSpec> default_agent_specs();

/// Registers default_agent_specs() whose tools all exist; returns their names.
std::vector<std::string> register_default_agents(orchestrator::AgentRegistry& agents, const ToolRegistry& tools,
                                                 const std::string& model_binding = {});

/// Job record rendered for the model; outputs carry download links.
std::string describe_job(const jobs::JobRecord& record);

} // namespace copilot::agents
