// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/agents/toolkit.hpp"
#include "copilot/app/config.hpp"
#include "copilot/dataplane/artifacts.hpp"
#include "copilot/dataplane/dataplane.hpp"
#include "copilot/gateway/gateway.hpp"
#include "copilot/jobs/jobs.hpp"
#include "copilot/orchestrator/engine.hpp"
#include "copilot/sandbox/sandbox.hpp"

#include <memory>

namespace copilot::app {

/// The assembled back end: gateway, stores, sandbox, scheduler, tools, agents and engine.
class App {
public:
    explicit App(AppConfig config);
    ~App();
    App(const App&) = delete;
    App& operator=(const App&) = delete;

    const AppConfig& config() const noexcept { return config_; }
    gateway::Gateway& gateway() { return gateway_; }
    orchestrator::Engine& engine() { return *engine_; }
    const orchestrator::AgentRegistry& agents() const { return agents_; }
    const ToolRegistry& tools() const { return tools_; }
    dataplane::DataPlane& data() { return *data_; }
    dataplane::ArtifactStore& artifacts() { return *artifacts_; }
    dataplane::ObjectStore& objects() { return *objects_; }
    jobs::JobScheduler& jobs() { return *jobs_; }
    sandbox::Sandbox& sandbox() { return *sandbox_; }

    /// Uploads every file under `dir` as "inputs/<relative path>"; existing keys are kept.
    std::size_t seed_inputs(const std::filesystem::path& dir);
    /// One crawl of the configured drop folder; returns ingested record ids.
    std::vector<std::string> crawl_once();

    /// Stops the crawler and the job workers.
    void shutdown();

private:
    void build_gateway();

    AppConfig config_;
    gateway::Gateway gateway_;
    std::shared_ptr<dataplane::KvStore> kv_;
    std::shared_ptr<dataplane::ObjectStore> objects_;
    std::unique_ptr<dataplane::DataPlane> data_;
    std::shared_ptr<dataplane::ArtifactStore> artifacts_;
    std::unique_ptr<sandbox::Sandbox> sandbox_;
    std::shared_ptr<jobs::JobScheduler> jobs_;
    ToolRegistry tools_;
    orchestrator::AgentRegistry agents_;
    std::unique_ptr<orchestrator::Engine> engine_;
    std::unique_ptr<dataplane::Crawler> crawler_;
};

} // namespace copilot::app
