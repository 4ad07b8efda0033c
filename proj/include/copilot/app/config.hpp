// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/agents/analysis.hpp"
#include "copilot/agents/hypothesis.hpp"
#include "copilot/agents/osti.hpp"
#include "copilot/gateway/guardrail.hpp"
#include "copilot/jobs/jobs.hpp"
#include "copilot/jobs/simulation.hpp"
#include "copilot/jobs/uq.hpp"
#include "copilot/orchestrator/engine.hpp"
#include "copilot/sandbox/filter.hpp"
#include "copilot/sandbox/sandbox.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace copilot::app {

struct ServerConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string auth_header = "X-Auth-User";
    std::chrono::seconds request_timeout{600};
    std::size_t threads = 8;
};

struct BackendConfig {
    std::string id;
    std::string type;  // "scripted" | "chat_completions"
    std::filesystem::path rules;  // scripted
    Json settings = Json::object();  // chat_completions: base_url, path, model, api_key, timeout_ms, max_retries
    double rate_limit = 0;
};

struct StorageConfig {
    std::string kind = "memory";  // "memory" | "fs"
    std::filesystem::path root;
    bool async_index = false;
    std::filesystem::path drop_folder;   // crawled for data packages
    std::chrono::seconds crawl_interval{0};  // 0: crawl once at startup only
    std::filesystem::path inputs_dir;    // copied under "inputs/" in the object store
};

/// Whole-application configuration, loaded from one JSON document (comments allowed).
/// Relative paths resolve against the document's directory.
struct AppConfig {
    std::filesystem::path base_dir;
    ServerConfig server;

    std::string default_backend;
    std::vector<BackendConfig> backends;
    std::map<std::string, std::string> bindings;  // supervisor, agents, analysis_codegen, ...
    gateway::GuardrailPolicy guardrail = gateway::GuardrailPolicy::defaults();

    orchestrator::EngineConfig engine;
    std::optional<std::vector<AgentSpec>> agents;  // absent: stock agents

    sandbox::SandboxConfig sandbox;
    sandbox::FilterPolicy filter = sandbox::FilterPolicy::defaults();
    StorageConfig storage;
    jobs::SchedulerConfig jobs;
    jobs::SimParams simulation;
    jobs::UqConfig uq;
    agents::OstiConfig osti;
    std::size_t osti_default_rows = 5;
    std::size_t analysis_preview_lines = 15;

    std::string binding(const std::string& name) const;
};

AppConfig app_config_from_json(const Json& doc, const std::filesystem::path& base_dir);
AppConfig load_app_config(const std::filesystem::path& path);

} // namespace copilot::app
