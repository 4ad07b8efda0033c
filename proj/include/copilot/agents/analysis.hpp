// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/dataplane/artifacts.hpp"
#include "copilot/dataplane/dataplane.hpp"
#include "copilot/gateway/gateway.hpp"
#include "copilot/sandbox/filter.hpp"
#include "copilot/sandbox/sandbox.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace copilot::agents {

struct AnalysisConfig {
    std::string codegen_backend;                // empty: gateway default
    std::string codegen_binding = "analysis_codegen";
    std::size_t search_k = 5;
    std::size_t preview_lines = 15;
    sandbox::FilterPolicy policy = sandbox::FilterPolicy::defaults();
};

struct AnalysisResult {
    std::string record_id;
    std::string file_name;
    std::string narrative;
    std::string generated_script;
    std::string sanitized_script;
    bool executed = false;
    std::string rejection;        // tier-2 rejection reason, if any
    std::string sandbox_failure;  // failure category, if execution failed
    std::string stdout_text;
    std::vector<std::string> figures;  // artifact ids

    /// Narrative, figure links, and execution output in one block for the agent.
    std::string render() const;
};

/// Splits model output into narrative and the first fenced python block.
std::pair<std::string, std::string> split_narrative_and_code(const std::string& model_text);

/// Metadata lookup -> fetch -> codegen -> tier-2 filter -> sandbox -> persist figures.
class DatasetAnalyzer {
public:
    DatasetAnalyzer(AnalysisConfig config, dataplane::DataPlane& plane, dataplane::ArtifactStore& artifacts,
                    gateway::Gateway& gateway, sandbox::Sandbox& sandbox);

    /// Throws Error(NotFound) when no dataset matches and Error(Precondition)
    /// when nothing has been ingested.
    AnalysisResult analyze(const std::string& query, const std::string& session_id);

    /// Dataset the pipeline would pick: top score, ties to the most recent ingestion.
    std::optional<std::string> select_dataset(const std::string& query) const;

private:
    std::mutex& dataset_lock(const std::string& record_id);

    AnalysisConfig config_;
    dataplane::DataPlane& plane_;
    dataplane::ArtifactStore& artifacts_;
    gateway::Gateway& gateway_;
    sandbox::Sandbox& sandbox_;
    std::mutex locks_mu_;
    std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

} // namespace copilot::agents
