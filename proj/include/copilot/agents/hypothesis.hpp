// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/gateway/gateway.hpp"

#include <string>
#include <vector>

namespace copilot::agents {

inline constexpr const char* kToolPlanLabel = "Hypothesis from the generator tool:";
inline constexpr const char* kManualPlanLabel = "Manually constructed hypothesis based on the input parameters:";

struct ResearchPlan {
    std::vector<std::string> objectives;
    std::string theoretical_framing;
    std::string hypothesis;
    std::string text;    // model output exactly as returned (or the rendered fallback)
    std::string source;  // "tool", "fallback" or "template"

    bool complete() const;
    /// Label line followed by `text`; `text` is never altered.
    std::string render() const;
    Json to_json() const;
};

/// Best-effort split of a plan into sections headed Objectives / Theoretical framing / Hypothesis.
/// Missing sections are filled from the surrounding text so that all three are non-empty.
ResearchPlan parse_research_plan(const std::string& text);

struct HypothesisConfig {
    std::string tool_backend;  // empty: gateway default
    std::string tool_binding = "hypothesis_tool";
    std::string fallback_backend;
    std::string fallback_binding = "hypothesis_fallback";
};

class HypothesisGenerator {
public:
    HypothesisGenerator(HypothesisConfig config, gateway::Gateway& gateway);

    /// Throws Error(Precondition) for an empty topic. A backend error on the
    /// fallback call propagates.
    ResearchPlan generate(const std::string& topic);

private:
    HypothesisConfig config_;
    gateway::Gateway& gateway_;
};

} // namespace copilot::agents
