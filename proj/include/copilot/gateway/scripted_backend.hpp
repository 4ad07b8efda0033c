// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/gateway/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace copilot::gateway {

/// Which message the request ends with. "agent" means an assistant message
/// returned by a sub-agent (used by the supervisor after a handoff).
enum class LastTurn { Any, User, Tool, Agent };

/// Conditions are conjunctive; an empty matcher is a catch-all.
struct RuleMatcher {
    std::optional<std::string> agent;
    LastTurn last = LastTurn::Any;
    std::vector<std::string> any_of;   // case-insensitive, over the latest user/task text
    std::vector<std::string> all_of;
    std::vector<std::string> none_of;

    bool catch_all() const noexcept;
};

struct ScriptedToolCall {
    std::string name;
    std::map<std::string, std::string> args;  // values are templates
};

/// Response templates may use {{task}}, {{task_head}}, {{first_number}},
/// {{last_tool_output}}, {{last_agent_output}}, {{last_agent}},
/// {{agents_used}}, {{tools_used}} and {{job_id}} (first job-<hex> token of the task head).
struct ScriptedRule {
    std::string name;
    RuleMatcher when;
    std::optional<std::string> text;
    std::vector<ScriptedToolCall> tool_calls;
};

void from_json(const Json& j, ScriptedRule& rule);

struct ScriptedRules {
    std::vector<ScriptedRule> rules;

    /// Throws Error(Validation) unless some rule is a catch-all for every agent.
    void check() const;

    static ScriptedRules from_json_doc(const Json& doc);
    static ScriptedRules load(const std::filesystem::path& path);
};

/// Index of the first rule whose matcher accepts the request, if any.
std::optional<std::size_t> first_matching_rule(const ScriptedRules& rules, const ModelRequest& request);

/// First matching rule wins; the result is a pure function of (rules, request).
ModelResponse scripted_match(const ScriptedRules& rules, const ModelRequest& request);

/// Expands {{...}} placeholders against the request transcript.
std::string expand_template(const std::string& tmpl, const ModelRequest& request);

class ScriptedBackend final : public Backend {
public:
    ScriptedBackend(std::string id, ScriptedRules rules);

    std::string id() const override { return id_; }
    ModelResponse complete(const ModelRequest& request) override;

private:
    std::string id_;
    ScriptedRules rules_;
};

} // namespace copilot::gateway
