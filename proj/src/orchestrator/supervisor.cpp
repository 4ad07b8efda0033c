// SPDX-License-Identifier: Apache-2.0
#include "copilot/orchestrator/supervisor.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/text.hpp"

namespace copilot::orchestrator {

std::string supervisor_system_prompt(const SupervisorConfig& config, const AgentRegistry& registry)
{
    std::string out = config.prompt;
    out += "\n\nAvailable sub-agents:\n";
    for (const auto& a : registry.agents())
        out += "- " + a.name + ": " + a.description + "\n";
    out += "\nReply with exactly one JSON object: {\"route\": \"<agent>\"} to delegate, "
           "{\"respond\": \"<answer>\"} to answer directly, or {\"clarify\": \"<question>\"} "
           "when the request is too ambiguous to route. You may instead call a transfer_to_<agent> tool.";
    return out;
}

std::vector<ToolSpec> transfer_tools(const AgentRegistry& registry)
{
    std::vector<ToolSpec> out;
    for (const auto& a : registry.agents())
        out.push_back(ToolSpec{std::string(kTransferPrefix) + a.name, "Delegate the request to " + a.name + ". " + a.description, {}, true});
    return out;
}

namespace {

std::string strip_fence(std::string_view s)
{
    s = text::trim(s);
    if (s.substr(0, 3) == "```") {
        auto nl = s.find('\n');
        auto close = s.rfind("```");
        if (nl != std::string_view::npos && close != std::string_view::npos && close > nl)
            s = s.substr(nl + 1, close - nl - 1);
    }
    return std::string(text::trim(s));
}

} // namespace

RoutingDecision parse_directive(const gateway::ModelResponse& response, const AgentRegistry& registry)
{
    RoutingDecision d;
    auto text_body = response.text.value_or("");

    for (const auto& call : response.tool_calls) {
        if (call.name.rfind(kTransferPrefix, 0) != 0)
            continue;
        auto target = call.name.substr(kTransferPrefix.size());
        if (registry.contains(target)) {
            d.kind = RoutingDecision::Kind::Handoff;
            d.target = target;
            d.rationale = text_body;
            return d;
        }
    }

    auto body = strip_fence(text_body);
    if (!body.empty() && body.front() == '{') {
        auto j = Json::parse(body, nullptr, false);
        if (!j.is_discarded() && j.is_object()) {
            auto reason = j.value("reason", std::string{});
            if (j.contains("route") && j["route"].is_string()) {
                auto target = j["route"].get<std::string>();
                if (registry.contains(target)) {
                    d.kind = RoutingDecision::Kind::Handoff;
                    d.target = target;
                    d.rationale = reason;
                    return d;
                }
                d.kind = RoutingDecision::Kind::RespondDirectly;
                d.content = j.value("respond", std::string{});
                d.rationale = "route names unregistered agent '" + target + "'";
                return d;
            }
            if (j.contains("clarify") && j["clarify"].is_string()) {
                d.kind = RoutingDecision::Kind::Clarify;
                d.content = j["clarify"].get<std::string>();
                d.rationale = reason;
                return d;
            }
            if (j.contains("respond") && j["respond"].is_string()) {
                d.kind = RoutingDecision::Kind::RespondDirectly;
                d.content = j["respond"].get<std::string>();
                d.rationale = reason;
                return d;
            }
        }
    }
    d.kind = RoutingDecision::Kind::RespondDirectly;
    d.content = text_body;
    d.rationale = "free-text completion";
    return d;
}

RoutingDecision supervisor_decide(const GraphState& state, const AgentRegistry& registry, gateway::Gateway& gateway,
                                  const SupervisorConfig& config)
{
    if (state.mode.is_direct())
        throw Error(ErrorKind::Precondition, "supervisor_decide requires FullCopilot mode");
    if (state.transcript.empty())
        throw Error(ErrorKind::Precondition, "supervisor_decide needs a non-empty transcript");

    gateway::ModelRequest request;
    request.messages.push_back(Message::system(supervisor_system_prompt(config, registry)));
    request.messages.insert(request.messages.end(), state.transcript.begin(), state.transcript.end());
    request.tool_specs = transfer_tools(registry);
    request.backend = config.model_binding;
    request.agent = std::string(kSupervisorName);

    gateway::ModelResponse response;
    try {
        response = gateway.complete(request);
    } catch (const Error& err) {
        if (err.kind() == ErrorKind::Guardrail)
            throw;
        throw Error(ErrorKind::Routing, std::string("supervisor model failed: ") + err.what());
    } catch (const std::exception& err) {
        throw Error(ErrorKind::Routing, std::string("supervisor model failed: ") + err.what());
    }
    return parse_directive(response, registry);
}

} // namespace copilot::orchestrator
