// SPDX-License-Identifier: Apache-2.0
#include "copilot/runtime/react_loop.hpp"

#include <algorithm>

namespace copilot {

void to_json(Json& j, const AgentSpec& s)
{
    j = Json{{"name", s.name},
             {"description", s.description},
             {"prompt", s.system_prompt},
             {"tools", s.tool_names},
             {"model", s.model_binding}};
}

void from_json(const Json& j, AgentSpec& s)
{
    s.name = j.at("name").get<std::string>();
    s.description = j.value("description", std::string{});
    s.system_prompt = j.value("prompt", std::string{});
    s.tool_names = j.value("tools", std::vector<std::string>{});
    s.model_binding = j.value("model", std::string{});
}

void to_json(Json& j, const ReactStep& step)
{
    j = Json{{"kind", step.kind == StepKind::Model ? "model" : "tool"}, {"agent", step.agent}};
    if (step.response)
        j["response"] = *step.response;
    if (step.call)
        j["call"] = *step.call;
    if (step.observation)
        j["observation"] = *step.observation;
}

namespace {

ReactResult fail(ReactResult r, ErrorKind kind, std::string message)
{
    r.ok = false;
    r.failure = kind;
    r.error = std::move(message);
    return r;
}

} // namespace

ReactResult react_loop(const AgentSpec& agent, const std::vector<Message>& task, gateway::Gateway& gateway,
                       const ToolRegistry& tools, const ReactOptions& options)
{
    ReactResult result;
    if (options.budget == 0)
        return fail(std::move(result), ErrorKind::Precondition, "react budget must be at least 1");

    const auto& allowed = options.tool_filter.empty() ? agent.tool_names : options.tool_filter;
    std::vector<ToolSpec> specs;
    for (const auto& name : allowed)
        specs.push_back(tools.spec(name));

    std::vector<Message> convo;
    convo.push_back(Message::system(agent.system_prompt));
    convo.insert(convo.end(), task.begin(), task.end());

    auto reserved = options.reserved_call_ids;
    auto out_of_time = [&] {
        return options.deadline && std::chrono::steady_clock::now() >= *options.deadline;
    };

    while (true) {
        if (result.steps >= options.budget)
            return fail(std::move(result), ErrorKind::Budget,
                        "agent '" + agent.name + "' exhausted its step budget of " + std::to_string(options.budget));
        if (out_of_time())
            return fail(std::move(result), ErrorKind::Timeout, "turn deadline passed inside agent '" + agent.name + "'");

        gateway::ModelRequest request;
        request.messages = convo;
        request.tool_specs = specs;
        request.backend = agent.model_binding;
        request.agent = agent.name;

        gateway::ModelResponse response;
        try {
            response = gateway.complete(request);
        } catch (const Error& err) {
            return fail(std::move(result), err.kind(), err.what());
        } catch (const std::exception& err) {
            return fail(std::move(result), ErrorKind::Backend, err.what());
        }
        ++result.steps;

        for (auto& call : response.tool_calls) {
            if (call.call_id.empty() || reserved.count(call.call_id)) {
                auto base = call.call_id.empty() ? std::string("call") : call.call_id;
                int n = 2;
                while (reserved.count(base + "~" + std::to_string(n)))
                    ++n;
                call.call_id = base + "~" + std::to_string(n);
            }
            reserved.insert(call.call_id);
        }
        result.trace.push_back(ReactStep{StepKind::Model, agent.name, response, std::nullopt, std::nullopt});

        if (response.tool_calls.empty()) {
            auto final = Message::assistant(response.text.value_or(""), agent.name);
            result.messages.push_back(final);
            result.final = std::move(final);
            result.ok = true;
            return result;
        }

        Message call_msg = Message::assistant(response.text.value_or(""), agent.name);
        call_msg.tool_calls = response.tool_calls;
        convo.push_back(call_msg);
        result.messages.push_back(call_msg);

        for (const auto& call : response.tool_calls) {
            if (result.steps >= options.budget)
                return fail(std::move(result), ErrorKind::Budget,
                            "agent '" + agent.name + "' exhausted its step budget of " +
                                std::to_string(options.budget));
            if (out_of_time())
                return fail(std::move(result), ErrorKind::Timeout,
                            "turn deadline passed inside agent '" + agent.name + "'");

            Observation obs;
            if (std::find(allowed.begin(), allowed.end(), call.name) == allowed.end()) {
                obs.call_id = call.call_id;
                obs.is_error = true;
                obs.payload = "Error (not_found): tool '" + call.name + "' is not available to agent '" + agent.name + "'";
            } else {
                obs = tools.invoke(call, options.context);
            }
            ++result.steps;
            result.trace.push_back(ReactStep{StepKind::Tool, agent.name, std::nullopt, call, obs});
            auto tool_msg = Message::tool(call.call_id, obs.payload, agent.name);
            convo.push_back(tool_msg);
            result.messages.push_back(std::move(tool_msg));
        }
    }
}

} // namespace copilot
