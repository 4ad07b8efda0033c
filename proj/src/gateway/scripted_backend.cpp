// SPDX-License-Identifier: Apache-2.0
#include "copilot/gateway/scripted_backend.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/text.hpp"
#include "copilot/core/util.hpp"

#include <algorithm>

namespace copilot::gateway {

namespace {

constexpr std::string_view kSupervisor = "supervisor";

LastTurn parse_last_turn(const std::string& s)
{
    if (s == "any")
        return LastTurn::Any;
    if (s == "user")
        return LastTurn::User;
    if (s == "tool")
        return LastTurn::Tool;
    if (s == "agent")
        return LastTurn::Agent;
    throw Error(ErrorKind::Parse, "unknown 'last' value '" + s + "'");
}

const Message* last_non_system(const std::vector<Message>& messages)
{
    for (auto it = messages.rbegin(); it != messages.rend(); ++it)
        if (it->role != Role::System)
            return &*it;
    return nullptr;
}

bool is_agent_return(const Message& m)
{
    return m.role == Role::Assistant && m.tool_calls.empty() && !m.origin_agent.empty() &&
           m.origin_agent != kSupervisor;
}

std::size_t last_user_index(const std::vector<Message>& messages)
{
    for (std::size_t i = messages.size(); i-- > 0;)
        if (messages[i].role == Role::User)
            return i;
    return 0;
}

std::string latest_task(const std::vector<Message>& messages)
{
    for (auto it = messages.rbegin(); it != messages.rend(); ++it)
        if (it->role == Role::User)
            return it->content;
    return {};
}

std::string first_job_id(std::string_view s)
{
    for (auto pos = s.find("job-"); pos != std::string_view::npos; pos = s.find("job-", pos + 1)) {
        if (pos > 0 && text::is_ident_char(s[pos - 1]))
            continue;
        auto end = pos + 4;
        while (end < s.size() && std::isxdigit(static_cast<unsigned char>(s[end])))
            ++end;
        if (end > pos + 4)
            return std::string(s.substr(pos, end - pos));
    }
    return {};
}

} // namespace

bool RuleMatcher::catch_all() const noexcept
{
    return !agent && last == LastTurn::Any && any_of.empty() && all_of.empty() && none_of.empty();
}

void from_json(const Json& j, ScriptedRule& rule)
{
    rule.name = j.value("name", std::string{});
    rule.when = RuleMatcher{};
    if (j.contains("when")) {
        const auto& w = j["when"];
        if (w.contains("agent"))
            rule.when.agent = w["agent"].get<std::string>();
        rule.when.last = parse_last_turn(w.value("last", std::string("any")));
        rule.when.any_of = w.value("any", std::vector<std::string>{});
        rule.when.all_of = w.value("all", std::vector<std::string>{});
        rule.when.none_of = w.value("none", std::vector<std::string>{});
    }
    const auto& r = j.at("respond");
    if (r.contains("text"))
        rule.text = r["text"].get<std::string>();
    else
        rule.text.reset();
    rule.tool_calls.clear();
    auto calls = r.value("tool_calls", Json::array());
    for (const auto& c : calls) {
        ScriptedToolCall call;
        call.name = c.at("name").get<std::string>();
        auto args = c.value("args", Json::object());
        for (const auto& [k, v] : args.items())
            call.args[k] = v.is_string() ? v.get<std::string>() : v.dump();
        rule.tool_calls.push_back(std::move(call));
    }
}

void ScriptedRules::check() const
{
    bool has_catch_all = std::any_of(rules.begin(), rules.end(), [](const auto& r) { return r.when.catch_all(); });
    if (!has_catch_all)
        throw Error(ErrorKind::Validation, "scripted rules need at least one catch-all rule");
}

ScriptedRules ScriptedRules::from_json_doc(const Json& doc)
{
    ScriptedRules out;
    const auto& list = doc.is_array() ? doc : doc.at("rules");
    for (const auto& r : list)
        out.rules.push_back(r.get<ScriptedRule>());
    out.check();
    return out;
}

ScriptedRules ScriptedRules::load(const std::filesystem::path& path)
{
    auto doc = Json::parse(read_file(path), nullptr, false, true);
    if (doc.is_discarded())
        throw Error(ErrorKind::Parse, "scripted rules file is not valid JSON: " + path.string());
    return from_json_doc(doc);
}

namespace {

bool matches(const RuleMatcher& m, const ModelRequest& request)
{
    if (m.agent && *m.agent != request.agent)
        return false;
    if (m.last != LastTurn::Any) {
        const Message* last = last_non_system(request.messages);
        if (!last)
            return false;
        switch (m.last) {
        case LastTurn::User:
            if (last->role != Role::User)
                return false;
            break;
        case LastTurn::Tool:
            if (last->role != Role::Tool)
                return false;
            break;
        case LastTurn::Agent:
            if (!is_agent_return(*last))
                return false;
            break;
        case LastTurn::Any: break;
        }
    }
    auto task = text::to_lower(latest_task(request.messages));
    auto has = [&](const std::string& kw) { return task.find(text::to_lower(kw)) != std::string::npos; };
    if (!m.any_of.empty() && std::none_of(m.any_of.begin(), m.any_of.end(), has))
        return false;
    if (!std::all_of(m.all_of.begin(), m.all_of.end(), has))
        return false;
    if (std::any_of(m.none_of.begin(), m.none_of.end(), has))
        return false;
    return true;
}

} // namespace

std::optional<std::size_t> first_matching_rule(const ScriptedRules& rules, const ModelRequest& request)
{
    for (std::size_t i = 0; i < rules.rules.size(); ++i)
        if (matches(rules.rules[i].when, request))
            return i;
    return std::nullopt;
}

std::string expand_template(const std::string& tmpl, const ModelRequest& request)
{
    if (tmpl.find("{{") == std::string::npos)
        return tmpl;
    const auto& msgs = request.messages;
    auto task = latest_task(msgs);
    auto head = std::string(text::trim(text::split_lines(task).front()));

    std::string last_tool, last_agent_output, last_agent;
    for (auto it = msgs.rbegin(); it != msgs.rend(); ++it)
        if (it->role == Role::Tool) {
            last_tool = it->content;
            break;
        }
    for (auto it = msgs.rbegin(); it != msgs.rend(); ++it)
        if (is_agent_return(*it)) {
            last_agent_output = it->content;
            last_agent = it->origin_agent;
            break;
        }

    std::vector<std::string> agents, tools;
    for (std::size_t i = last_user_index(msgs); i < msgs.size(); ++i) {
        const auto& m = msgs[i];
        if (!m.origin_agent.empty() && m.origin_agent != kSupervisor &&
            std::find(agents.begin(), agents.end(), m.origin_agent) == agents.end())
            agents.push_back(m.origin_agent);
        for (const auto& c : m.tool_calls)
            if (std::find(tools.begin(), tools.end(), c.name) == tools.end())
                tools.push_back(c.name);
    }

    std::string out = tmpl;
    out = text::replace_all(out, "{{task_head}}", head);
    out = text::replace_all(out, "{{first_number}}", text::first_number(head).value_or(""));
    out = text::replace_all(out, "{{job_id}}", first_job_id(head));
    out = text::replace_all(out, "{{last_tool_output}}", last_tool);
    out = text::replace_all(out, "{{last_agent_output}}", last_agent_output);
    out = text::replace_all(out, "{{last_agent}}", last_agent);
    out = text::replace_all(out, "{{agents_used}}", agents.empty() ? "none" : text::join(agents, ", "));
    out = text::replace_all(out, "{{tools_used}}", tools.empty() ? "none" : text::join(tools, ", "));
    out = text::replace_all(out, "{{task}}", task);
    return out;
}

ModelResponse scripted_match(const ScriptedRules& rules, const ModelRequest& request)
{
    auto idx = first_matching_rule(rules, request);
    if (!idx)
        throw Error(ErrorKind::Backend, "no scripted rule matched (rules lack a catch-all)");
    const auto& rule = rules.rules[*idx];

    std::size_t prior_calls = 0;
    for (const auto& m : request.messages)
        prior_calls += m.tool_calls.size();

    ModelResponse resp;
    if (rule.text)
        resp.text = expand_template(*rule.text, request);
    for (std::size_t i = 0; i < rule.tool_calls.size(); ++i) {
        const auto& sc = rule.tool_calls[i];
        ToolCall call;
        call.call_id = "call_" + std::to_string(prior_calls + i + 1);
        call.name = sc.name;
        for (const auto& [k, v] : sc.args)
            call.raw_args[k] = expand_template(v, request);
        resp.tool_calls.push_back(std::move(call));
    }
    resp.finish_reason = resp.tool_calls.empty() ? "stop" : "tool_calls";
    if (!resp.text && resp.tool_calls.empty())
        resp.text = "";
    return resp;
}

ScriptedBackend::ScriptedBackend(std::string id, ScriptedRules rules)
    : id_(std::move(id)), rules_(std::move(rules))
{
    rules_.check();
}

ModelResponse ScriptedBackend::complete(const ModelRequest& request)
{
    return scripted_match(rules_, request);
}

} // namespace copilot::gateway
