// SPDX-License-Identifier: Apache-2.0
#include "copilot/orchestrator/engine.hpp"

#include "copilot/core/error.hpp"

#include <algorithm>
#include <set>

namespace copilot::orchestrator {

namespace {

void push_unique(std::vector<std::string>& v, const std::string& s)
{
    if (std::find(v.begin(), v.end(), s) == v.end())
        v.push_back(s);
}

std::string_view kind_name(TraceEvent::Kind k)
{
    switch (k) {
    case TraceEvent::Kind::Routing: return "routing";
    case TraceEvent::Kind::AgentStart: return "agent_start";
    case TraceEvent::Kind::Step: return "step";
    case TraceEvent::Kind::AgentEnd: return "agent_end";
    }
    return "step";
}

/// What a sub-agent sees: the conversation without other agents' tool chatter.
std::vector<Message> agent_view(const std::vector<Message>& transcript)
{
    std::vector<Message> out;
    for (const auto& m : transcript) {
        if (m.role == Role::User || (m.role == Role::Assistant && m.tool_calls.empty()))
            out.push_back(m);
    }
    return out;
}

std::set<std::string> call_ids(const std::vector<Message>& transcript)
{
    std::set<std::string> ids;
    for (const auto& m : transcript)
        for (const auto& c : m.tool_calls)
            ids.insert(c.call_id);
    return ids;
}

} // namespace

std::vector<RoutingDecision> Trace::decisions() const
{
    std::vector<RoutingDecision> out;
    for (const auto& e : events)
        if (e.kind == TraceEvent::Kind::Routing && e.decision)
            out.push_back(*e.decision);
    return out;
}

std::vector<std::string> Trace::agents() const
{
    std::vector<std::string> out;
    for (const auto& e : events)
        if (e.kind == TraceEvent::Kind::AgentStart)
            push_unique(out, e.agent);
    return out;
}

std::vector<std::string> Trace::tools() const
{
    std::vector<std::string> out;
    for (const auto& e : events)
        if (e.step && e.step->call)
            push_unique(out, e.step->call->name);
    return out;
}

std::vector<std::string> Trace::artifacts() const
{
    std::vector<std::string> out;
    for (const auto& e : events)
        if (e.step && e.step->observation)
            for (const auto& a : e.step->observation->artifacts)
                push_unique(out, a);
    return out;
}

std::size_t Trace::activations() const
{
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const TraceEvent& e) {
        return e.kind == TraceEvent::Kind::AgentStart;
    }));
}

void to_json(Json& j, const Trace& trace)
{
    Json events = Json::array();
    for (const auto& e : trace.events) {
        Json je{{"kind", kind_name(e.kind)}, {"agent", e.agent}};
        if (e.decision)
            je["decision"] = *e.decision;
        if (e.step)
            je["step"] = *e.step;
        events.push_back(std::move(je));
    }
    j = Json{{"events", events}, {"agents", trace.agents()}, {"tools", trace.tools()}};
}

Engine::Engine(EngineConfig config, const AgentRegistry& agents, const ToolRegistry& tools, gateway::Gateway& gateway)
    : config_(std::move(config)), agents_(agents), tools_(tools), gateway_(gateway)
{
    if (config_.step_budget == 0)
        throw Error(ErrorKind::InvalidArgument, "step budget must be positive");
}

std::shared_ptr<Engine::Session> Engine::session_for(const std::string& session_id)
{
    std::lock_guard lock(sessions_mutex_);
    auto& slot = sessions_[session_id];
    if (!slot) {
        slot = std::make_shared<Session>();
        slot->state.session_id = session_id;
    }
    return slot;
}

bool Engine::has_session(const std::string& session_id) const
{
    std::lock_guard lock(sessions_mutex_);
    return sessions_.count(session_id) > 0;
}

GraphState Engine::session(const std::string& session_id) const
{
    std::shared_ptr<Session> s;
    {
        std::lock_guard lock(sessions_mutex_);
        auto it = sessions_.find(session_id);
        if (it == sessions_.end())
            throw Error(ErrorKind::NotFound, "unknown session '" + session_id + "'");
        s = it->second;
    }
    std::lock_guard lock(s->state_mutex);
    return s->state;
}

CheckpointToken Engine::save_checkpoint(const GraphState& state) { return checkpoints_.save(state); }

GraphState Engine::restore_checkpoint(const std::string& token) const { return checkpoints_.restore(token); }

void Engine::resume_from(const std::string& token)
{
    auto state = checkpoints_.restore(token);
    auto s = session_for(state.session_id);
    std::lock_guard turn(s->turn);
    std::lock_guard lock(s->state_mutex);
    s->state = std::move(state);
}

void Engine::check_mode(const RunMode& mode) const
{
    if (!mode.is_direct())
        return;
    if (!agents_.contains(mode.agent))
        throw Error(ErrorKind::NotFound, "direct mode names unknown agent '" + mode.agent + "'");
    if (mode.tool) {
        const auto& spec = agents_.get(mode.agent);
        if (std::find(spec.tool_names.begin(), spec.tool_names.end(), *mode.tool) == spec.tool_names.end())
            throw Error(ErrorKind::NotFound, "agent '" + mode.agent + "' has no tool '" + *mode.tool + "'");
    }
}

TurnResult Engine::run_turn(const std::string& session_id, const std::string& user_message, const RunMode& mode)
{
    check_mode(mode);
    auto session = session_for(session_id);
    std::lock_guard turn_lock(session->turn);

    GraphState work;
    {
        std::lock_guard lock(session->state_mutex);
        work = session->state;
    }
    work.mode = mode;
    work.step_count = 0;
    work.active_agent.reset();
    work.pending_handoff.reset();
    work.transcript.push_back(Message::user(user_message));

    const auto deadline = std::chrono::steady_clock::now() + config_.turn_timeout;
    TurnResult result;

    auto failed = [&](std::string category, std::string message) {
        result.ok = false;
        result.failure_category = std::move(category);
        result.error = std::move(message);
        result.step_count = work.step_count;
        return result;
    };

    struct AgentFailure {
        std::string category;
        std::string message;
    };

    auto run_agent = [&](const std::string& name, std::vector<std::string> filter) -> std::optional<AgentFailure> {
        const auto& spec = agents_.get(name);
        work.active_agent = name;
        result.trace.events.push_back({TraceEvent::Kind::AgentStart, name, std::nullopt, std::nullopt});

        ReactOptions opts;
        opts.budget = config_.step_budget - work.step_count;
        opts.deadline = deadline;
        opts.tool_filter = std::move(filter);
        opts.reserved_call_ids = call_ids(work.transcript);
        opts.context = ToolContext{work.session_id, name};

        auto r = opts.budget == 0 ? ReactResult{false, std::nullopt, {}, {}, 0, ErrorKind::Budget,
                                                "step budget exhausted before agent '" + name + "' could run"}
                                  : react_loop(spec, agent_view(work.transcript), gateway_, tools_, opts);
        work.step_count += r.steps;
        for (auto& step : r.trace)
            result.trace.events.push_back({TraceEvent::Kind::Step, name, std::nullopt, std::move(step)});
        if (!r.ok)
            return AgentFailure{std::string(to_string(r.failure.value_or(ErrorKind::Backend))), r.error};
        work.transcript.insert(work.transcript.end(), r.messages.begin(), r.messages.end());
        result.trace.events.push_back({TraceEvent::Kind::AgentEnd, name, std::nullopt, std::nullopt});
        return std::nullopt;
    };

    if (mode.is_direct()) {
        std::vector<std::string> filter;
        if (mode.tool)
            filter.push_back(*mode.tool);
        if (auto err = run_agent(mode.agent, filter))
            return failed(err->category, err->message);
        result.final = work.transcript.back();
    } else {
        while (true) {
            if (work.step_count >= config_.step_budget)
                return failed("budget", "turn exhausted its step budget of " + std::to_string(config_.step_budget));
            if (std::chrono::steady_clock::now() >= deadline)
                return failed("timeout", "turn exceeded its wall-clock limit");

            RoutingDecision decision;
            try {
                decision = supervisor_decide(work, agents_, gateway_, config_.supervisor);
            } catch (const Error& err) {
                return failed(std::string(err.category()), err.what());
            }
            ++work.step_count;
            result.trace.events.push_back(
                {TraceEvent::Kind::Routing, std::string(kSupervisorName), decision, std::nullopt});

            if (decision.kind == RoutingDecision::Kind::Handoff) {
                work.pending_handoff = decision.target;
                if (auto err = run_agent(decision.target, {}))
                    return failed(err->category, err->message);
                work.pending_handoff.reset();
                continue;
            }

            auto content = decision.content;
            if (content.empty() && decision.kind == RoutingDecision::Kind::RespondDirectly) {
                const auto& last = work.transcript.back();
                if (last.role == Role::Assistant && last.origin_agent != kSupervisorName)
                    content = last.content;
            }
            auto final = Message::assistant(content, std::string(kSupervisorName));
            work.transcript.push_back(final);
            result.final = std::move(final);
            break;
        }
    }

    work.active_agent.reset();
    result.ok = true;
    result.step_count = work.step_count;
    {
        std::lock_guard lock(session->state_mutex);
        session->state = work;
    }
    result.checkpoint = checkpoints_.save(work);
    return result;
}

} // namespace copilot::orchestrator
