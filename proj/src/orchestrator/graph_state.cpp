// SPDX-License-Identifier: Apache-2.0
#include "copilot/orchestrator/graph_state.hpp"

#include "copilot/core/error.hpp"

namespace copilot::orchestrator {

std::string_view to_string(RoutingDecision::Kind kind) noexcept
{
    switch (kind) {
    case RoutingDecision::Kind::Handoff: return "handoff";
    case RoutingDecision::Kind::RespondDirectly: return "respond";
    case RoutingDecision::Kind::Clarify: return "clarify";
    }
    return "respond";
}

void to_json(Json& j, const RunMode& m)
{
    if (!m.is_direct()) {
        j = Json{{"kind", "full"}};
        return;
    }
    j = Json{{"kind", "direct"}, {"agent", m.agent}};
    if (m.tool)
        j["tool"] = *m.tool;
}

void from_json(const Json& j, RunMode& m)
{
    auto kind = j.value("kind", std::string("full"));
    if (kind == "full") {
        m = RunMode::full();
    } else if (kind == "direct") {
        std::optional<std::string> tool;
        if (j.contains("tool") && j["tool"].is_string())
            tool = j["tool"].get<std::string>();
        m = RunMode::direct(j.at("agent").get<std::string>(), tool);
    } else {
        throw Error(ErrorKind::Parse, "unknown run mode '" + kind + "'");
    }
}

namespace {
Json opt(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }
std::optional<std::string> opt_str(const Json& j, const char* key)
{
    if (j.contains(key) && j[key].is_string())
        return j[key].get<std::string>();
    return std::nullopt;
}
} // namespace

void to_json(Json& j, const GraphState& s)
{
    j = Json{{"session_id", s.session_id},
             {"transcript", s.transcript},
             {"active_agent", opt(s.active_agent)},
             {"pending_handoff", opt(s.pending_handoff)},
             {"mode", s.mode},
             {"step_count", s.step_count}};
}

void from_json(const Json& j, GraphState& s)
{
    s.session_id = j.at("session_id").get<std::string>();
    s.transcript = j.value("transcript", std::vector<Message>{});
    s.active_agent = opt_str(j, "active_agent");
    s.pending_handoff = opt_str(j, "pending_handoff");
    s.mode = j.value("mode", RunMode{});
    s.step_count = j.value("step_count", std::size_t{0});
}

void to_json(Json& j, const RoutingDecision& d)
{
    j = Json{{"kind", to_string(d.kind)}, {"rationale", d.rationale}};
    if (d.kind == RoutingDecision::Kind::Handoff)
        j["target"] = d.target;
    else
        j["content"] = d.content;
}

} // namespace copilot::orchestrator
