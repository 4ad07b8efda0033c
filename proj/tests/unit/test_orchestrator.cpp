// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/error.hpp"
#include "copilot/orchestrator/agent_registry.hpp"
#include "copilot/orchestrator/checkpoint.hpp"
#include "copilot/orchestrator/engine.hpp"
#include "copilot/orchestrator/supervisor.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <random>
#include <thread>

using namespace copilot;
using namespace copilot::orchestrator;

namespace {

Json rule(const std::string& name, Json when, Json respond)
{
    Json r{{"name", name}, {"respond", std::move(respond)}};
    if (!when.is_null())
        r["when"] = std::move(when);
    return r;
}

Json toy_rules()
{
    auto route = [](const std::string& a) { return Json{{"route", a}}.dump(); };
    auto text = [](const std::string& t) { return Json{{"text", t}}; };
    auto call = [](const std::string& tool, Json args) {
        return Json{{"tool_calls", Json::array({Json{{"name", tool}, {"args", std::move(args)}}})}};
    };
    auto sup_any = [](std::vector<std::string> kw) { return Json{{"agent", "supervisor"}, {"any", kw}}; };
    Json rules = Json::array({
        rule("loop", sup_any({"forever"}), text(route("alpha"))),
        rule("back", Json{{"agent", "supervisor"}, {"last", "agent"}}, text("Result: {{last_agent_output}}")),
        rule("ghost", sup_any({"ghost"}), text(route("ghost"))),
        rule("xfer", sup_any({"beta"}), call("transfer_to_beta", Json::object())),
        rule("alpha", sup_any({"alpha", "leak"}), text(route("alpha"))),
        rule("clarify", sup_any({"vague"}), text(Json{{"clarify", "Which one?"}}.dump())),
        rule("direct", Json{{"agent", "supervisor"}}, text(Json{{"respond", "Hello there."}}.dump())),
        rule("leak", Json{{"any", Json::array({"leak"})}, {"last", "user"}}, call("echo", Json{{"text", "run ex" "ec"}})),
        rule("use", Json{{"last", "user"}}, call("echo", Json{{"text", "{{task_head}}"}})),
        rule("report", Json{{"last", "tool"}}, text("saw {{last_tool_output}}")),
        rule("all", nullptr, text("fallback")),
    });
    return Json{{"rules", rules}};
}

struct Toy {
    gateway::Gateway gw;
    ToolRegistry tools;
    AgentRegistry agents;
    std::unique_ptr<Engine> engine;

    explicit Toy(std::size_t budget = 16)
    {
        testing::add_scripted(gw, toy_rules());
        ToolSpec echo;
        echo.name = "echo";
        echo.description = "Echoes text.";
        echo.args = {{"text", ArgType::String, std::nullopt, std::nullopt, "Text."}};
        tools.add(echo, [](const NormalizedArgs& a, const ToolContext& ctx) {
            return ToolOutput{ctx.agent + "/" + arg_string(a, "text"), {}};
        });
        ToolSpec other;
        other.name = "other";
        other.description = "Other.";
        tools.add(other, [](const NormalizedArgs&, const ToolContext&) { return ToolOutput{"other", {}}; });
        agents.register_agent({"alpha", "First agent.", "You are alpha.", {"echo", "other"}, ""}, tools);
        agents.register_agent({"beta", "Second agent.", "You are beta.", {"echo"}, ""}, tools);
        EngineConfig cfg;
        cfg.step_budget = budget;
        cfg.supervisor.prompt = "Route requests.";
        engine = std::make_unique<Engine>(cfg, agents, tools, gw);
    }
};

GraphState random_state(std::mt19937& rng)
{
    GraphState s;
    s.session_id = "s-" + std::to_string(rng() % 1000);
    auto n = rng() % 6;
    for (std::size_t i = 0; i < n; ++i) {
        switch (rng() % 3) {
        case 0: s.transcript.push_back(Message::user("u" + std::to_string(rng() % 99))); break;
        case 1: {
            auto m = Message::assistant("a" + std::to_string(rng() % 99), rng() % 2 ? "alpha" : "supervisor");
            if (rng() % 2)
                m.tool_calls.push_back({"c" + std::to_string(i), "echo", {{"text", "t"}}});
            s.transcript.push_back(m);
            break;
        }
        default: s.transcript.push_back(Message::tool("c" + std::to_string(i), "p", "alpha"));
        }
    }
    if (rng() % 2)
        s.active_agent = "alpha";
    if (rng() % 2)
        s.pending_handoff = "beta";
    s.mode = rng() % 2 ? RunMode::full() : RunMode::direct("beta", rng() % 2 ? std::optional<std::string>("echo") : std::nullopt);
    s.step_count = rng() % 17;
    return s;
}

} // namespace

TEST_SUITE("orchestrator") {

TEST_CASE("agent registry validation")
{
    Toy toy;
    CHECK_THROWS_AS(toy.agents.register_agent({"alpha", "dup", "p", {"echo"}, ""}, toy.tools), Error);
    CHECK_THROWS_AS(toy.agents.register_agent({"gamma", "x", "p", {"missing"}, ""}, toy.tools), Error);
    CHECK_THROWS_AS(toy.agents.register_agent({"delta", "x", "", {"echo"}, ""}, toy.tools), Error);
    CHECK(toy.agents.names() == std::vector<std::string>{"alpha", "beta"});
}

TEST_CASE("directive parsing")
{
    Toy toy;
    gateway::ModelResponse r;
    r.text = R"({"route": "beta", "reason": "fits"})";
    auto d = parse_directive(r, toy.agents);
    CHECK(d.kind == RoutingDecision::Kind::Handoff);
    CHECK(d.target == "beta");

    r.text = "```json\n{\"clarify\": \"Which?\"}\n```";
    CHECK(parse_directive(r, toy.agents).kind == RoutingDecision::Kind::Clarify);

    r.text = R"({"route": "ghost"})";
    d = parse_directive(r, toy.agents);
    CHECK(d.kind == RoutingDecision::Kind::RespondDirectly);

    r.text = "I think alpha should do it.";
    d = parse_directive(r, toy.agents);
    CHECK(d.kind == RoutingDecision::Kind::RespondDirectly);
    CHECK(d.content == "I think alpha should do it.");

    gateway::ModelResponse t;
    t.tool_calls.push_back({"x", "transfer_to_alpha", {}});
    CHECK(parse_directive(t, toy.agents).target == "alpha");

    auto prompt = supervisor_system_prompt({"Route requests.", ""}, toy.agents);
    CHECK(prompt.find("alpha") != std::string::npos);
    CHECK(prompt.find("Second agent.") != std::string::npos);
    CHECK(transfer_tools(toy.agents).size() == 2);
}

TEST_CASE("full mode: handoff then answer")
{
    Toy toy;
    auto r = toy.engine->run_turn("s1", "ask alpha something", RunMode::full());
    REQUIRE(r.ok);
    CHECK(r.final.content == "Result: saw alpha/ask alpha something");
    CHECK(r.trace.agents() == std::vector<std::string>{"alpha"});
    CHECK(r.trace.tools() == std::vector<std::string>{"echo"});
    REQUIRE(r.trace.decisions().size() == 2);
    CHECK(r.trace.decisions()[0].kind == RoutingDecision::Kind::Handoff);
    CHECK(r.checkpoint.has_value());
    auto state = toy.engine->session("s1");
    CHECK(state.transcript.front().content == "ask alpha something");
    CHECK(state.transcript.back().content == r.final.content);
    CHECK(tool_messages_paired(state.transcript));
}

TEST_CASE("full mode: transfer tool call, direct answer, clarify")
{
    Toy toy;
    auto r = toy.engine->run_turn("s", "please beta", RunMode::full());
    REQUIRE(r.ok);
    CHECK(r.trace.agents() == std::vector<std::string>{"beta"});

    r = toy.engine->run_turn("s", "hi", RunMode::full());
    REQUIRE(r.ok);
    CHECK(r.final.content == "Hello there.");
    CHECK(r.trace.agents().empty());

    r = toy.engine->run_turn("s", "something vague", RunMode::full());
    REQUIRE(r.ok);
    CHECK(r.final.content == "Which one?");
    CHECK(r.trace.decisions().back().kind == RoutingDecision::Kind::Clarify);
}

TEST_CASE("routes to unregistered agents never produce phantom handoffs")
{
    Toy toy;
    auto r = toy.engine->run_turn("s", "ghost please", RunMode::full());
    REQUIRE(r.ok);
    CHECK(r.trace.agents().empty());
    for (const auto& d : r.trace.decisions())
        if (d.kind == RoutingDecision::Kind::Handoff)
            CHECK(toy.agents.contains(d.target));
}

TEST_CASE("direct mode: no supervisor decisions, tool filter honoured")
{
    Toy toy;
    auto r = toy.engine->run_turn("d", "direct call", RunMode::direct("beta"));
    REQUIRE(r.ok);
    CHECK(r.trace.decisions().empty());
    CHECK(r.trace.agents() == std::vector<std::string>{"beta"});
    CHECK(r.final.content == "saw beta/direct call");

    r = toy.engine->run_turn("d2", "filtered", RunMode::direct("alpha", "other"));
    REQUIRE(r.ok);
    CHECK(r.trace.decisions().empty());
    // The scripted agent asks for echo, which the filter excludes.
    bool refused = false;
    for (const auto& e : r.trace.events)
        if (e.step && e.step->observation)
            refused |= e.step->observation->is_error;
    CHECK(refused);

    CHECK_THROWS_AS(toy.engine->run_turn("d", "x", RunMode::direct("ghost")), Error);
    CHECK_THROWS_AS(toy.engine->run_turn("d", "x", RunMode::direct("beta", "other")), Error);
}

TEST_CASE("step budget bounds every turn and failures leave the session untouched")
{
    Toy toy(9);
    auto ok = toy.engine->run_turn("s", "ask alpha first", RunMode::full());
    REQUIRE(ok.ok);
    CHECK(ok.step_count <= 9);
    auto before = toy.engine->session("s");

    auto r = toy.engine->run_turn("s", "loop forever", RunMode::full());
    CHECK_FALSE(r.ok);
    CHECK(r.failure_category == "budget");
    CHECK(r.step_count <= 9);
    CHECK(toy.engine->session("s") == before);
}

TEST_CASE("guardrail failure inside an agent is atomic")
{
    Toy toy;
    toy.engine->run_turn("g", "hi", RunMode::full());
    auto before = toy.engine->session("g");
    auto r = toy.engine->run_turn("g", "leak", RunMode::full());
    CHECK_FALSE(r.ok);
    CHECK(r.failure_category == "guardrail");
    CHECK(toy.engine->session("g") == before);
}

TEST_CASE("checkpoint tokens round-trip arbitrary states")
{
    CheckpointStore store;
    std::mt19937 rng(21);
    for (int i = 0; i < 300; ++i) {
        auto s = random_state(rng);
        auto tok = store.save(s);
        CHECK(store.restore(tok.token) == s);
        Json j = s;
        CHECK(j.get<GraphState>() == s);
    }
    CHECK_THROWS_AS(store.restore("nope"), Error);
}

TEST_CASE("resume from checkpoint restores the session")
{
    Toy toy;
    auto first = toy.engine->run_turn("r", "ask alpha one", RunMode::full());
    REQUIRE(first.ok);
    toy.engine->run_turn("r", "ask alpha two", RunMode::full());
    toy.engine->resume_from(first.checkpoint->token);
    CHECK(toy.engine->session("r") == toy.engine->restore_checkpoint(first.checkpoint->token));
    CHECK(toy.engine->session("r").transcript.back().content == first.final.content);
}

TEST_CASE("concurrent sessions are independent")
{
    Toy toy;
    std::vector<std::thread> ts;
    std::atomic<int> ok{0};
    for (int i = 0; i < 8; ++i)
        ts.emplace_back([&, i] {
            for (int k = 0; k < 5; ++k) {
                auto r = toy.engine->run_turn("c" + std::to_string(i % 4), "ask alpha " + std::to_string(k), RunMode::full());
                ok += r.ok;
            }
        });
    for (auto& t : ts)
        t.join();
    CHECK(ok == 40);
    for (int i = 0; i < 4; ++i) {
        auto s = toy.engine->session("c" + std::to_string(i));
        std::size_t users = 0;
        for (const auto& m : s.transcript)
            users += m.role == Role::User;
        CHECK(users == 10);
        CHECK(tool_messages_paired(s.transcript));
    }
}

TEST_CASE("trace json carries events, agents and tools")
{
    Toy toy;
    auto r = toy.engine->run_turn("j", "ask alpha", RunMode::full());
    Json j = r.trace;
    CHECK(j["agents"] == Json::array({"alpha"}));
    CHECK(j["tools"] == Json::array({"echo"}));
    CHECK(j["events"].is_array());
}

}
