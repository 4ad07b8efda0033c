// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/error.hpp"
#include "copilot/runtime/message.hpp"
#include "copilot/runtime/react_loop.hpp"
#include "copilot/runtime/tool_registry.hpp"
#include "copilot/runtime/tool_spec.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <atomic>
#include <random>
#include <set>
#include <thread>

using namespace copilot;

namespace {

ToolSpec sim_spec()
{
    ToolSpec s;
    s.name = "simulate";
    s.description = "Runs a simulation.";
    s.args = {{"temperature", ArgType::Number, "degC", std::nullopt, "Temperature."},
              {"steps", ArgType::Integer, std::nullopt, Json(10), "Steps."},
              {"verbose", ArgType::Boolean, std::nullopt, Json(false), "Verbose."},
              {"methods", ArgType::StringList, std::nullopt, Json::array(), "Methods."},
              {"label", ArgType::String, std::nullopt, Json("run"), "Label."}};
    return s;
}

Json worker_rules()
{
    return {{"rules",
             {{{"name", "call"},
               {"when", {{"agent", "worker"}, {"last", "user"}}},
               {"respond",
                {{"tool_calls",
                  {{{"name", "echo"}, {"args", {{"text", "{{task_head}}"}}}},
                   {{"name", "echo"}, {"args", {{"text", "again"}}}}}}}}},
              {{"name", "done"}, {"when", {{"agent", "worker"}, {"last", "tool"}}}, {"respond", {{"text", "final: {{last_tool_output}}"}}}},
              {{"name", "loop"}, {"when", {{"agent", "looper"}}}, {"respond", {{"tool_calls", {{{"name", "echo"}, {"args", {{"text", "x"}}}}}}}}},
              {{"name", "all"}, {"respond", {{"text", "fallback"}}}}}}};
}

void add_echo(ToolRegistry& tools)
{
    ToolSpec echo;
    echo.name = "echo";
    echo.description = "Echoes text.";
    echo.args = {{"text", ArgType::String, std::nullopt, std::nullopt, "Text to echo."}};
    tools.add(echo, [](const NormalizedArgs& a, const ToolContext&) { return ToolOutput{"echo:" + arg_string(a, "text"), {}}; });
}

} // namespace

TEST_SUITE("runtime") {

TEST_CASE("tool spec checks")
{
    auto s = sim_spec();
    CHECK_NOTHROW(s.check());
    auto dup = s;
    dup.args.push_back(dup.args[0]);
    CHECK_THROWS_AS(dup.check(), Error);
    auto bad = s;
    bad.args[1].default_value = Json("ten");
    CHECK_THROWS_AS(bad.check(), Error);
    auto text = s.model_description();
    CHECK(text.find("Runs a simulation.") != std::string::npos);
    CHECK(text.find("temperature") != std::string::npos);
    CHECK(text.find("degC") != std::string::npos);
}

TEST_CASE("validate_args coerces, fills defaults and records units")
{
    auto s = sim_spec();
    auto n = validate_args(s, {{"temperature", "650"}, {"methods", "a, b"}});
    CHECK(n.at("temperature").value.get<double>() == 650.0);
    CHECK(n.at("temperature").units == std::optional<std::string>("degC"));
    CHECK(n.at("steps").value.get<long>() == 10);
    CHECK(n.at("label").value == "run");
    CHECK(arg_list(n, "methods") == std::vector<std::string>{"a", "b"});
    CHECK_THROWS_AS(validate_args(s, {}), Error);
    CHECK_THROWS_AS(validate_args(s, {{"temperature", "hot"}}), Error);
    CHECK_THROWS_AS(validate_args(s, {{"temperature", "1"}, {"bogus", "1"}}), Error);
    CHECK_THROWS_AS(validate_args(s, {{"temperature", "1"}, {"steps", "2.5"}}), Error);
}

TEST_CASE("validate_args is idempotent on random inputs")
{
    auto s = sim_spec();
    std::mt19937 rng(11);
    for (int i = 0; i < 500; ++i) {
        RawArgs raw{{"temperature", std::to_string(static_cast<int>(rng() % 2000) - 500) + "." + std::to_string(rng() % 100)}};
        if (rng() % 2)
            raw["steps"] = std::to_string(rng() % 1000);
        if (rng() % 2)
            raw["verbose"] = rng() % 2 ? "true" : "false";
        if (rng() % 2)
            raw["methods"] = rng() % 2 ? "colloidal" : "colloidal,incipient wetness";
        if (rng() % 2)
            raw["label"] = "label " + std::to_string(rng() % 50);
        auto once = validate_args(s, raw);
        auto twice = validate_args(s, to_raw(once));
        CHECK(once == twice);
    }
}

TEST_CASE("message json round trip and pairing")
{
    Message a = Message::assistant("", "worker");
    a.tool_calls.push_back({"c1", "echo", {{"text", "x"}}});
    std::vector<Message> msgs{Message::user("hi"), a, Message::tool("c1", "echo:x", "worker")};
    for (const auto& m : msgs) {
        Json j = m;
        CHECK(j.get<Message>() == m);
    }
    CHECK(tool_messages_paired(msgs));
    msgs.push_back(Message::tool("c2", "orphan"));
    CHECK_FALSE(tool_messages_paired(msgs));
    CHECK_THROWS(parse_role("robot"));
}

TEST_CASE("tool registry turns failures into error observations")
{
    ToolRegistry tools;
    add_echo(tools);
    ToolSpec boom;
    boom.name = "boom";
    boom.description = "Fails.";
    tools.add(boom, [](const NormalizedArgs&, const ToolContext&) -> ToolOutput { throw Error(ErrorKind::NotFound, "nothing"); });
    auto ok = tools.invoke({"c1", "echo", {{"text", "a"}}}, {});
    CHECK_FALSE(ok.is_error);
    CHECK(ok.payload == "echo:a");
    CHECK(ok.call_id == "c1");
    auto bad_args = tools.invoke({"c2", "echo", {}}, {});
    CHECK(bad_args.is_error);
    auto failing = tools.invoke({"c3", "boom", {}}, {});
    CHECK(failing.is_error);
    CHECK(failing.payload.find("not_found") != std::string::npos);
    auto unknown = tools.invoke({"c4", "nope", {}}, {});
    CHECK(unknown.is_error);
    CHECK_THROWS_AS(tools.add(boom, nullptr), Error);
}

TEST_CASE("non-reentrant tools are serialized")
{
    ToolRegistry tools;
    ToolSpec s;
    s.name = "slow";
    s.description = "Slow.";
    s.reentrant = false;
    std::atomic<int> inside{0}, peak{0};
    tools.add(s, [&](const NormalizedArgs&, const ToolContext&) {
        int now = ++inside;
        peak = std::max(peak.load(), now);
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
        --inside;
        return ToolOutput{"done", {}};
    });
    std::vector<std::thread> ts;
    for (int i = 0; i < 6; ++i)
        ts.emplace_back([&, i] { tools.invoke({"c" + std::to_string(i), "slow", {}}, {}); });
    for (auto& t : ts)
        t.join();
    CHECK(peak == 1);
}

TEST_CASE("react loop: tool calls run in order and pair with observations")
{
    gateway::Gateway gw;
    testing::add_scripted(gw, worker_rules());
    ToolRegistry tools;
    add_echo(tools);
    AgentSpec agent{"worker", "Works.", "You work.", {"echo"}, ""};
    ReactOptions opt;
    auto r = react_loop(agent, {Message::user("hello world")}, gw, tools, opt);
    REQUIRE(r.ok);
    CHECK(r.final->content == "final: echo:again");
    CHECK(r.steps == 4);  // model, tool, tool, model
    REQUIRE(r.trace.size() == 4);
    CHECK(r.trace[1].observation->payload == "echo:hello world");
    CHECK(r.trace[1].call->call_id == r.trace[1].observation->call_id);
    std::vector<Message> all{Message::user("hello world")};
    all.insert(all.end(), r.messages.begin(), r.messages.end());
    CHECK(tool_messages_paired(all));
}

TEST_CASE("react loop is stateless: identical runs give identical traces")
{
    gateway::Gateway gw;
    testing::add_scripted(gw, worker_rules());
    ToolRegistry tools;
    add_echo(tools);
    AgentSpec agent{"worker", "Works.", "You work.", {"echo"}, ""};
    auto a = react_loop(agent, {Message::user("same input")}, gw, tools, {});
    auto b = react_loop(agent, {Message::user("same input")}, gw, tools, {});
    CHECK(a.trace == b.trace);
    CHECK(a.messages == b.messages);
}

TEST_CASE("react loop respects the step budget")
{
    gateway::Gateway gw;
    testing::add_scripted(gw, worker_rules());
    ToolRegistry tools;
    add_echo(tools);
    AgentSpec agent{"looper", "Loops.", "You loop.", {"echo"}, ""};
    ReactOptions opt;
    opt.budget = 7;
    auto r = react_loop(agent, {Message::user("go")}, gw, tools, opt);
    CHECK_FALSE(r.ok);
    CHECK(r.failure == ErrorKind::Budget);
    CHECK(r.steps <= 7);
}

TEST_CASE("react loop renames colliding call ids")
{
    gateway::Gateway gw;
    testing::add_scripted(gw, worker_rules());
    ToolRegistry tools;
    add_echo(tools);
    AgentSpec agent{"worker", "Works.", "You work.", {"echo"}, ""};
    ReactOptions opt;
    opt.reserved_call_ids = {"call_1", "call_2"};
    auto r = react_loop(agent, {Message::user("x")}, gw, tools, opt);
    REQUIRE(r.ok);
    std::set<std::string> ids;
    for (const auto& s : r.trace)
        if (s.call)
            ids.insert(s.call->call_id);
    CHECK(ids.size() == 2);
    CHECK(ids.count("call_1") == 0);
    CHECK(ids.count("call_2") == 0);
}

TEST_CASE("tools outside the agent's list are refused as observations")
{
    gateway::Gateway gw;
    testing::add_scripted(gw, worker_rules());
    ToolRegistry tools;
    add_echo(tools);
    ToolSpec other;
    other.name = "other";
    other.description = "Other.";
    tools.add(other, [](const NormalizedArgs&, const ToolContext&) { return ToolOutput{"x", {}}; });
    AgentSpec agent{"worker", "Works.", "You work.", {"other"}, ""};
    auto r = react_loop(agent, {Message::user("x")}, gw, tools, {});
    REQUIRE(r.ok);
    CHECK(r.trace[1].observation->is_error);
}

}
