// SPDX-License-Identifier: Apache-2.0
#include "copilot/core/error.hpp"
#include "copilot/eval/benchmark.hpp"
#include "copilot/eval/endpoint.hpp"
#include "copilot/eval/eval.hpp"
#include "copilot/gateway/gateway.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <random>

using namespace copilot;
using namespace copilot::eval;
using namespace std::chrono_literals;

namespace {

Json reply_body(const std::vector<std::string>& agents, const std::string& final_text,
                const std::string& observed = "")
{
    Json events = Json::array();
    if (!observed.empty())
        events.push_back({{"step", {{"observation", {{"payload", observed}, {"artifacts", Json::array()}}}}}});
    return Json{{"ok", true},
                {"final", final_text},
                {"trace_summary", {{"agents", agents}, {"tools", Json::array()}}},
                {"trace", {{"events", events}}}};
}

ChatReply ok_reply(Json body, std::chrono::milliseconds latency = 100ms)
{
    ChatReply r;
    r.status = 200;
    r.body = std::move(body);
    r.latency = latency;
    return r;
}

EvalOutcome outcome(const std::string& agent, bool success, bool correct, int n)
{
    EvalOutcome o;
    o.case_id = agent + "-" + std::to_string(n);
    o.target = agent;
    o.task_success = success;
    o.routing_correct = correct;
    o.category = correct ? FailureCategory::None : FailureCategory::Misroute;
    return o;
}

// Per-agent counts: cases, successful, correct.
std::vector<EvalOutcome> table_outcomes()
{
    const std::vector<std::tuple<std::string, int, int>> rows = {
        {"analyzer", 18, 18}, {"hypothesizer", 20, 19}, {"researcher", 20, 20},
        {"simulation", 19, 15}, {"segmenter", 20, 18}, {"uq", 20, 18}};
    std::vector<EvalOutcome> out;
    for (const auto& [agent, ok, right] : rows)
        for (int i = 0; i < 20; ++i)
            out.push_back(outcome(agent, i < ok, i < right, i));
    return out;
}

} // namespace

TEST_SUITE("eval") {

TEST_CASE("case files")
{
    auto cases = parse_cases("# comment\n\n{\"id\": \"a\", \"agent\": \"uq\", \"prompt\": \"p\"}\n");
    REQUIRE(cases.size() == 1);
    CHECK(parse_cases(cases_to_jsonl(cases)) == cases);
    try {
        parse_cases("{\"id\": \"a\", \"agent\": \"uq\", \"prompt\": \"p\"}\n{\"id\": \"a\", \"agent\": \"uq\", \"prompt\": \"q\"}\n");
        FAIL("expected");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_cases("{\"id\": \"\", \"agent\": \"uq\", \"prompt\": \"p\"}"), Error);
    CHECK_THROWS_AS(parse_cases("nope"), Error);
    auto bundled = load_cases(testing::repo_path("data/suites/agent_invocation.jsonl"));
    CHECK(bundled.size() == 120);
    CHECK(load_cases(testing::repo_path("data/suites/ambiguous.jsonl")).size() == 6);
}

TEST_CASE("judging replies")
{
    EvalCase c{"c1", "simulation", "p", "s"};
    SuiteOptions opt;
    opt.timeout = 1000ms;

    auto good = judge_reply(c, ok_reply(reply_body({"simulation"}, "Submitted job-abc123.", "job-abc123 queued")), opt);
    CHECK(good.category == FailureCategory::None);
    CHECK(good.task_success);
    CHECK(good.routing_correct);

    auto mis = judge_reply(c, ok_reply(reply_body({"uq"}, "Here is a ranking.")), opt);
    CHECK(mis.category == FailureCategory::Misroute);
    CHECK(mis.task_success);
    CHECK_FALSE(mis.routing_correct);

    auto none = judge_reply(c, ok_reply(reply_body({}, "Could you clarify?")), opt);
    CHECK(none.category == FailureCategory::NoRoute);
    CHECK_FALSE(none.task_success);

    auto made_up = judge_reply(c, ok_reply(reply_body({"simulation"}, "See /artifacts/art-123456 and job-deadbeef.")), opt);
    CHECK(made_up.category == FailureCategory::Hallucination);
    CHECK_FALSE(made_up.task_success);

    auto slow = judge_reply(c, ok_reply(reply_body({"simulation"}, "done"), 2000ms), opt);
    CHECK(slow.category == FailureCategory::Timeout);

    ChatReply cut;
    cut.transport_error = "read timeout";
    CHECK(judge_reply(c, cut, opt).category == FailureCategory::Timeout);

    ChatReply err;
    err.status = 500;
    err.body = Json{{"error", {{"category", "backend"}, {"message", "down"}}}, {"trace_summary", {{"agents", {"simulation"}}}}};
    auto e = judge_reply(c, err, opt);
    CHECK(e.category == FailureCategory::Error);
    CHECK(e.routing_correct);

    auto refused = judge_reply(c, ok_reply(reply_body({"simulation"}, "I'm unable to do that.")), opt);
    CHECK(refused.category == FailureCategory::None);
    CHECK_FALSE(refused.task_success);

    auto self = judge_reply(c, ok_reply(reply_body({"simulation"}, "Done.\nSub-agents used: simulation, uq")),
                            SuiteOptions{1000ms, 1, default_addendum(), default_refusal_phrases(), {"simulation", "uq"}});
    CHECK(self.self_reported_agents == std::vector<std::string>{"simulation", "uq"});
    CHECK_FALSE(self.self_report_agrees);
}

TEST_CASE("judged outcomes are always internally consistent")
{
    std::mt19937 rng(99);
    const std::vector<std::string> agents{"analyzer", "uq", "simulation"};
    const std::vector<std::string> answers{"", "fine", "I cannot help with that", "job-0a1b2c3d ready", "10.5555/x.1"};
    SuiteOptions opt;
    opt.timeout = 500ms;
    for (int i = 0; i < 2000; ++i) {
        EvalCase c{"c", agents[rng() % 3], "p", "s"};
        std::vector<std::string> invoked;
        for (const auto& a : agents)
            if (rng() % 3 == 0)
                invoked.push_back(a);
        auto answer = answers[rng() % answers.size()];
        ChatReply r = ok_reply(reply_body(invoked, answer, rng() % 2 ? answer : ""),
                               std::chrono::milliseconds(rng() % 700));
        if (rng() % 7 == 0)
            r.status = 500;
        if (rng() % 11 == 0)
            r.transport_error = "reset";
        auto o = judge_reply(c, r, opt);
        CHECK(o.consistent(opt.refusal_phrases));
        CHECK(parse_failure_category(to_string(o.category)) == o.category);
        CHECK(Json(o).get<EvalOutcome>().category == o.category);
    }
}

TEST_CASE("report totals reproduce the per-agent table")
{
    auto outcomes = table_outcomes();
    auto report = score_outcomes(outcomes);
    CHECK(report.cases == 120);
    CHECK(report.successful == 117);
    CHECK(report.correct == 108);
    CHECK(format_pct(report.success_pct()) == "97.5");
    CHECK(format_pct(report.correct_pct()) == "90.0");
    REQUIRE(report.rows.size() == 6);
    const std::vector<std::string> labels{"Data Analysis", "Hypothesis Generation", "Literature Review",
                                          "Simulation", "Segmentation", "Uncertainty Quantification"};
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(report.rows[i].label == labels[i]);
    CHECK(report.rows[3].successful == 19);
    CHECK(report.rows[3].correct == 15);

    std::mt19937 rng(3);
    for (int i = 0; i < 50; ++i) {
        std::shuffle(outcomes.begin(), outcomes.end(), rng);
        auto again = score_outcomes(outcomes);
        CHECK(again.render_table() == report.render_table());
        CHECK(again.to_json() == report.to_json());
    }
    CHECK(agent_label("mystery") == "mystery");
    CHECK(format_pct(0) == "0.0");
    CHECK(format_pct(99.95) == "100.0");
}

TEST_CASE("benchmark arithmetic")
{
    CHECK(exact_pct(2521, 2786, 2) == "90.49");
    CHECK(exact_pct(1, 3, 2) == "33.33");
    CHECK(exact_pct(2, 3, 2) == "66.67");
    CHECK(exact_pct(1, 8, 2) == "12.50");
    CHECK(exact_pct(0, 0, 2) == "0.00");
    CHECK(extract_answer("Reasoning...\nAnswer: B\n") == "B");
    CHECK(extract_answer("just text") == "just text");
    CHECK(normalize_answer("  (B).  ") == "b");
    CHECK(normalize_answer("\"Pt   Sn\"") == "pt sn");

    std::vector<BenchmarkEntry> entries;
    for (int i = 0; i < 10; ++i)
        entries.push_back({"q" + std::to_string(i), "Toy Topic", i < 8, i < 6, "", ""});
    auto rep = tally_benchmark(entries);
    CHECK(rep.overall.total == 10);
    CHECK(rep.overall.completion_pct() == "80.00");
    CHECK(rep.topics.at("Toy Topic").correctness_pct() == "60.00");
    CHECK_THROWS_AS(parse_benchmark("{\"id\": \"x\"}"), Error);
}

TEST_CASE("benchmark runs end to end against a stub endpoint")
{
    class Stub : public ChatEndpoint {
    public:
        ChatReply send(const Json& request, std::chrono::milliseconds) override
        {
            auto q = request["message"].get<std::string>();
            if (q.find("refuse") != std::string::npos)
                return ok_reply(Json{{"final", "I must decline."}});
            if (q.find("fail") != std::string::npos) {
                ChatReply r;
                r.status = 500;
                r.body = Json{{"error", {{"category", "backend"}, {"message", "x"}}}};
                return r;
            }
            return ok_reply(Json{{"final", "Answer: A"}});
        }
        std::string describe() const override { return "stub"; }
    } stub;
    auto questions = parse_benchmark(
        "{\"id\": \"1\", \"question\": \"ok\", \"answer\": \"A\", \"topic\": \"t\"}\n"
        "{\"id\": \"2\", \"question\": \"ok\", \"answer\": \"B\", \"topic\": \"t\"}\n"
        "{\"id\": \"3\", \"question\": \"refuse\", \"answer\": \"A\", \"topic\": \"u\"}\n"
        "{\"id\": \"4\", \"question\": \"fail\", \"answer\": \"A\", \"topic\": \"u\"}\n");
    auto rep = run_benchmark(questions, stub);
    CHECK(rep.overall.completed == 2);
    CHECK(rep.overall.correct == 1);
    CHECK(rep.topics.at("u").completed == 0);
    CHECK(rep.entries.size() == 4);
}

TEST_CASE("generated case suites")
{
    auto parsed = parse_generated_cases("Here you go:\n1. \"First prompt\"\n- Second prompt\n\n2) First prompt\n");
    CHECK(std::find(parsed.begin(), parsed.end(), "First prompt") != parsed.end());
    CHECK(std::find(parsed.begin(), parsed.end(), "Second prompt") != parsed.end());

    gateway::Gateway gw;
    testing::add_scripted(gw, Json{{"rules", Json::array({Json{{"name", "list"},
                                                                  {"respond", {{"text", "1. Alpha task\n2. Beta task\n3. Alpha task\n"}}}}})}});
    auto suite = generate_case_suite("uq", "ranks experiments", 3, gw);
    CHECK(suite.size() == 2);
    for (const auto& c : suite) {
        CHECK(c.agent == "uq");
        CHECK(c.suite == "generated");
    }
    CHECK(generate_case_suite("uq", "x", 0, gw).empty());
    CHECK(case_generation_prompt("excerpt", 7).find("7") != std::string::npos);
}

}
