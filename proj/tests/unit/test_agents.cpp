// SPDX-License-Identifier: Apache-2.0
#include "copilot/agents/analysis.hpp"
#include "copilot/agents/hypothesis.hpp"
#include "copilot/agents/osti.hpp"
#include "copilot/agents/toolkit.hpp"
#include "copilot/core/error.hpp"
#include "copilot/dataplane/artifacts.hpp"
#include "copilot/dataplane/dataplane.hpp"
#include "copilot/gateway/gateway.hpp"
#include "copilot/jobs/simulation.hpp"
#include "copilot/sandbox/sandbox.hpp"

#include "fixtures.hpp"

#include <doctest.h>

#include <thread>

using namespace copilot;
using namespace copilot::agents;

namespace {

OstiClient fixture_client()
{
    OstiConfig c;
    c.fixture_dir = testing::repo_path("data/osti_fixtures");
    return OstiClient(c);
}

Json codegen_rules(const std::string& body)
{
    return Json{{"rules", Json::array({Json{{"name", "code"}, {"respond", {{"text", body}}}}})}};
}

sandbox::Sandbox& shared_sandbox()
{
    static sandbox::Sandbox box([] {
        sandbox::SandboxConfig c;
        c.python = "/usr/bin/python3";
        return c;
    }());
    return box;
}

struct AnalysisFixture {
    dataplane::DataPlane plane{std::make_shared<dataplane::MemoryKvStore>(),
                               std::make_shared<dataplane::MemoryObjectStore>()};
    dataplane::ArtifactStore artifacts{std::make_shared<dataplane::MemoryKvStore>(),
                                       std::make_shared<dataplane::MemoryObjectStore>()};
    gateway::Gateway gw;

    explicit AnalysisFixture(const std::string& model_text)
    {
        testing::add_scripted(gw, codegen_rules(model_text));
        dataplane::DataPackage pkg;
        pkg.metadata.record_id = "wgs";
        pkg.metadata.title = "Water gas shift conversion";
        pkg.files = {{"conversion.csv", "temperature_c,conversion\n200,0.1\n250,0.3\n300,0.6\n"}};
        plane.ingest_package(pkg);
    }

    DatasetAnalyzer analyzer() { return DatasetAnalyzer(AnalysisConfig{}, plane, artifacts, gw, shared_sandbox()); }
};

} // namespace

TEST_SUITE("agents") {

TEST_CASE("publication fixtures")
{
    auto client = fixture_client();
    auto recs = client.search("water-gas shift over copper", 3);
    CHECK_FALSE(recs.empty());
    CHECK(recs.size() <= 3);
    for (const auto& r : recs) {
        CHECK_FALSE(r.title.empty());
        if (r.doi)
            CHECK(well_formed_doi(*r.doi));
    }
    for (std::size_t rows = 1; rows <= 20; ++rows)
        CHECK(client.search("sintering", rows).size() <= rows);
    CHECK(client.search("nothing relevant here", 5).empty());
    CHECK_THROWS_AS(client.search("", 5), Error);
    CHECK_THROWS_AS(client.search("sintering", 0), Error);
    CHECK_THROWS_AS(client.search("sintering", 21), Error);
    try {
        client.search("malformed fixture probe", 5);
        FAIL("expected");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MalformedPayload);
        CHECK(std::string(e.what()).find("title") != std::string::npos);
    }
    CHECK(format_publications(recs).find(recs.front().title) != std::string::npos);
}

TEST_CASE("publication parsing")
{
    CHECK(well_formed_doi("10.1021/acscatal.5b01234"));
    CHECK_FALSE(well_formed_doi("doi:10.1/x"));
    CHECK_FALSE(well_formed_doi("10.1021 x/y"));
    auto recs = parse_publication_records(R"([{"title": "A", "authors": ["X", "Y"], "doi": "", "journal": "J"}])");
    REQUIRE(recs.size() == 1);
    CHECK_FALSE(recs[0].doi.has_value());
    CHECK(recs[0].extra["journal"] == "J");
    CHECK_THROWS_AS(parse_publication_records("{\"title\": \"not a list\"}"), Error);
    CHECK_THROWS_AS(parse_publication_records("[{\"doi\": \"bad\", \"title\": \"t\"}]"), Error);
    CHECK_THROWS_AS(parse_publication_records("not json"), Error);
}

TEST_CASE("hypothesis plans pass through unaltered")
{
    const std::string plan_text = "Objectives:\n- measure  things\nTheoretical framing:\nstrain effects\n\n"
                                  "Hypothesis:\nPt strain raises activity.   \n";
    gateway::Gateway gw;
    testing::add_scripted(gw, Json{{"rules", Json::array({Json{{"name", "tool"},
                                                                  {"when", {{"agent", "hypothesis_tool"}}},
                                                                  {"respond", {{"text", plan_text}}}},
                                                             Json{{"name", "other"}, {"respond", {{"text", "x"}}}}})}});
    HypothesisGenerator gen({}, gw);
    auto plan = gen.generate("strain in Pt catalysts");
    CHECK(plan.source == "tool");
    CHECK(plan.text == plan_text);
    CHECK(plan.complete());
    auto rendered = plan.render();
    CHECK(rendered.rfind(kToolPlanLabel, 0) == 0);
    CHECK(rendered.find(plan_text) != std::string::npos);
    CHECK_THROWS_AS(gen.generate("   "), Error);
}

TEST_CASE("hypothesis fallback chain")
{
    {
        gateway::Gateway gw;
        testing::add_scripted(gw, Json{{"rules", Json::array({Json{{"name", "tool"},
                                                                      {"when", {{"agent", "hypothesis_tool"}}},
                                                                      {"respond", {{"text", ""}}}},
                                                                 Json{{"name", "fb"}, {"respond", {{"text", "Hypothesis: smaller is better"}}}}})}});
        auto plan = HypothesisGenerator({}, gw).generate("particle size");
        CHECK(plan.source == "fallback");
        CHECK(plan.text == "Hypothesis: smaller is better");
        CHECK(plan.render().rfind(kManualPlanLabel, 0) == 0);
        CHECK(plan.complete());
    }
    {
        gateway::Gateway gw;
        testing::add_scripted(gw, Json{{"rules", Json::array({Json{{"name", "empty"}, {"respond", {{"text", ""}}}}})}});
        auto plan = HypothesisGenerator({}, gw).generate("support effects");
        CHECK(plan.source == "template");
        CHECK(plan.complete());
        CHECK(plan.text.find("support effects") != std::string::npos);
    }
    {
        // Missing tool backend falls through to the fallback backend.
        gateway::Gateway gw;
        testing::add_scripted(gw, Json{{"rules", Json::array({Json{{"name", "fb"}, {"respond", {{"text", "Objectives: a"}}}}})}});
        HypothesisConfig cfg;
        cfg.tool_backend = "absent";
        auto plan = HypothesisGenerator(cfg, gw).generate("topic");
        CHECK(plan.source == "fallback");
    }
}

TEST_CASE("research plan sections")
{
    auto p = parse_research_plan("Objectives:\n1. a\n2. b\nTheoretical framing: c\nHypothesis: d\n");
    CHECK(p.objectives.size() == 2);
    CHECK(p.theoretical_framing == "c");
    CHECK(p.hypothesis == "d");
    auto loose = parse_research_plan("just one sentence");
    CHECK(loose.complete());
}

TEST_CASE("narrative and code split")
{
    auto [n, c] = split_narrative_and_code("Plot it.\n```python\nprint(1)\n```\ntrailing");
    CHECK(n.find("Plot it.") != std::string::npos);
    CHECK(c == "print(1)\n");
    auto [n2, c2] = split_narrative_and_code("no code");
    CHECK(c2.empty());
}

TEST_CASE("rejected analysis scripts never reach the sandbox")
{
    AnalysisFixture f("Looking at it.\n```python\nimport boto3\nprint(1)\n```\n");
    auto analyzer = f.analyzer();
    auto before = shared_sandbox().invocations();
    auto res = analyzer.analyze("water gas shift conversion", "s");
    CHECK_FALSE(res.executed);
    CHECK_FALSE(res.rejection.empty());
    CHECK(shared_sandbox().invocations() == before);
    CHECK(res.render().find("did not run") != std::string::npos);
}

TEST_CASE("accepted analysis scripts run and persist figures")
{
    AnalysisFixture f("Conversion rises with temperature.\n```python\nimport pandas as pd\nimport matplotlib.pyplot as plt\n"
                      "df = pd.read_csv('conversion.csv')\nprint(df['conversion'].max())\n"
                      "plt.plot(df['temperature_c'], df['conversion'])\nplt.savefig('trend.png')\n```\n");
    auto analyzer = f.analyzer();
    CHECK(analyzer.select_dataset("conversion") == std::optional<std::string>("wgs"));
    CHECK_FALSE(analyzer.select_dataset("zirconia").has_value());
    auto before = shared_sandbox().invocations();
    auto res = analyzer.analyze("conversion trend", "s");
    CHECK(shared_sandbox().invocations() == before + 1);
    CHECK(res.executed);
    CHECK(res.sandbox_failure.empty());
    CHECK(res.stdout_text.find("0.6") != std::string::npos);
    REQUIRE(res.figures.size() == 1);
    CHECK(f.artifacts.info(res.figures[0])->content_type == "image/png");
    CHECK(res.render().find(dataplane::artifact_link(res.figures[0])) != std::string::npos);
    CHECK_THROWS_AS(analyzer.analyze("zirconia", "s"), Error);
}

TEST_CASE("job tools are scoped to the calling session")
{
    auto inputs = std::make_shared<dataplane::MemoryObjectStore>();
    auto artifacts = std::make_shared<dataplane::ArtifactStore>(std::make_shared<dataplane::MemoryKvStore>(),
                                                                std::make_shared<dataplane::MemoryObjectStore>());
    auto js = std::make_shared<jobs::JobScheduler>(jobs::SchedulerConfig{}, inputs, artifacts);
    js->register_executor({jobs::JobKind::Simulation, "sintering-sim"}, std::make_shared<jobs::SimulationExecutor>());
    ToolRegistry tools;
    ToolkitServices s;
    s.jobs = js;
    s.job_inputs = inputs;
    auto added = register_domain_tools(tools, s);
    CHECK(std::find(added.begin(), added.end(), "run_sintering_simulation") != added.end());

    auto submitted = tools.invoke({"c1", "run_sintering_simulation", {{"temperature", "550"}}}, {"alice", "simulation"});
    REQUIRE_FALSE(submitted.is_error);
    auto pos = submitted.payload.find("job-");
    REQUIRE(pos != std::string::npos);
    auto id = submitted.payload.substr(pos, submitted.payload.find(' ', pos) - pos);
    if (id.back() == '.')
        id.pop_back();
    REQUIRE(js->wait(id, std::chrono::seconds(30)));

    auto mine = tools.invoke({"c2", "collect_job_outputs", {{"job_id", id}}}, {"alice", "simulation"});
    CHECK_FALSE(mine.is_error);
    CHECK(mine.artifacts.size() == 2);
    auto theirs = tools.invoke({"c3", "collect_job_outputs", {{"job_id", id}}}, {"bob", "simulation"});
    CHECK(theirs.is_error);
    auto unknown = tools.invoke({"c4", "job_status", {{"job_id", "job-ffff"}}}, {"bob", "simulation"});
    CHECK(theirs.payload.find(id) != std::string::npos);
    CHECK(unknown.is_error);
    CHECK(tools.invoke({"c5", "list_jobs", {}}, {"bob", "simulation"}).payload.find("No jobs") != std::string::npos);
    CHECK(tools.invoke({"c6", "list_jobs", {}}, {"alice", "simulation"}).payload.find(id) != std::string::npos);
}

TEST_CASE("stock agents register only when their tools exist")
{
    ToolRegistry tools;
    ToolkitServices s;
    s.osti = std::make_shared<OstiClient>(fixture_client());
    register_domain_tools(tools, s);
    orchestrator::AgentRegistry agents;
    auto names = register_default_agents(agents, tools);
    CHECK(names == std::vector<std::string>{"researcher"});
    CHECK(default_agent_specs().size() == 6);
}

}
