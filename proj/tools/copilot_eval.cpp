// SPDX-License-Identifier: Apache-2.0
// Agent-invocation evaluation and benchmark accounting.
#include "copilot/app/app.hpp"
#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"
#include "copilot/core/text.hpp"
#include "copilot/core/util.hpp"
#include "copilot/eval/benchmark.hpp"
#include "copilot/eval/eval.hpp"
#include "copilot/service/api.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace copilot;

namespace {

struct Target {
    std::string endpoint;
    std::string config = "config/copilot.json";
    std::string auth_header = "X-Auth-User";
    std::string user = "eval";
};

void add_target_options(CLI::App* cmd, Target& t)
{
    cmd->add_option("--endpoint", t.endpoint, "Base URL of a running server; omit to run in-process");
    cmd->add_option("-c,--config", t.config, "Configuration for in-process runs");
    cmd->add_option("--auth-header", t.auth_header, "Identity header name");
    cmd->add_option("--user", t.user, "Identity asserted to the server");
}

/// Either an HTTP client or an in-process app behind the same handler.
struct Connection {
    std::unique_ptr<app::App> app;
    std::unique_ptr<service::ApiHandler> handler;
    std::unique_ptr<eval::ChatEndpoint> endpoint;
    std::vector<std::string> agents;
};

Connection connect(const Target& t)
{
    Connection c;
    if (!t.endpoint.empty()) {
        c.endpoint = std::make_unique<eval::HttpChatEndpoint>(t.endpoint, t.auth_header, t.user);
        return c;
    }
    c.app = std::make_unique<app::App>(app::load_app_config(t.config));
    c.handler = std::make_unique<service::ApiHandler>(service::ApiConfig{c.app->config().server.auth_header},
                                                      c.app->engine(), c.app->jobs(), c.app->artifacts());
    c.endpoint = std::make_unique<eval::LocalChatEndpoint>(*c.handler, t.user);
    c.agents = c.app->agents().names();
    return c;
}

void write_text(const std::string& path, const std::string& body)
{
    if (path.empty())
        return;
    write_file(path, body);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App cli{"copilot-eval: routing evaluation and benchmark accounting"};
    cli.require_subcommand(1);
    std::string level = "warn";
    cli.add_option("--log-level", level, "debug, info, warn, error or off");

    Target target;
    std::string cases_path, outcomes_path, report_path;
    double timeout_s = 60;
    std::size_t parallelism = 1;
    auto* run = cli.add_subcommand("run-suite", "Run a case suite and score it");
    run->add_option("cases", cases_path, "Case suite (JSON lines)")->required()->check(CLI::ExistingFile);
    run->add_option("--outcomes", outcomes_path, "Write per-case outcomes (JSON lines)");
    run->add_option("--report", report_path, "Write the report as JSON");
    run->add_option("--timeout", timeout_s, "Per-case timeout in seconds");
    run->add_option("--parallelism", parallelism, "Cases in flight at once");
    add_target_options(run, target);

    std::string score_in;
    bool score_json = false;
    auto* score = cli.add_subcommand("score", "Score stored outcomes");
    score->add_option("outcomes", score_in, "Outcomes (JSON lines)")->required()->check(CLI::ExistingFile);
    score->add_flag("--json", score_json, "Print JSON instead of the table");

    std::string gen_agent, gen_excerpt, gen_out, gen_backend, gen_suite = "generated";
    std::size_t gen_count = 20;
    auto* gen = cli.add_subcommand("gen-cases", "Generate a case suite for one agent with a model");
    gen->add_option("--agent", gen_agent, "Target agent")->required();
    gen->add_option("--excerpt", gen_excerpt, "File with the agent prompt excerpt; default: the agent's prompt");
    gen->add_option("--count", gen_count, "Number of cases");
    gen->add_option("--backend", gen_backend, "Backend id; default: the configured case_generator binding");
    gen->add_option("--suite", gen_suite, "Suite name");
    gen->add_option("-o,--out", gen_out, "Output file (JSON lines); default stdout");
    gen->add_option("-c,--config", target.config, "Configuration");

    std::string bench_path;
    auto* bench = cli.add_subcommand("run-benchmark", "Completion and correctness accounting over a question file");
    bench->add_option("questions", bench_path, "Question file (JSON lines)")->required()->check(CLI::ExistingFile);
    bench->add_option("--report", report_path, "Write the report as JSON");
    bench->add_option("--timeout", timeout_s, "Per-question timeout in seconds");
    bench->add_option("--parallelism", parallelism, "Questions in flight at once");
    add_target_options(bench, target);

    CLI11_PARSE(cli, argc, argv);

    try {
        log::set_level(log::parse_level(level));
        auto timeout = std::chrono::milliseconds(static_cast<long>(timeout_s * 1000));

        if (*run) {
            auto cases = eval::load_cases(cases_path);
            auto conn = connect(target);
            eval::SuiteOptions opts;
            opts.timeout = timeout;
            opts.parallelism = parallelism;
            opts.known_agents = conn.agents;
            auto result = eval::run_suite(cases, *conn.endpoint, opts);
            std::string lines;
            for (const auto& o : result.outcomes)
                lines += Json(o).dump() + "\n";
            write_text(outcomes_path, lines);
            auto report = eval::score_outcomes(result.outcomes);
            std::cout << report.render_table();
            for (const auto& [cat, n] : report.categories)
                std::cout << "  " << cat << ": " << n << "\n";
            write_text(report_path, report.to_json().dump(2) + "\n");
            if (result.aborted) {
                std::cerr << "suite aborted after " << result.outcomes.size() << " of " << cases.size()
                          << " cases: " << result.abort_reason << "\n";
                return 2;
            }
        } else if (*score) {
            std::vector<eval::EvalOutcome> outcomes;
            for (const auto& line : text::split_lines(read_file(score_in)))
                if (!text::trim(line).empty())
                    outcomes.push_back(Json::parse(line).get<eval::EvalOutcome>());
            auto report = eval::score_outcomes(outcomes);
            std::cout << (score_json ? report.to_json().dump(2) + "\n" : report.render_table());
        } else if (*gen) {
            app::App application(app::load_app_config(target.config));
            std::string excerpt;
            if (!gen_excerpt.empty())
                excerpt = read_file(gen_excerpt);
            else
                excerpt = application.agents().get(gen_agent).system_prompt;
            auto backend = gen_backend.empty() ? application.config().binding("case_generator") : gen_backend;
            auto cases = eval::generate_case_suite(gen_agent, excerpt, gen_count, application.gateway(), backend, gen_suite);
            auto body = eval::cases_to_jsonl(cases);
            if (gen_out.empty())
                std::cout << body;
            else
                write_file(gen_out, body);
        } else if (*bench) {
            auto questions = eval::load_benchmark(bench_path);
            auto conn = connect(target);
            eval::BenchmarkOptions opts;
            opts.timeout = timeout;
            opts.parallelism = parallelism;
            auto report = eval::run_benchmark(questions, *conn.endpoint, opts);
            std::cout << report.render_table();
            write_text(report_path, report.to_json().dump(2) + "\n");
            if (report.aborted) {
                std::cerr << "benchmark aborted: " << report.abort_reason << "\n";
                return 2;
            }
        }
    } catch (const Error& e) {
        std::cerr << "copilot-eval: " << e.category() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "copilot-eval: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
