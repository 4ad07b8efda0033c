// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/eval/endpoint.hpp"
#include "copilot/gateway/gateway.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace copilot::eval {

struct EvalCase {
    std::string id;
    std::string agent;   // target agent
    std::string prompt;
    std::string suite;

    bool operator==(const EvalCase&) const = default;
};

void to_json(Json& j, const EvalCase& c);
void from_json(const Json& j, EvalCase& c);

/// Line-delimited JSON; blank lines and lines starting with '#' are skipped.
/// Throws Error(Parse) naming the line for malformed input.
std::vector<EvalCase> parse_cases(std::string_view jsonl);
std::vector<EvalCase> load_cases(const std::filesystem::path& path);
std::string cases_to_jsonl(const std::vector<EvalCase>& cases);

enum class FailureCategory { None, Timeout, Hallucination, NoRoute, Misroute, Error };

std::string_view to_string(FailureCategory c) noexcept;
FailureCategory parse_failure_category(std::string_view s);

struct EvalOutcome {
    std::string case_id;
    std::string target;
    bool task_success = false;
    bool routing_correct = false;
    std::vector<std::string> invoked_agents;  // from the engine trace
    std::vector<std::string> invoked_tools;
    std::vector<std::string> self_reported_agents;  // parsed from the answer, cross-check only
    bool self_report_agrees = true;
    std::chrono::milliseconds latency{0};
    FailureCategory category = FailureCategory::None;
    std::string response;
    std::string detail;

    /// task_success <=> category in {None, Misroute} and the response is a non-empty non-refusal;
    /// routing_correct <=> target in invoked_agents.
    bool consistent(const std::vector<std::string>& refusal_phrases) const;
};

void to_json(Json& j, const EvalOutcome& o);
void from_json(const Json& j, EvalOutcome& o);

/// Default phrase list used to detect refusals (case-insensitive substring match).
std::vector<std::string> default_refusal_phrases();
bool is_refusal(std::string_view response, const std::vector<std::string>& phrases);

/// Appended to every case prompt.
std::string default_addendum();

struct SuiteOptions {
    std::chrono::milliseconds timeout{60'000};
    std::size_t parallelism = 1;
    std::string addendum = default_addendum();
    std::vector<std::string> refusal_phrases = default_refusal_phrases();
    std::vector<std::string> known_agents;  // for parsing the self-report; empty: every case target
};

struct SuiteResult {
    std::vector<EvalOutcome> outcomes;  // in case order; partial when aborted
    bool aborted = false;
    std::string abort_reason;
};

/// Sends every case through the endpoint and judges it from the returned engine trace.
/// An unreachable endpoint aborts the run; finished outcomes are kept.
SuiteResult run_suite(const std::vector<EvalCase>& cases, ChatEndpoint& endpoint, const SuiteOptions& options = {});

/// Judges one /chat reply. Exposed for testing.
EvalOutcome judge_reply(const EvalCase& c, const ChatReply& reply, const SuiteOptions& options);

/// Extracts agent names the answer claims to have used.
std::vector<std::string> parse_self_report(std::string_view response, const std::vector<std::string>& known_agents);

struct ReportRow {
    std::string agent;
    std::string label;
    std::size_t cases = 0;
    std::size_t successful = 0;
    std::size_t correct = 0;
};

struct EvalReport {
    std::vector<ReportRow> rows;
    std::size_t cases = 0;
    std::size_t successful = 0;
    std::size_t correct = 0;
    std::map<std::string, std::size_t> categories;
    std::size_t self_report_disagreements = 0;

    double success_pct() const;
    double correct_pct() const;
    /// Table with one row per agent, counts per row and percentage totals.
    std::string render_table() const;
    Json to_json() const;
};

/// Display label for an agent ("researcher" -> "Literature Review"); unknown names pass through.
std::string agent_label(const std::string& agent);

/// Percentage to one decimal place, e.g. 97.5.
std::string format_pct(double pct);

/// Rows follow the stock agent order (Data Analysis first), then other agents alphabetically.
EvalReport score_outcomes(const std::vector<EvalOutcome>& outcomes);

/// Asks a model for `count` distinct test prompts for one agent. Duplicates are dropped with a
/// warning. count == 0 returns an empty suite without calling the backend.
std::vector<EvalCase> generate_case_suite(const std::string& agent, const std::string& agent_prompt_excerpt,
                                          std::size_t count, gateway::Gateway& gateway,
                                          const std::string& backend = {}, const std::string& suite = "generated");

/// Prompt sent by generate_case_suite.
std::string case_generation_prompt(const std::string& agent_prompt_excerpt, std::size_t count);

/// Splits a model listing into prompts: one per non-empty line, numbering, bullets and quotes stripped.
std::vector<std::string> parse_generated_cases(std::string_view text);

} // namespace copilot::eval
