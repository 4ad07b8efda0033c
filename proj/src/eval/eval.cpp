// SPDX-License-Identifier: Apache-2.0
#include "copilot/eval/eval.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"
#include "copilot/core/text.hpp"
#include "copilot/core/util.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <regex>
#include <set>
#include <thread>

namespace copilot::eval {

namespace {

const std::vector<std::pair<std::string, std::string>> kStockRows = {
    {"analyzer", "Data Analysis"},   {"hypothesizer", "Hypothesis Generation"},
    {"researcher", "Literature Review"}, {"simulation", "Simulation"},
    {"segmenter", "Segmentation"},   {"uq", "Uncertainty Quantification"},
};

/// count/cases as a percentage in tenths, rounded half up, in integer arithmetic.
std::uint64_t pct_tenths(std::size_t count, std::size_t cases)
{
    if (cases == 0)
        return 0;
    return (static_cast<std::uint64_t>(count) * 1000 + cases / 2) / cases;
}

std::string tenths_text(std::uint64_t t)
{
    return std::to_string(t / 10) + "." + std::to_string(t % 10);
}

std::vector<std::string> string_list(const Json& j, const char* key)
{
    std::vector<std::string> out;
    if (j.is_object() && j.contains(key) && j[key].is_array())
        for (const auto& v : j[key])
            if (v.is_string())
                out.push_back(v.get<std::string>());
    return out;
}

/// Everything any tool returned during the turn.
std::string observed_text(const Json& body)
{
    std::string out;
    if (!body.contains("trace") || !body["trace"].contains("events"))
        return out;
    for (const auto& e : body["trace"]["events"]) {
        if (!e.contains("step") || !e["step"].contains("observation"))
            continue;
        const auto& o = e["step"]["observation"];
        out += o.value("payload", std::string{}) + "\n";
        for (const auto& a : o.value("artifacts", Json::array()))
            if (a.is_string())
                out += "/artifacts/" + a.get<std::string>() + "\n";
    }
    return out;
}

/// Concrete tool results the answer cites (artifact links, job ids, DOIs) that no tool produced.
std::vector<std::string> unsupported_claims(const std::string& response, const std::string& observed)
{
    static const std::regex claim(R"((/artifacts/[A-Za-z0-9_\-]+)|(\bjob-[0-9a-f]{6,}\b)|(\b10\.\d{4,9}/[^\s,;)\]"']+))");
    std::vector<std::string> out;
    for (auto it = std::sregex_iterator(response.begin(), response.end(), claim); it != std::sregex_iterator(); ++it) {
        auto s = it->str();
        while (!s.empty() && (s.back() == '.' || s.back() == ':'))
            s.pop_back();
        if (observed.find(s) == std::string::npos)
            out.push_back(s);
    }
    return out;
}

} // namespace

void to_json(Json& j, const EvalCase& c)
{
    j = Json{{"id", c.id}, {"agent", c.agent}, {"prompt", c.prompt}, {"suite", c.suite}};
}

void from_json(const Json& j, EvalCase& c)
{
    c.id = j.at("id").get<std::string>();
    c.agent = j.at("agent").get<std::string>();
    c.prompt = j.at("prompt").get<std::string>();
    c.suite = j.value("suite", std::string{});
    if (c.id.empty() || c.agent.empty() || text::trim(c.prompt).empty())
        throw Error(ErrorKind::Validation, "case needs non-empty id, agent and prompt");
}

std::vector<EvalCase> parse_cases(std::string_view jsonl)
{
    std::vector<EvalCase> out;
    std::set<std::string> ids;
    std::size_t lineno = 0;
    for (const auto& line : text::split_lines(jsonl)) {
        ++lineno;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        try {
            auto c = Json::parse(t).get<EvalCase>();
            if (!ids.insert(c.id).second)
                throw Error(ErrorKind::Validation, "duplicate case id '" + c.id + "'");
            out.push_back(std::move(c));
        } catch (const std::exception& e) {
            throw Error(ErrorKind::Parse, "case line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<EvalCase> load_cases(const std::filesystem::path& path)
{
    return parse_cases(read_file(path));
}

std::string cases_to_jsonl(const std::vector<EvalCase>& cases)
{
    std::string out;
    for (const auto& c : cases)
        out += Json(c).dump() + "\n";
    return out;
}

std::string_view to_string(FailureCategory c) noexcept
{
    switch (c) {
    case FailureCategory::None: return "none";
    case FailureCategory::Timeout: return "timeout";
    case FailureCategory::Hallucination: return "hallucination";
    case FailureCategory::NoRoute: return "no-route";
    case FailureCategory::Misroute: return "misroute";
    case FailureCategory::Error: return "error";
    }
    return "error";
}

FailureCategory parse_failure_category(std::string_view s)
{
    for (auto c : {FailureCategory::None, FailureCategory::Timeout, FailureCategory::Hallucination,
                   FailureCategory::NoRoute, FailureCategory::Misroute, FailureCategory::Error})
        if (to_string(c) == s)
            return c;
    throw Error(ErrorKind::Parse, "unknown failure category '" + std::string(s) + "'");
}

bool EvalOutcome::consistent(const std::vector<std::string>& phrases) const
{
    bool answered = !text::trim(response).empty() && !is_refusal(response, phrases);
    bool ok_category = category == FailureCategory::None || category == FailureCategory::Misroute;
    bool routed = std::find(invoked_agents.begin(), invoked_agents.end(), target) != invoked_agents.end();
    return task_success == (ok_category && answered) && routing_correct == routed;
}

void to_json(Json& j, const EvalOutcome& o)
{
    j = Json{{"case_id", o.case_id},
             {"target", o.target},
             {"task_success", o.task_success},
             {"routing_correct", o.routing_correct},
             {"invoked_agents", o.invoked_agents},
             {"invoked_tools", o.invoked_tools},
             {"self_reported_agents", o.self_reported_agents},
             {"self_report_agrees", o.self_report_agrees},
             {"latency_ms", o.latency.count()},
             {"category", to_string(o.category)},
             {"response", o.response},
             {"detail", o.detail}};
}

void from_json(const Json& j, EvalOutcome& o)
{
    o.case_id = j.at("case_id").get<std::string>();
    o.target = j.at("target").get<std::string>();
    o.task_success = j.at("task_success").get<bool>();
    o.routing_correct = j.at("routing_correct").get<bool>();
    o.invoked_agents = j.value("invoked_agents", std::vector<std::string>{});
    o.invoked_tools = j.value("invoked_tools", std::vector<std::string>{});
    o.self_reported_agents = j.value("self_reported_agents", std::vector<std::string>{});
    o.self_report_agrees = j.value("self_report_agrees", true);
    o.latency = std::chrono::milliseconds(j.value("latency_ms", 0L));
    o.category = parse_failure_category(j.value("category", std::string("none")));
    o.response = j.value("response", std::string{});
    o.detail = j.value("detail", std::string{});
}

std::vector<std::string> default_refusal_phrases()
{
    return {"i can't help", "i cannot help", "i can't assist", "i cannot assist", "i'm unable to",
            "i am unable to", "i won't be able to", "i'm sorry, but i can't", "i must decline"};
}

bool is_refusal(std::string_view response, const std::vector<std::string>& phrases)
{
    for (const auto& p : phrases)
        if (!p.empty() && text::contains_ci(response, p))
            return true;
    return false;
}

std::string default_addendum()
{
    return "\n\nAt the end of your answer, also report (1) which sub-agents handled this query and (2) which tools "
           "they called. Name only agents and tools that were actually used.";
}

std::vector<std::string> parse_self_report(std::string_view response, const std::vector<std::string>& known)
{
    auto scan = [&](std::string_view s) {
        std::vector<std::string> out;
        for (const auto& a : known)
            if (text::contains_at_ident_boundary(text::to_lower(s), text::to_lower(a)))
                out.push_back(a);
        return out;
    };
    for (const auto& line : text::split_lines(response)) {
        auto lower = text::to_lower(line);
        auto colon = lower.find(':');
        if (colon != std::string::npos && lower.substr(0, colon).find("agent") != std::string::npos)
            return scan(std::string_view(line).substr(colon + 1));
    }
    return scan(response);
}

EvalOutcome judge_reply(const EvalCase& c, const ChatReply& reply, const SuiteOptions& options)
{
    EvalOutcome o;
    o.case_id = c.id;
    o.target = c.agent;
    o.latency = reply.latency;
    const auto& body = reply.body;

    if (body.is_object() && body.contains("trace_summary")) {
        o.invoked_agents = string_list(body["trace_summary"], "agents");
        o.invoked_tools = string_list(body["trace_summary"], "tools");
    }
    o.routing_correct = std::find(o.invoked_agents.begin(), o.invoked_agents.end(), c.agent) != o.invoked_agents.end();

    std::string failure;
    if (body.is_object() && body.contains("error") && body["error"].is_object())
        failure = body["error"].value("category", std::string{});

    if (!reply.transport_error.empty() && reply.reachable) {
        o.category = FailureCategory::Timeout;
        o.detail = "no reply within " + std::to_string(options.timeout.count()) + " ms";
    } else if (reply.latency > options.timeout || failure == "timeout") {
        o.category = FailureCategory::Timeout;
        o.detail = "turn exceeded " + std::to_string(options.timeout.count()) + " ms";
    } else if (reply.status != 200) {
        o.category = FailureCategory::Error;
        o.detail = "status " + std::to_string(reply.status) + (failure.empty() ? "" : " (" + failure + ")");
        if (body.is_object() && body.contains("error") && body["error"].is_object())
            o.detail += ": " + body["error"].value("message", std::string{});
    } else {
        o.response = body.value("final", std::string{});
        if (o.invoked_agents.empty()) {
            o.category = FailureCategory::NoRoute;
            o.detail = "supervisor did not hand the request to any agent";
        } else if (auto claims = unsupported_claims(o.response, observed_text(body)); !claims.empty()) {
            o.category = FailureCategory::Hallucination;
            o.detail = "answer cites results no tool produced: " + text::join(claims, ", ");
        } else if (!o.routing_correct) {
            o.category = FailureCategory::Misroute;
            o.detail = "expected " + c.agent + ", got " + text::join(o.invoked_agents, ", ");
        }
    }

    bool answered = !text::trim(o.response).empty() && !is_refusal(o.response, options.refusal_phrases);
    o.task_success = (o.category == FailureCategory::None || o.category == FailureCategory::Misroute) && answered;
    if (o.category == FailureCategory::None && !answered)
        o.detail = o.response.empty() ? "empty answer" : "answer is a refusal";

    auto known = options.known_agents;
    if (known.empty())
        known.push_back(c.agent);
    for (const auto& a : o.invoked_agents)
        if (std::find(known.begin(), known.end(), a) == known.end())
            known.push_back(a);
    o.self_reported_agents = parse_self_report(o.response, known);
    if (!o.self_reported_agents.empty()) {
        std::set<std::string> said(o.self_reported_agents.begin(), o.self_reported_agents.end());
        std::set<std::string> did(o.invoked_agents.begin(), o.invoked_agents.end());
        o.self_report_agrees = said == did;
    }
    return o;
}

SuiteResult run_suite(const std::vector<EvalCase>& cases, ChatEndpoint& endpoint, const SuiteOptions& options)
{
    SuiteResult result;
    std::vector<std::optional<EvalOutcome>> slots(cases.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::mutex mu;

    auto worker = [&] {
        while (!abort.load()) {
            auto i = next.fetch_add(1);
            if (i >= cases.size())
                return;
            const auto& c = cases[i];
            Json req{{"session_id", "eval-" + c.id + "-" + random_hex(4)},
                     {"message", c.prompt + options.addendum},
                     {"mode", "full"}};
            ChatReply reply;
            try {
                reply = endpoint.send(req, options.timeout);
            } catch (const std::exception& e) {
                reply.reachable = false;
                reply.transport_error = e.what();
            }
            if (!reply.reachable) {
                std::lock_guard lk(mu);
                if (!abort.exchange(true))
                    result.abort_reason = endpoint.describe() + " unreachable: " + reply.transport_error;
                return;
            }
            auto o = judge_reply(c, reply, options);
            log::debug("eval ", c.id, ": ", to_string(o.category));
            std::lock_guard lk(mu);
            slots[i] = std::move(o);
        }
    };

    auto n = std::max<std::size_t>(1, std::min(options.parallelism, cases.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();

    result.aborted = abort.load();
    for (auto& s : slots)
        if (s)
            result.outcomes.push_back(std::move(*s));
    return result;
}

std::string agent_label(const std::string& agent)
{
    for (const auto& [name, label] : kStockRows)
        if (name == agent)
            return label;
    return agent;
}

std::string format_pct(double pct)
{
    auto tenths = static_cast<long long>(pct * 10 + (pct >= 0 ? 0.5 : -0.5));
    auto sign = tenths < 0 ? "-" : "";
    tenths = tenths < 0 ? -tenths : tenths;
    return sign + tenths_text(static_cast<std::uint64_t>(tenths));
}

double EvalReport::success_pct() const
{
    return cases == 0 ? 0.0 : 100.0 * static_cast<double>(successful) / static_cast<double>(cases);
}

double EvalReport::correct_pct() const
{
    return cases == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(cases);
}

std::string EvalReport::render_table() const
{
    auto pad = [](std::string s, std::size_t w, bool right) {
        if (s.size() >= w)
            return s;
        return right ? std::string(w - s.size(), ' ') + s : s + std::string(w - s.size(), ' ');
    };
    std::string out = pad("Agent", 28, false) + pad("Task Successful", 17, true) + pad("Correct Agent", 15, true) + "\n";
    out += std::string(60, '-') + "\n";
    for (const auto& r : rows)
        out += pad(r.label, 28, false) + pad(std::to_string(r.successful), 17, true) +
               pad(std::to_string(r.correct), 15, true) + "\n";
    out += std::string(60, '-') + "\n";
    out += pad("Total", 28, false) + pad(tenths_text(pct_tenths(successful, cases)) + "%", 17, true) +
           pad(tenths_text(pct_tenths(correct, cases)) + "%", 15, true) + "\n";
    return out;
}

Json EvalReport::to_json() const
{
    Json jr = Json::array();
    for (const auto& r : rows)
        jr.push_back(Json{{"agent", r.agent},
                          {"label", r.label},
                          {"cases", r.cases},
                          {"task_successful", r.successful},
                          {"correct_agent", r.correct},
                          {"task_success_pct", tenths_text(pct_tenths(r.successful, r.cases))},
                          {"correct_agent_pct", tenths_text(pct_tenths(r.correct, r.cases))}});
    return Json{{"rows", jr},
                {"cases", cases},
                {"task_successful", successful},
                {"correct_agent", correct},
                {"task_success_pct", tenths_text(pct_tenths(successful, cases))},
                {"correct_agent_pct", tenths_text(pct_tenths(correct, cases))},
                {"categories", categories},
                {"self_report_disagreements", self_report_disagreements}};
}

EvalReport score_outcomes(const std::vector<EvalOutcome>& outcomes)
{
    EvalReport report;
    std::map<std::string, ReportRow> by_agent;
    for (const auto& o : outcomes) {
        auto& row = by_agent[o.target];
        row.agent = o.target;
        ++row.cases;
        row.successful += o.task_success ? 1 : 0;
        row.correct += o.routing_correct ? 1 : 0;
        ++report.categories[std::string(to_string(o.category))];
        report.self_report_disagreements += o.self_report_agrees ? 0 : 1;
    }
    for (const auto& [name, label] : kStockRows) {
        auto it = by_agent.find(name);
        if (it == by_agent.end())
            continue;
        it->second.label = label;
        report.rows.push_back(it->second);
        by_agent.erase(it);
    }
    for (auto& [name, row] : by_agent) {
        row.label = name;
        report.rows.push_back(row);
    }
    for (const auto& r : report.rows) {
        report.cases += r.cases;
        report.successful += r.successful;
        report.correct += r.correct;
    }
    return report;
}

std::string case_generation_prompt(const std::string& excerpt, std::size_t count)
{
    return "Below is the system prompt of a tool-using assistant. Write " + std::to_string(count) +
           " distinct user requests that this assistant, and only this assistant, should handle. Vary the wording "
           "and the parameters, keep each request to a single line, and put one request per line with no "
           "numbering.\n\nAssistant prompt:\n" + excerpt;
}

std::vector<std::string> parse_generated_cases(std::string_view body)
{
    std::vector<std::string> out;
    for (const auto& line : text::split_lines(body)) {
        std::string_view t = text::trim(line);
        std::size_t i = 0;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])))
            ++i;
        if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')'))
            t.remove_prefix(i + 1);
        else if (!t.empty() && (t.front() == '-' || t.front() == '*'))
            t.remove_prefix(1);
        t = text::trim(t);
        if (t.size() >= 2 && t.front() == '"' && t.back() == '"')
            t = t.substr(1, t.size() - 2);
        t = text::trim(t);
        if (!t.empty())
            out.emplace_back(t);
    }
    return out;
}

std::vector<EvalCase> generate_case_suite(const std::string& agent, const std::string& excerpt, std::size_t count,
                                          gateway::Gateway& gateway, const std::string& backend,
                                          const std::string& suite)
{
    if (count == 0)
        return {};
    gateway::ModelRequest req;
    req.messages = {Message::user(case_generation_prompt(excerpt, count))};
    req.backend = backend;
    req.agent = "case_generator";
    auto resp = gateway.complete(req);

    std::vector<EvalCase> out;
    std::set<std::string> seen;
    std::size_t dupes = 0;
    for (auto& p : parse_generated_cases(resp.text.value_or(""))) {
        if (!seen.insert(text::to_lower(p)).second) {
            ++dupes;
            continue;
        }
        if (out.size() == count)
            break;
        char id[16];
        std::snprintf(id, sizeof id, "%02zu", out.size() + 1);
        out.push_back(EvalCase{agent + "-" + suite + "-" + id, agent, std::move(p), suite});
    }
    if (dupes > 0)
        log::warn("generate_case_suite: dropped ", dupes, " duplicate prompt(s) for ", agent);
    if (out.size() < count)
        log::warn("generate_case_suite: asked for ", count, " cases for ", agent, ", got ", out.size());
    return out;
}

} // namespace copilot::eval
