// SPDX-License-Identifier: Apache-2.0
#include "copilot/agents/hypothesis.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"
#include "copilot/core/text.hpp"

namespace copilot::agents {

namespace {

const char* kToolPrompt =
    "Draft a research plan for the topic given by the user. Use three sections headed "
    "'Objectives:', 'Theoretical framing:' and 'Hypothesis:'. List objectives one per line.";

const char* kFallbackPrompt =
    "The plan generator returned nothing. Using only the parameters in the user's request, write a research plan "
    "with sections headed 'Objectives:', 'Theoretical framing:' and 'Hypothesis:'.";

enum class Section { None, Objectives, Framing, Hypothesis };

Section heading(std::string_view line, std::string& rest)
{
    auto lower = text::to_lower(line);
    while (!lower.empty() && (lower.front() == '#' || lower.front() == '*' || lower.front() == ' '))
        lower.erase(lower.begin()), line.remove_prefix(1);
    static const std::pair<const char*, Section> names[] = {
        {"objectives", Section::Objectives},           {"objective", Section::Objectives},
        {"theoretical framing", Section::Framing},     {"framing", Section::Framing},
        {"proposed hypothesis", Section::Hypothesis},  {"hypothesis", Section::Hypothesis},
    };
    for (const auto& [name, sec] : names) {
        std::string n = name;
        if (lower.rfind(n, 0) != 0)
            continue;
        auto tail = std::string_view(line).substr(n.size());
        while (!tail.empty() && (tail.front() == '*' || tail.front() == ' '))
            tail.remove_prefix(1);
        if (tail.empty() || tail.front() != ':')
            continue;
        rest = std::string(text::trim(tail.substr(1)));
        return sec;
    }
    return Section::None;
}

std::string strip_bullet(std::string_view line)
{
    auto t = text::trim(line);
    if (!t.empty() && (t.front() == '-' || t.front() == '*'))
        t.remove_prefix(1);
    else {
        std::size_t i = 0;
        while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i])))
            ++i;
        if (i > 0 && i < t.size() && (t[i] == '.' || t[i] == ')'))
            t.remove_prefix(i + 1);
    }
    return std::string(text::trim(t));
}

std::string template_plan(const std::string& topic)
{
    return "Objectives:\n"
           "- Identify the variables in \"" + topic + "\" that can be controlled experimentally\n"
           "- Measure how the response changes as each variable is varied on its own\n"
           "Theoretical framing:\n"
           "Treat the topic as a response surface over the stated parameters and look for monotone trends before "
           "fitting mechanistic models.\n"
           "Hypothesis:\n"
           "Varying the parameters named in \"" + topic + "\" produces a measurable, monotone change in the "
           "response of interest.";
}

} // namespace

bool ResearchPlan::complete() const
{
    return !objectives.empty() && !text::trim(theoretical_framing).empty() && !text::trim(hypothesis).empty();
}

std::string ResearchPlan::render() const
{
    return std::string(source == "tool" ? kToolPlanLabel : kManualPlanLabel) + "\n" + text;
}

Json ResearchPlan::to_json() const
{
    return Json{{"objectives", objectives},
                {"theoretical_framing", theoretical_framing},
                {"hypothesis", hypothesis},
                {"text", text},
                {"source", source}};
}

ResearchPlan parse_research_plan(const std::string& body)
{
    ResearchPlan plan;
    plan.text = body;
    Section current = Section::None;
    std::vector<std::string> framing, hyp, preamble;
    for (const auto& line : text::split_lines(body)) {
        std::string rest;
        if (auto sec = heading(line, rest); sec != Section::None) {
            current = sec;
            if (rest.empty())
                continue;
            if (sec == Section::Objectives)
                plan.objectives.push_back(strip_bullet(rest));
            else
                (sec == Section::Framing ? framing : hyp).push_back(rest);
            continue;
        }
        if (text::trim(line).empty())
            continue;
        switch (current) {
        case Section::Objectives: plan.objectives.push_back(strip_bullet(line)); break;
        case Section::Framing: framing.push_back(std::string(text::trim(line))); break;
        case Section::Hypothesis: hyp.push_back(std::string(text::trim(line))); break;
        case Section::None: preamble.push_back(std::string(text::trim(line))); break;
        }
    }
    std::erase_if(plan.objectives, [](const std::string& s) { return s.empty(); });
    plan.theoretical_framing = text::join(framing, " ");
    plan.hypothesis = text::join(hyp, " ");

    auto whole = std::string(text::trim(body));
    if (plan.objectives.empty())
        plan.objectives.push_back(preamble.empty() ? whole : preamble.front());
    if (plan.theoretical_framing.empty())
        plan.theoretical_framing = preamble.empty() ? whole : text::join(preamble, " ");
    if (plan.hypothesis.empty())
        plan.hypothesis = whole;
    return plan;
}

HypothesisGenerator::HypothesisGenerator(HypothesisConfig config, gateway::Gateway& gateway)
    : config_(std::move(config)), gateway_(gateway)
{
}

ResearchPlan HypothesisGenerator::generate(const std::string& topic)
{
    if (text::trim(topic).empty())
        throw Error(ErrorKind::Precondition, "hypothesis generation needs a topic");

    gateway::ModelRequest req;
    req.messages = {Message::system(kToolPrompt), Message::user(topic)};
    req.backend = config_.tool_backend;
    req.agent = config_.tool_binding;
    std::string produced;
    try {
        produced = gateway_.complete(req).text.value_or("");
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Guardrail)
            throw;
        log::warn("hypothesis tool call failed, falling back: ", e.what());
    }
    if (!text::trim(produced).empty()) {
        auto plan = parse_research_plan(produced);
        plan.source = "tool";
        return plan;
    }

    req.messages = {Message::system(kFallbackPrompt), Message::user(topic)};
    req.backend = config_.fallback_backend;
    req.agent = config_.fallback_binding;
    auto fallback = gateway_.complete(req).text.value_or("");
    ResearchPlan plan;
    if (!text::trim(fallback).empty()) {
        plan = parse_research_plan(fallback);
        plan.source = "fallback";
    } else {
        plan = parse_research_plan(template_plan(topic));
        plan.source = "template";
    }
    return plan;
}

} // namespace copilot::agents
