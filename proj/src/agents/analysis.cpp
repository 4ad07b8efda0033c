// SPDX-License-Identifier: Apache-2.0
#include "copilot/agents/analysis.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"
#include "copilot/core/text.hpp"

#include <filesystem>

namespace copilot::agents {

namespace {

const char* kCodegenPrompt =
    "You write exploratory analyses of tabular scientific data.\n"
    "Reply with a short narrative of what the analysis shows and what to look at next, followed by exactly one "
    "```python fenced block.\n"
    "The script runs in a scratch directory holding the dataset file named below. Use only numpy, pandas, "
    "matplotlib and seaborn; they are already available as np, pd, plt and sns. Save every figure as a .png file in "
    "the current directory and print any summary tables.";

std::string preview(const std::string& data, std::size_t lines)
{
    auto all = text::split_lines(data);
    if (all.size() > lines)
        all.resize(lines);
    return text::join(all, "\n");
}

} // namespace

std::pair<std::string, std::string> split_narrative_and_code(const std::string& model_text)
{
    auto open = model_text.find("```");
    while (open != std::string::npos) {
        auto eol = model_text.find('\n', open);
        if (eol == std::string::npos)
            break;
        auto lang = text::to_lower(text::trim(model_text.substr(open + 3, eol - open - 3)));
        auto close = model_text.find("```", eol + 1);
        if (close == std::string::npos)
            break;
        if (lang.empty() || lang == "python" || lang == "py") {
            std::string narrative = std::string(text::trim(model_text.substr(0, open))) ;
            auto after = text::trim(model_text.substr(close + 3));
            if (!after.empty())
                narrative += (narrative.empty() ? "" : "\n\n") + std::string(after);
            return {narrative, model_text.substr(eol + 1, close - eol - 1)};
        }
        open = model_text.find("```", close + 3);
    }
    return {std::string(text::trim(model_text)), {}};
}

std::string AnalysisResult::render() const
{
    std::string out = "Dataset: " + record_id + " (" + file_name + ")\n\n" + narrative + "\n";
    if (!rejection.empty())
        out += "\nThe generated script did not run: " + rejection + ".\n";
    if (!sandbox_failure.empty())
        out += "\nThe generated script failed in the sandbox (" + sandbox_failure + ").\n";
    if (!figures.empty()) {
        out += "\nFigures:\n";
        for (const auto& id : figures)
            out += "- " + dataplane::artifact_link(id) + "\n";
    }
    if (!stdout_text.empty())
        out += "\nOutput:\n" + stdout_text;
    return out;
}

DatasetAnalyzer::DatasetAnalyzer(AnalysisConfig config, dataplane::DataPlane& plane,
                                 dataplane::ArtifactStore& artifacts, gateway::Gateway& gateway,
                                 sandbox::Sandbox& sandbox)
    : config_(std::move(config)), plane_(plane), artifacts_(artifacts), gateway_(gateway), sandbox_(sandbox)
{
    config_.policy.check();
    if (config_.search_k == 0)
        config_.search_k = 1;
}

std::mutex& DatasetAnalyzer::dataset_lock(const std::string& record_id)
{
    std::lock_guard lk(locks_mu_);
    auto& m = locks_[record_id];
    if (!m)
        m = std::make_unique<std::mutex>();
    return *m;
}

std::optional<std::string> DatasetAnalyzer::select_dataset(const std::string& query) const
{
    auto hits = plane_.keyword_search(query, config_.search_k);
    if (hits.empty())
        return std::nullopt;
    std::string best = hits.front().record_id;
    std::uint64_t best_seq = 0;
    for (const auto& h : hits) {
        if (h.score != hits.front().score)
            break;
        auto rec = plane_.record(h.record_id);
        if (rec && rec->ingest_seq > best_seq) {
            best_seq = rec->ingest_seq;
            best = h.record_id;
        }
    }
    return best;
}

AnalysisResult DatasetAnalyzer::analyze(const std::string& query, const std::string& session_id)
{
    if (text::trim(query).empty())
        throw Error(ErrorKind::Precondition, "analysis needs a query");
    if (plane_.record_ids().empty())
        throw Error(ErrorKind::Precondition, "no datasets have been ingested");
    auto chosen = select_dataset(query);
    if (!chosen)
        throw Error(ErrorKind::NotFound, "no dataset matches the query");
    auto rec = plane_.record(*chosen);
    if (!rec || rec->files.empty())
        throw Error(ErrorKind::NotFound, "dataset '" + *chosen + "' has no files");

    const auto* file = &rec->files.front();
    for (const auto& f : rec->files)
        if (std::filesystem::path(f.first).extension() == ".csv") {
            file = &f;
            break;
        }
    AnalysisResult result;
    result.record_id = *chosen;
    result.file_name = std::filesystem::path(file->first).filename().string();
    auto data = plane_.objects().fetch(file->second);

    std::string context = "Request: " + query + "\n\nDataset: " + rec->metadata.title.value_or(*chosen) + "\n";
    if (rec->metadata.description)
        context += "Description: " + *rec->metadata.description + "\n";
    context += "File: " + result.file_name + "\n\nFirst lines:\n" + preview(data, config_.preview_lines);

    gateway::ModelRequest req;
    req.messages = {Message::system(kCodegenPrompt), Message::user(context)};
    req.backend = config_.codegen_backend;
    req.agent = config_.codegen_binding;
    auto resp = gateway_.complete(req);
    auto [narrative, code] = split_narrative_and_code(resp.text.value_or(""));
    result.narrative = narrative;
    result.generated_script = code;
    if (text::trim(code).empty()) {
        result.rejection = "no analysis script was produced";
        return result;
    }

    auto filtered = sandbox::tier2_filter(code, config_.policy);
    if (!filtered) {
        result.rejection = filtered.reason;
        log::info("analysis: script for ", *chosen, " rejected: ", filtered.reason);
        return result;
    }
    result.sanitized_script = filtered.sanitized;

    sandbox::ExecutionOutcome outcome;
    {
        std::lock_guard lk(dataset_lock(*chosen));
        outcome = sandbox_.execute(filtered.sanitized, {{result.file_name, data}}, filtered.bindings);
    }
    result.executed = true;
    result.stdout_text = outcome.stdout_text;
    if (!outcome.ok) {
        result.sandbox_failure = outcome.category;
        if (!outcome.stderr_text.empty())
            result.stdout_text += outcome.stderr_text;
    }
    for (const auto& fig : outcome.figures)
        result.figures.push_back(artifacts_.put(fig.name, fig.bytes, session_id, "image/png").id);
    return result;
}

} // namespace copilot::agents
