// SPDX-License-Identifier: Apache-2.0
#include "copilot/agents/toolkit.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/text.hpp"
#include "copilot/dataplane/artifacts.hpp"

namespace copilot::agents {

namespace {

ArgField string_arg(std::string name, std::string description)
{
    return ArgField{std::move(name), ArgType::String, std::nullopt, std::nullopt, std::move(description)};
}

const char* kLinkRule =
    "When a tool result contains a link, copy it into your answer exactly as written. Do not truncate, wrap, "
    "shorten or split it.";

/// Session scoping: another session's job looks exactly like an unknown id.
jobs::JobRecord owned_job(const jobs::JobScheduler& js, const std::string& id, const ToolContext& ctx)
{
    auto rec = js.status(id);
    if (rec.session_id != ctx.session_id)
        throw Error(ErrorKind::NotFound, "unknown job '" + id + "'");
    return rec;
}

void add_job_tools(ToolRegistry& tools, const ToolkitServices& s, std::vector<std::string>& added)
{
    auto js = s.jobs;
    for (auto kind : {jobs::JobKind::Simulation, jobs::JobKind::ImageSegmentation, jobs::JobKind::VideoTracking,
                      jobs::JobKind::UncertaintyQuantification}) {
        if (!js->has_executor(kind))
            continue;
        auto spec = js->executor(kind).schema();
        spec.reentrant = true;
        auto name = spec.name;
        tools.add(spec, [js, kind](const NormalizedArgs& args, const ToolContext& ctx) {
            auto id = js->submit(kind, to_raw(args), ctx.session_id);
            return ToolOutput{"Submitted " + std::string(jobs::to_string(kind)) + " job " + id +
                                  ". Check on it with job_status and fetch results with collect_job_outputs once it "
                                  "has SUCCEEDED.",
                              {}};
        });
        added.push_back(name);
    }

    tools.add(ToolSpec{"job_status", "Current state and timestamps of one of your jobs.",
                       {string_arg("job_id", "Id returned at submission")}},
              [js](const NormalizedArgs& args, const ToolContext& ctx) {
                  return ToolOutput{describe_job(owned_job(*js, arg_string(args, "job_id"), ctx)), {}};
              });
    tools.add(ToolSpec{"list_jobs", "Every job submitted from this session, oldest first.", {}},
              [js](const NormalizedArgs&, const ToolContext& ctx) {
                  auto recs = js->list(ctx.session_id);
                  if (recs.empty())
                      return ToolOutput{"No jobs have been submitted in this session.", {}};
                  std::string out;
                  for (const auto& r : recs)
                      out += describe_job(r) + "\n";
                  return ToolOutput{out, {}};
              });
    tools.add(ToolSpec{"collect_job_outputs",
                       "Text results and downloadable artifacts of a finished job.",
                       {string_arg("job_id", "Id returned at submission")}},
              [js](const NormalizedArgs& args, const ToolContext& ctx) {
                  auto rec = owned_job(*js, arg_string(args, "job_id"), ctx);
                  auto got = js->collect(rec.id);
                  ToolOutput out;
                  out.text = "Job " + rec.id + " results:\n" + got.text;
                  if (!got.artifacts.empty()) {
                      out.text += "\nDownloads:\n";
                      for (const auto& a : got.artifacts) {
                          out.text += "- " + a.name + ": " + dataplane::artifact_link(a.artifact_id) + "\n";
                          out.artifacts.push_back(a.artifact_id);
                      }
                  }
                  return out;
              });
    added.insert(added.end(), {"job_status", "list_jobs", "collect_job_outputs"});

    if (s.job_inputs) {
        auto store = s.job_inputs;
        tools.add(ToolSpec{"list_segmentation_inputs", "Image and video inputs available for segmentation.", {}},
                  [store](const NormalizedArgs&, const ToolContext&) {
                      const std::string prefix = "inputs/segmentation/";
                      auto keys = store->list(prefix);
                      if (keys.empty())
                          return ToolOutput{"No segmentation inputs are available.", {}};
                      std::string out = "Available inputs:\n";
                      for (const auto& k : keys)
                          out += "- " + k.substr(prefix.size()) + "\n";
                      return ToolOutput{out, {}};
                  });
        added.push_back("list_segmentation_inputs");
    }
}

} // namespace

std::string describe_job(const jobs::JobRecord& r)
{
    std::string out = r.id + " [" + std::string(jobs::to_string(r.kind)) + "] " +
                      std::string(jobs::to_string(r.state)) + ", submitted " + format_timestamp(r.submitted_at);
    if (r.finished_at)
        out += ", finished " + format_timestamp(*r.finished_at);
    if (!r.args.empty())
        out += ", args " + r.args.dump();
    for (const auto& o : r.outputs)
        out += "\n  " + o.name + ": " + dataplane::artifact_link(o.artifact_id);
    return out;
}

std::vector<std::string> register_domain_tools(ToolRegistry& tools, const ToolkitServices& s)
{
    std::vector<std::string> added;
    if (s.osti) {
        auto client = s.osti;
        ToolSpec spec{"osti_search",
                      "Search the public scientific publication repository. Returns title, description, authors and "
                      "DOI for each record.",
                      {string_arg("query", "Keywords to search for"),
                       ArgField{"rows", ArgType::Integer, std::nullopt, Json(s.default_osti_rows),
                                "Maximum number of records"}}};
        tools.add(spec, [client](const NormalizedArgs& args, const ToolContext&) {
            auto rows = static_cast<long>(arg_number(args, "rows"));
            if (rows < 1)
                throw Error(ErrorKind::Precondition, "rows must be positive");
            auto recs = client->search(arg_string(args, "query"), static_cast<std::size_t>(rows));
            return ToolOutput{format_publications(recs), {}};
        });
        added.push_back(spec.name);
    }
    if (s.analyzer) {
        auto analyzer = s.analyzer;
        tools.add(ToolSpec{"analyze_dataset",
                           "Find the ingested dataset that best matches the request, write and run an analysis "
                           "script on it, and return the narrative, output and figure links.",
                           {string_arg("query", "What to analyze, in plain words")},
                           true},
                  [analyzer](const NormalizedArgs& args, const ToolContext& ctx) {
                      auto res = analyzer->analyze(arg_string(args, "query"), ctx.session_id);
                      return ToolOutput{res.render(), res.figures};
                  });
        added.push_back("analyze_dataset");
    }
    if (s.hypothesis) {
        auto gen = s.hypothesis;
        tools.add(ToolSpec{"hypothesis_generator",
                           "Produce a research plan with objectives, theoretical framing and a hypothesis.",
                           {string_arg("topic", "Topic and any parameters to build the plan around")}},
                  [gen](const NormalizedArgs& args, const ToolContext&) {
                      return ToolOutput{gen->generate(arg_string(args, "topic")).render(), {}};
                  });
        added.push_back("hypothesis_generator");
    }
    if (s.jobs)
        add_job_tools(tools, s, added);
    return added;
}

std::vector<AgentSpec> default_agent_specs()
{
    const std::vector<std::string> job_tools = {"job_status", "list_jobs", "collect_job_outputs"};
    auto with_jobs = [&](std::vector<std::string> v) {
        v.insert(v.end(), job_tools.begin(), job_tools.end());
        return v;
    };
    std::string link = kLinkRule;
    return {
        {"researcher", "Finds and summarizes publications from the scientific literature repository.",
         "You review scientific literature. Call osti_search with focused keywords, then summarize only the records "
         "it returns, citing title and DOI. Never invent publications.",
         {"osti_search"}, {}},
        {"analyzer", "Analyzes ingested experimental datasets and produces figures.",
         "You analyze experimental datasets. Call analyze_dataset with the user's request and report its narrative, "
         "output and figure links. " + link,
         {"analyze_dataset"}, {}},
        {"hypothesizer", "Drafts research plans and hypotheses.",
         "You draft research plans. Call hypothesis_generator with the topic. If it returns a plan, use it exactly as "
         "returned with no rephrasing; otherwise say the plan was constructed manually from the input parameters.",
         {"hypothesis_generator"}, {}},
        {"simulation", "Runs nanoparticle sintering simulations as batch jobs.",
         "You run sintering simulations. Submit with run_sintering_simulation using the temperature in degrees "
         "Celsius, track with job_status or list_jobs, and collect results when the job has succeeded. " + link,
         with_jobs({"run_sintering_simulation"}), {}},
        {"segmenter", "Segments particles in microscopy images and tracks them through videos.",
         "You segment and track particles. Use list_segmentation_inputs to see what is available, submit "
         "segment_particles_image or track_particles_video, then track and collect the job. " + link,
         with_jobs({"list_segmentation_inputs", "segment_particles_image", "track_particles_video"}), {}},
        {"uq", "Suggests the next experiments by predictive uncertainty.",
         "You plan experiments under uncertainty. Submit suggest_experiments_uq with the user's bounds, then track "
         "and collect the job and report the ranked suggestions. " + link,
         with_jobs({"suggest_experiments_uq"}), {}},
    };
}

std::vector<std::string> register_default_agents(orchestrator::AgentRegistry& agents, const ToolRegistry& tools,
                                                 const std::string& model_binding)
{
    std::vector<std::string> names;
    for (auto spec : default_agent_specs()) {
        bool ok = true;
        for (const auto& t : spec.tool_names)
            ok = ok && tools.contains(t);
        if (!ok)
            continue;
        spec.model_binding = model_binding;
        agents.register_agent(spec, tools);
        names.push_back(spec.name);
    }
    return names;
}

} // namespace copilot::agents
