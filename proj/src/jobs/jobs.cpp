// SPDX-License-Identifier: Apache-2.0
#include "copilot/jobs/jobs.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"

#include <algorithm>

namespace fs = std::filesystem;

namespace copilot::jobs {

std::string_view to_string(JobKind k) noexcept
{
    switch (k) {
    case JobKind::Simulation: return "Simulation";
    case JobKind::VideoTracking: return "VideoTracking";
    case JobKind::ImageSegmentation: return "ImageSegmentation";
    case JobKind::UncertaintyQuantification: return "UncertaintyQuantification";
    }
    return "?";
}

std::string_view to_string(JobState s) noexcept
{
    switch (s) {
    case JobState::Submitted: return "SUBMITTED";
    case JobState::Starting: return "STARTING";
    case JobState::Running: return "RUNNING";
    case JobState::Succeeded: return "SUCCEEDED";
    case JobState::Failed: return "FAILED";
    }
    return "?";
}

std::string_view to_string(ResourceClass r) noexcept { return r == ResourceClass::Gpu ? "GPU" : "CPU"; }

JobKind parse_job_kind(std::string_view s)
{
    for (auto k : {JobKind::Simulation, JobKind::VideoTracking, JobKind::ImageSegmentation,
                   JobKind::UncertaintyQuantification})
        if (to_string(k) == s)
            return k;
    throw Error(ErrorKind::NotFound, "unknown job kind '" + std::string(s) + "'");
}

bool is_terminal(JobState s) noexcept { return s == JobState::Succeeded || s == JobState::Failed; }

bool is_valid_transition(JobState from, JobState to) noexcept
{
    switch (from) {
    case JobState::Submitted: return to == JobState::Starting;
    case JobState::Starting: return to == JobState::Running;
    case JobState::Running: return to == JobState::Succeeded || to == JobState::Failed;
    default: return false;
    }
}

Json ExecutionContext::args() const { return Json::parse(read_file(args_file)); }

Json JobRecord::to_json(bool detailed) const
{
    Json outs = Json::array();
    for (const auto& o : outputs)
        outs.push_back({{"name", o.name},
                        {"artifact_id", o.artifact_id},
                        {"link", dataplane::artifact_link(o.artifact_id)},
                        {"content_type", o.content_type},
                        {"size", o.size}});
    Json hist = Json::array();
    for (const auto& h : history)
        hist.push_back({{"state", to_string(h.state)}, {"at", format_timestamp(h.at)}});
    auto opt_ts = [](const std::optional<Timestamp>& t) { return t ? Json(format_timestamp(*t)) : Json(nullptr); };
    Json j{{"job_id", id},
           {"kind", to_string(kind)},
           {"resource", to_string(resource)},
           {"args", args},
           {"state", to_string(state)},
           {"session_id", session_id},
           {"submitted_at", format_timestamp(submitted_at)},
           {"started_at", opt_ts(started_at)},
           {"finished_at", opt_ts(finished_at)},
           {"outputs", outs},
           {"history", hist}};
    if (detailed) {
        j["text_output"] = text_output;
        j["failure_log"] = failure_log;
    }
    return j;
}

JobScheduler::JobScheduler(SchedulerConfig config, std::shared_ptr<dataplane::ObjectStore> inputs,
                           std::shared_ptr<dataplane::ArtifactStore> artifacts)
    : config_(std::move(config)), inputs_(std::move(inputs)), artifacts_(std::move(artifacts))
{
    if (config_.workers == 0)
        throw Error(ErrorKind::Validation, "job scheduler needs at least one worker");
    if (!inputs_ || !artifacts_)
        throw Error(ErrorKind::InvalidArgument, "job scheduler needs an object store and an artifact store");
    if (config_.work_root.empty()) {
        work_root_ = fs::temp_directory_path() / ("copilot-jobs-" + random_hex(6));
        owns_work_root_ = true;
    } else {
        work_root_ = config_.work_root;
    }
    fs::create_directories(work_root_);
    for (std::size_t i = 0; i < config_.workers; ++i)
        workers_.emplace_back([this] { worker(); });
}

JobScheduler::~JobScheduler()
{
    shutdown();
    if (owns_work_root_ && !config_.keep_workspaces) {
        std::error_code ec;
        fs::remove_all(work_root_, ec);
    }
}

void JobScheduler::shutdown()
{
    {
        std::lock_guard lk(mu_);
        if (stopping_ && workers_.empty())
            return;
        stopping_ = true;
    }
    queue_cv_.notify_all();
    for (auto& t : workers_)
        if (t.joinable())
            t.join();
    workers_.clear();
}

void JobScheduler::register_executor(JobDefinition def, std::shared_ptr<Executor> executor)
{
    if (!executor)
        throw Error(ErrorKind::InvalidArgument, "null executor");
    if (executor->kind() != def.kind)
        throw Error(ErrorKind::Validation, "executor '" + executor->name() + "' cannot run " +
                                               std::string(to_string(def.kind)) + " jobs");
    if (!def.executor.empty() && def.executor != executor->name())
        throw Error(ErrorKind::Validation, "job definition references executor '" + def.executor + "' but got '" +
                                               executor->name() + "'");
    executor->schema().check();
    def.executor = executor->name();
    std::lock_guard lk(mu_);
    executors_[def.kind] = {def, std::move(executor)};
}

bool JobScheduler::has_executor(JobKind kind) const
{
    std::lock_guard lk(mu_);
    return executors_.count(kind) != 0;
}

const Executor& JobScheduler::executor(JobKind kind) const
{
    std::lock_guard lk(mu_);
    auto it = executors_.find(kind);
    if (it == executors_.end())
        throw Error(ErrorKind::NotFound, "no executor for " + std::string(to_string(kind)) + " jobs");
    return *it->second.executor;
}

std::string JobScheduler::submit(JobKind kind, const Json& args, const std::string& session_id)
{
    if (!args.is_object())
        throw Error(ErrorKind::Validation, "job args must be an object");
    RawArgs raw;
    for (const auto& [k, v] : args.items())
        raw[k] = v.is_string() ? v.get<std::string>() : v.dump();
    return submit(kind, raw, session_id);
}

std::string JobScheduler::submit(JobKind kind, const RawArgs& args, const std::string& session_id)
{
    Registered reg;
    {
        std::lock_guard lk(mu_);
        auto it = executors_.find(kind);
        if (it == executors_.end())
            throw Error(ErrorKind::NotFound, "no executor for " + std::string(to_string(kind)) + " jobs");
        reg = it->second;
    }
    auto normalized = validate_args(reg.executor->schema(), args);
    reg.executor->check_args(normalized);
    for (const auto& key : reg.executor->inputs(normalized))
        if (!inputs_->exists(key))
            throw Error(ErrorKind::NotFound, "input '" + key + "' not found");

    JobRecord rec;
    rec.id = "job-" + random_hex(8);
    rec.kind = kind;
    rec.resource = reg.def.resource;
    rec.args = args_to_json(normalized);
    rec.session_id = session_id;
    rec.submitted_at = Clock::now();
    rec.history.push_back({JobState::Submitted, rec.submitted_at});
    {
        std::lock_guard lk(mu_);
        if (stopping_)
            throw Error(ErrorKind::Unavailable, "job scheduler is shut down");
        normalized_[rec.id] = std::move(normalized);
        queue_.push_back(rec.id);
        jobs_[rec.id] = rec;
    }
    queue_cv_.notify_one();
    changed_.notify_all();
    log::info("jobs: submitted ", rec.id, " (", to_string(kind), ") for session ", session_id);
    return rec.id;
}

JobRecord JobScheduler::status(const std::string& job_id) const
{
    std::lock_guard lk(mu_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end())
        throw Error(ErrorKind::NotFound, "unknown job '" + job_id + "'");
    return it->second;
}

std::vector<JobRecord> JobScheduler::list(const std::string& session_id) const
{
    std::lock_guard lk(mu_);
    std::vector<JobRecord> out;
    for (const auto& [id, rec] : jobs_)
        if (rec.session_id == session_id)
            out.push_back(rec);
    std::sort(out.begin(), out.end(), [](const JobRecord& a, const JobRecord& b) {
        return a.submitted_at != b.submitted_at ? a.submitted_at < b.submitted_at : a.id < b.id;
    });
    return out;
}

CollectedOutputs JobScheduler::collect(const std::string& job_id) const
{
    auto rec = status(job_id);
    if (rec.state == JobState::Failed)
        throw Error(ErrorKind::JobFailed, "job " + job_id + " failed: " + rec.failure_log);
    if (rec.state != JobState::Succeeded)
        throw Error(ErrorKind::NotFinished, "job " + job_id + " is " + std::string(to_string(rec.state)));
    return {rec.text_output, rec.outputs};
}

bool JobScheduler::wait(const std::string& job_id, std::chrono::milliseconds timeout) const
{
    std::unique_lock lk(mu_);
    return changed_.wait_for(lk, timeout, [&] {
        auto it = jobs_.find(job_id);
        return it != jobs_.end() && is_terminal(it->second.state);
    });
}

void JobScheduler::advance(const std::string& job_id, JobState next)
{
    {
        std::lock_guard lk(mu_);
        auto& rec = jobs_.at(job_id);
        if (!is_valid_transition(rec.state, next))
            throw Error(ErrorKind::Precondition, "illegal job transition " + std::string(to_string(rec.state)) + " -> " +
                                                     std::string(to_string(next)));
        auto at = std::max(Clock::now(), rec.history.back().at);
        rec.state = next;
        rec.history.push_back({next, at});
        if (next == JobState::Running)
            rec.started_at = at;
        if (is_terminal(next))
            rec.finished_at = at;
    }
    changed_.notify_all();
}

void JobScheduler::worker()
{
    for (;;) {
        std::string id;
        {
            std::unique_lock lk(mu_);
            queue_cv_.wait(lk, [&] { return stopping_ || !queue_.empty(); });
            if (stopping_)
                return;
            id = queue_.front();
            queue_.pop_front();
        }
        execute(id);
    }
}

void JobScheduler::execute(const std::string& job_id)
{
    JobKind kind;
    std::string session;
    NormalizedArgs args;
    std::shared_ptr<Executor> exec;
    {
        std::lock_guard lk(mu_);
        const auto& rec = jobs_.at(job_id);
        kind = rec.kind;
        session = rec.session_id;
        args = normalized_.at(job_id);
        exec = executors_.at(kind).executor;
    }
    advance(job_id, JobState::Starting);
    fs::path ws = work_root_ / job_id;
    ExecutionContext ctx{ws / "inputs", ws / "args.json", ws / "outputs"};

    std::vector<OutputRef> outputs;
    std::string text;
    std::string failure;
    bool running = false;
    try {
        fs::create_directories(ctx.inputs_dir);
        fs::create_directories(ctx.outputs_dir);
        write_file(ctx.args_file, args_to_json(args).dump(2));
        advance(job_id, JobState::Running);
        running = true;
        for (const auto& key : exec->inputs(args))
            write_file(ctx.inputs_dir / fs::path(key).filename(), inputs_->get(key));
        exec->run(ctx);

        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(ctx.outputs_dir))
            if (e.is_regular_file())
                files.push_back(e.path());
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw Error(ErrorKind::JobFailed, "executor produced no outputs");
        for (const auto& f : files) {
            auto data = read_file(f);
            auto name = f.filename().string();
            auto art = artifacts_->put(name, data, session);
            outputs.push_back({name, art.id, art.content_type, art.object.size});
            auto ext = f.extension().string();
            if ((ext == ".csv" || ext == ".json" || ext == ".txt") && text.size() < config_.text_output_cap) {
                text += "== " + name + " ==\n" + data;
                if (!data.empty() && data.back() != '\n')
                    text += "\n";
            }
        }
        if (text.size() > config_.text_output_cap) {
            text.resize(config_.text_output_cap);
            text += "\n[truncated]\n";
        }
    } catch (const std::exception& e) {
        failure = e.what();
    }

    if (!running)
        advance(job_id, JobState::Running);
    {
        std::lock_guard lk(mu_);
        auto& rec = jobs_.at(job_id);
        if (failure.empty()) {
            rec.outputs = std::move(outputs);
            rec.text_output = std::move(text);
        } else {
            rec.failure_log = failure;
        }
        normalized_.erase(job_id);
    }
    advance(job_id, failure.empty() ? JobState::Succeeded : JobState::Failed);
    if (!failure.empty())
        log::warn("jobs: ", job_id, " failed: ", failure);
    if (!config_.keep_workspaces) {
        std::error_code ec;
        fs::remove_all(ws, ec);
    }
}

} // namespace copilot::jobs
