// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/core/util.hpp"
#include "copilot/dataplane/artifacts.hpp"
#include "copilot/runtime/tool_spec.hpp"

#include <condition_variable>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace copilot::jobs {

enum class JobKind { Simulation, VideoTracking, ImageSegmentation, UncertaintyQuantification };
enum class JobState { Submitted, Starting, Running, Succeeded, Failed };
enum class ResourceClass { Cpu, Gpu };

std::string_view to_string(JobKind k) noexcept;
std::string_view to_string(JobState s) noexcept;
std::string_view to_string(ResourceClass r) noexcept;
JobKind parse_job_kind(std::string_view s);
bool is_terminal(JobState s) noexcept;
/// SUBMITTED -> STARTING -> RUNNING -> (SUCCEEDED | FAILED).
bool is_valid_transition(JobState from, JobState to) noexcept;

/// Executor contract: staged inputs directory and args document in, outputs
/// directory out. Anything written to outputs_dir becomes an artifact.
struct ExecutionContext {
    std::filesystem::path inputs_dir;
    std::filesystem::path args_file;
    std::filesystem::path outputs_dir;

    Json args() const;
};

class Executor {
public:
    virtual ~Executor() = default;
    virtual std::string name() const = 0;
    virtual JobKind kind() const = 0;
    /// Argument schema shared with the tool that submits this job.
    virtual ToolSpec schema() const = 0;
    /// Semantic checks beyond the schema (bounds etc.). Throws Error(Validation).
    virtual void check_args(const NormalizedArgs& args) const { (void)args; }
    /// Object-store keys to stage into the inputs directory.
    virtual std::vector<std::string> inputs(const NormalizedArgs& args) const
    {
        (void)args;
        return {};
    }
    virtual void run(const ExecutionContext& ctx) const = 0;
};

struct JobDefinition {
    JobKind kind;
    std::string executor;
    ResourceClass resource = ResourceClass::Cpu;
};

struct StateChange {
    JobState state;
    Timestamp at;
};

struct OutputRef {
    std::string name;
    std::string artifact_id;
    std::string content_type;
    std::uint64_t size = 0;
};

struct JobRecord {
    std::string id;
    JobKind kind = JobKind::Simulation;
    ResourceClass resource = ResourceClass::Cpu;
    Json args = Json::object();
    JobState state = JobState::Submitted;
    std::string session_id;
    Timestamp submitted_at{};
    std::optional<Timestamp> started_at;
    std::optional<Timestamp> finished_at;
    std::vector<OutputRef> outputs;
    std::string text_output;
    std::string failure_log;
    std::vector<StateChange> history;

    /// Summary form; text output and failure log only when `detailed`.
    Json to_json(bool detailed = false) const;
};

struct CollectedOutputs {
    std::string text;
    std::vector<OutputRef> artifacts;
};

struct SchedulerConfig {
    std::size_t workers = 2;
    std::filesystem::path work_root;  // empty: under the system temp dir
    bool keep_workspaces = false;
    std::size_t text_output_cap = 64 * 1024;
};

/// In-process job scheduler with a bounded worker pool.
class JobScheduler {
public:
    JobScheduler(SchedulerConfig config, std::shared_ptr<dataplane::ObjectStore> inputs,
                 std::shared_ptr<dataplane::ArtifactStore> artifacts);
    ~JobScheduler();
    JobScheduler(const JobScheduler&) = delete;
    JobScheduler& operator=(const JobScheduler&) = delete;

    void register_executor(JobDefinition def, std::shared_ptr<Executor> executor);
    const Executor& executor(JobKind kind) const;
    bool has_executor(JobKind kind) const;

    /// Validates args against the executor schema and enqueues. Throws
    /// Error(NotFound) for an unregistered kind or missing input object,
    /// Error(Validation) for bad args.
    std::string submit(JobKind kind, const RawArgs& args, const std::string& session_id);
    std::string submit(JobKind kind, const Json& args, const std::string& session_id);

    /// Non-blocking snapshot. Throws Error(NotFound).
    JobRecord status(const std::string& job_id) const;
    std::vector<JobRecord> list(const std::string& session_id) const;
    /// Throws Error(NotFinished) while running, Error(JobFailed) carrying the
    /// failure log for failed jobs.
    CollectedOutputs collect(const std::string& job_id) const;

    /// Test helper: blocks until the job is terminal or the timeout expires.
    bool wait(const std::string& job_id, std::chrono::milliseconds timeout) const;
    void shutdown();

private:
    struct Registered {
        JobDefinition def;
        std::shared_ptr<Executor> executor;
    };
    void worker();
    void execute(const std::string& job_id);
    void advance(const std::string& job_id, JobState next);

    SchedulerConfig config_;
    std::shared_ptr<dataplane::ObjectStore> inputs_;
    std::shared_ptr<dataplane::ArtifactStore> artifacts_;
    std::filesystem::path work_root_;
    bool owns_work_root_ = false;

    std::map<JobKind, Registered> executors_;
    mutable std::mutex mu_;
    mutable std::condition_variable changed_;
    std::condition_variable queue_cv_;
    std::map<std::string, JobRecord> jobs_;
    std::map<std::string, NormalizedArgs> normalized_;
    std::deque<std::string> queue_;
    bool stopping_ = false;
    std::vector<std::thread> workers_;
};

} // namespace copilot::jobs
