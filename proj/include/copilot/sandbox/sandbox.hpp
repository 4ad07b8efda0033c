// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/core/util.hpp"
#include "copilot/runtime/message.hpp"
#include "copilot/sandbox/filter.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace copilot::sandbox {

struct SandboxLimits {
    std::chrono::milliseconds wall{30'000};
    std::chrono::seconds cpu{60};
    std::uint64_t memory_bytes = 2ull << 30;
    std::uint64_t output_bytes = 16ull << 20;  // per written file, stdout and stderr included

    /// Throws Error(Validation) unless every cap is positive.
    void check() const;
};

void to_json(Json& j, const SandboxLimits& l);
void from_json(const Json& j, SandboxLimits& l);

struct InputFile {
    std::string name;  // plain file name, no directories
    Bytes data;
};

struct Figure {
    std::string name;
    std::filesystem::path path;  // location inside the run's scratch area
    Bytes bytes;
};

struct ResourceUsage {
    double cpu_seconds = 0;
    long max_rss_kb = 0;
    std::chrono::milliseconds wall{0};
    bool network_isolated = false;
    bool privileges_dropped = false;
};

/// Failure categories: timeout, memory, output_limit, isolation, runtime_error, startup.
struct ExecutionOutcome {
    bool ok = false;
    std::string category;
    int exit_code = -1;
    int signal = 0;
    std::string stdout_text;
    std::string stderr_text;
    std::vector<Figure> figures;
    ResourceUsage usage;
    std::filesystem::path scratch;

    Json to_json() const;
};

struct SandboxConfig {
    std::filesystem::path root;       // empty: a fresh directory under the system temp dir
    std::string python = "python3";
    bool drop_privileges = true;      // only effective when running as root
    bool isolate_network = true;
    std::size_t parallelism = 2;
    bool keep_scratch = false;
    std::vector<std::string> preloaded = {"numpy", "pandas", "matplotlib", "seaborn"};
    SandboxLimits limits;
};

void from_json(const Json& j, SandboxConfig& c);

class Sandbox {
public:
    explicit Sandbox(SandboxConfig config);
    ~Sandbox();
    Sandbox(const Sandbox&) = delete;
    Sandbox& operator=(const Sandbox&) = delete;

    /// Runs an already-filtered script in a fresh scratch directory.
    /// `bindings` are the names the filter stripped; they are re-created inside the interpreter.
    ExecutionOutcome execute(std::string_view script, const std::vector<InputFile>& inputs = {},
                             const std::vector<ImportBinding>& bindings = {},
                             std::optional<SandboxLimits> limits = std::nullopt);

    std::size_t invocations() const noexcept { return invocations_.load(); }
    const SandboxConfig& config() const noexcept { return config_; }
    const std::filesystem::path& root() const noexcept { return root_; }

private:
    void prepare();
    void acquire();
    void release();

    SandboxConfig config_;
    std::filesystem::path root_;
    std::filesystem::path python_;
    bool owns_root_ = false;
    std::once_flag prepared_;
    bool mpl_cache_ready_ = false;
    std::atomic<std::size_t> invocations_{0};
    std::atomic<std::uint64_t> run_counter_{0};
    std::mutex slots_mu_;
    std::condition_variable slots_cv_;
    std::size_t active_ = 0;
};

} // namespace copilot::sandbox
