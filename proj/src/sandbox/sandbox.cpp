// SPDX-License-Identifier: Apache-2.0
#include "copilot/sandbox/sandbox.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"
#include "copilot/core/text.hpp"

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <grp.h>
#include <sched.h>
#include <sys/resource.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace copilot::sandbox {

namespace detail {
extern const char* const kRunnerSource;
}

namespace {

constexpr uid_t kNobody = 65534;
constexpr int kExitIsolation = 86;
constexpr int kExitMemory = 87;
constexpr int kExitOutput = 88;
constexpr int kExitStartup = 127;

std::string read_capped(const fs::path& p, std::uint64_t cap, bool& truncated)
{
    truncated = false;
    std::error_code ec;
    if (!fs::exists(p, ec))
        return {};
    auto data = read_file(p);
    if (data.size() > cap) {
        data.resize(cap);
        truncated = true;
    }
    return data;
}

fs::path resolve_executable(const std::string& name)
{
    if (name.find('/') != std::string::npos)
        return fs::absolute(name);
    const char* path = std::getenv("PATH");
    for (const auto& dir : text::split(path ? path : "/usr/bin:/bin", ':')) {
        if (dir.empty())
            continue;
        fs::path candidate = fs::path(dir) / name;
        if (::access(candidate.c_str(), X_OK) == 0)
            return candidate;
    }
    throw Error(ErrorKind::NotFound, "interpreter '" + name + "' not found on PATH");
}

bool ancestors_traversable(const fs::path& p)
{
    for (fs::path cur = p; !cur.empty(); cur = cur.parent_path()) {
        struct stat st {};
        if (::stat(cur.c_str(), &st) != 0 || (st.st_mode & S_IXOTH) == 0)
            return false;
        if (cur == cur.root_path())
            break;
    }
    return true;
}

void chown_tree(const fs::path& p, uid_t uid, gid_t gid)
{
    (void)!::lchown(p.c_str(), uid, gid);
    std::error_code ec;
    for (auto it = fs::recursive_directory_iterator(p, ec); !ec && it != fs::recursive_directory_iterator(); it.increment(ec))
        (void)!::lchown(it->path().c_str(), uid, gid);
}

void valid_input_name(const std::string& name)
{
    if (name.empty() || name == "." || name == ".." || name.find('/') != std::string::npos ||
        name.find('\0') != std::string::npos || name.front() == '.')
        throw Error(ErrorKind::InvalidArgument, "invalid input file name '" + name + "'");
}

struct ChildReport {
    unsigned char netns = 0;
    unsigned char dropped = 0;
    int exec_errno = 0;
};

/// Everything the child needs, prepared before fork so the child only
/// makes async-signal-safe calls.
struct Launch {
    std::vector<std::string> argv_store;
    std::vector<std::string> env_store;
    std::vector<char*> argv;
    std::vector<char*> envp;
    std::string scratch;
    std::string out_path;
    std::string err_path;
    SandboxLimits limits;
    bool isolate_network = false;
    bool drop = false;

    void finalize()
    {
        for (auto& s : argv_store)
            argv.push_back(s.data());
        argv.push_back(nullptr);
        for (auto& s : env_store)
            envp.push_back(s.data());
        envp.push_back(nullptr);
    }
};

void set_limit(int resource, rlim_t value)
{
    struct rlimit rl {value, value};
    ::setrlimit(resource, &rl);
}

[[noreturn]] void child_main(const Launch& l, int report_fd)
{
    ChildReport report;
    ::setpgid(0, 0);
    if (l.isolate_network && ::unshare(CLONE_NEWNET) == 0)
        report.netns = 1;

    int out = ::open(l.out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    int err = ::open(l.err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (out < 0 || err < 0 || devnull < 0) {
        report.exec_errno = errno;
        (void)!::write(report_fd, &report, sizeof report);
        ::_exit(kExitStartup);
    }
    ::dup2(devnull, 0);
    ::dup2(out, 1);
    ::dup2(err, 2);

    set_limit(RLIMIT_AS, static_cast<rlim_t>(l.limits.memory_bytes));
    set_limit(RLIMIT_CPU, static_cast<rlim_t>(l.limits.cpu.count()));
    set_limit(RLIMIT_FSIZE, static_cast<rlim_t>(l.limits.output_bytes));
    set_limit(RLIMIT_CORE, 0);
    set_limit(RLIMIT_NOFILE, 256);

    if (l.drop) {
        set_limit(RLIMIT_NPROC, 512);
        if (::setgroups(0, nullptr) == 0 && ::setgid(kNobody) == 0 && ::setuid(kNobody) == 0)
            report.dropped = 1;
        else
            ::_exit(kExitStartup);
    }
    if (::chdir(l.scratch.c_str()) != 0) {
        report.exec_errno = errno;
        (void)!::write(report_fd, &report, sizeof report);
        ::_exit(kExitStartup);
    }
    ::execve(l.argv[0], l.argv.data(), l.envp.data());
    report.exec_errno = errno;
    (void)!::write(report_fd, &report, sizeof report);
    ::_exit(kExitStartup);
}

/// The child writes its report only on failure paths; a successful exec
/// closes the pipe, so the parent sees EOF and infers the flags itself.
struct Spawned {
    pid_t pid = -1;
    int report_fd = -1;
};

Spawned spawn(const Launch& l)
{
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) != 0)
        throw Error(ErrorKind::Io, std::string("pipe: ") + std::strerror(errno));
    pid_t pid = ::fork();
    if (pid < 0) {
        ::close(fds[0]);
        ::close(fds[1]);
        throw Error(ErrorKind::Io, std::string("fork: ") + std::strerror(errno));
    }
    if (pid == 0) {
        ::close(fds[0]);
        child_main(l, fds[1]);
    }
    ::setpgid(pid, pid);
    ::close(fds[1]);
    return {pid, fds[0]};
}

} // namespace

void SandboxLimits::check() const
{
    if (wall.count() <= 0 || cpu.count() <= 0 || memory_bytes == 0 || output_bytes == 0)
        throw Error(ErrorKind::Validation, "sandbox limits must all be positive");
}

void to_json(Json& j, const SandboxLimits& l)
{
    j = Json{{"wall_ms", l.wall.count()},
             {"cpu_s", l.cpu.count()},
             {"memory_bytes", l.memory_bytes},
             {"output_bytes", l.output_bytes}};
}

void from_json(const Json& j, SandboxLimits& l)
{
    SandboxLimits d;
    l.wall = std::chrono::milliseconds(j.value("wall_ms", d.wall.count()));
    l.cpu = std::chrono::seconds(j.value("cpu_s", d.cpu.count()));
    l.memory_bytes = j.value("memory_bytes", d.memory_bytes);
    l.output_bytes = j.value("output_bytes", d.output_bytes);
}

void from_json(const Json& j, SandboxConfig& c)
{
    SandboxConfig d;
    c.root = j.value("root", std::string{});
    c.python = j.value("python", d.python);
    c.drop_privileges = j.value("drop_privileges", d.drop_privileges);
    c.isolate_network = j.value("isolate_network", d.isolate_network);
    c.parallelism = j.value("parallelism", d.parallelism);
    c.keep_scratch = j.value("keep_scratch", d.keep_scratch);
    c.preloaded = j.value("preloaded", d.preloaded);
    c.limits = j.contains("limits") ? j.at("limits").get<SandboxLimits>() : d.limits;
}

Json ExecutionOutcome::to_json() const
{
    Json figs = Json::array();
    for (const auto& f : figures)
        figs.push_back(Json{{"name", f.name}, {"path", f.path.string()}, {"size", f.bytes.size()}});
    return Json{{"ok", ok},
                {"category", category},
                {"exit_code", exit_code},
                {"signal", signal},
                {"stdout", stdout_text},
                {"stderr", stderr_text},
                {"figures", figs},
                {"usage",
                 {{"cpu_seconds", usage.cpu_seconds},
                  {"max_rss_kb", usage.max_rss_kb},
                  {"wall_ms", usage.wall.count()},
                  {"network_isolated", usage.network_isolated},
                  {"privileges_dropped", usage.privileges_dropped}}}};
}

Sandbox::Sandbox(SandboxConfig config) : config_(std::move(config))
{
    config_.limits.check();
    if (config_.parallelism == 0)
        throw Error(ErrorKind::Validation, "sandbox parallelism must be at least 1");
    python_ = resolve_executable(config_.python);
    if (config_.root.empty()) {
        root_ = fs::temp_directory_path() / ("copilot-sandbox-" + std::to_string(::getpid()) + "-" + random_hex(4));
        owns_root_ = true;
    } else {
        root_ = fs::absolute(config_.root);
    }
    fs::create_directories(root_ / "runs");
    fs::permissions(root_, fs::perms::owner_all | fs::perms::group_exec | fs::perms::others_exec);
    fs::permissions(root_ / "runs", fs::perms::owner_all | fs::perms::group_exec | fs::perms::others_exec);
    write_file(root_ / "runner.py", detail::kRunnerSource);
    fs::permissions(root_ / "runner.py", fs::perms::owner_read | fs::perms::owner_write | fs::perms::group_read |
                                             fs::perms::others_read);
}

Sandbox::~Sandbox()
{
    if (owns_root_ && !config_.keep_scratch) {
        std::error_code ec;
        fs::remove_all(root_, ec);
    }
}

void Sandbox::prepare()
{
    if (std::find(config_.preloaded.begin(), config_.preloaded.end(), "matplotlib") == config_.preloaded.end())
        return;
    // Building the font cache takes seconds; do it once and copy it into each run.
    auto cache = root_ / "mplcache";
    fs::create_directories(cache);
    pid_t pid = ::fork();
    if (pid == 0) {
        int devnull = ::open("/dev/null", O_RDWR);
        ::dup2(devnull, 1);
        ::dup2(devnull, 2);
        ::setenv("MPLCONFIGDIR", cache.c_str(), 1);
        ::setenv("MPLBACKEND", "Agg", 1);
        ::execl(python_.c_str(), python_.c_str(), "-I", "-c", "import matplotlib.font_manager", nullptr);
        ::_exit(kExitStartup);
    }
    int status = 0;
    if (pid > 0 && ::waitpid(pid, &status, 0) == pid && WIFEXITED(status) && WEXITSTATUS(status) == 0)
        mpl_cache_ready_ = true;
    else
        log::warn("sandbox: matplotlib font cache warm-up failed");
}

void Sandbox::acquire()
{
    std::unique_lock lk(slots_mu_);
    slots_cv_.wait(lk, [&] { return active_ < config_.parallelism; });
    ++active_;
}

void Sandbox::release()
{
    {
        std::lock_guard lk(slots_mu_);
        --active_;
    }
    slots_cv_.notify_one();
}

ExecutionOutcome Sandbox::execute(std::string_view script, const std::vector<InputFile>& inputs,
                                  const std::vector<ImportBinding>& bindings, std::optional<SandboxLimits> limits)
{
    SandboxLimits lim = limits.value_or(config_.limits);
    lim.check();
    for (const auto& in : inputs)
        valid_input_name(in.name);
    std::call_once(prepared_, [this] { prepare(); });

    acquire();
    struct SlotGuard {
        Sandbox* s;
        ~SlotGuard() { s->release(); }
    } guard{this};
    ++invocations_;

    auto run_id = std::to_string(::getpid()) + "-" + std::to_string(++run_counter_) + "-" + random_hex(4);
    fs::path run_dir = root_ / "runs" / run_id;
    fs::path scratch = run_dir / "scratch";
    fs::create_directories(scratch);
    fs::permissions(run_dir, fs::perms::owner_all | fs::perms::group_exec | fs::perms::others_exec);

    Json input_names = Json::array();
    for (const auto& in : inputs) {
        write_file(scratch / in.name, in.data);
        input_names.push_back(in.name);
    }
    write_file(run_dir / "script.py", script);
    Json setup{{"inputs", input_names}, {"preloaded", config_.preloaded}, {"bindings", bindings}};
    write_file(run_dir / "setup.json", setup.dump());
    for (const char* f : {"script.py", "setup.json"})
        fs::permissions(run_dir / f, fs::perms::owner_read | fs::perms::owner_write | fs::perms::group_read |
                                         fs::perms::others_read);

    fs::path mpl_dir = scratch / ".mplconfig";
    fs::create_directories(mpl_dir);
    if (mpl_cache_ready_) {
        std::error_code ec;
        fs::copy(root_ / "mplcache", mpl_dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing, ec);
    }

    bool drop = config_.drop_privileges && ::geteuid() == 0;
    if (drop && !ancestors_traversable(scratch)) {
        log::warn("sandbox: scratch ancestors not traversable by others; running without privilege drop");
        drop = false;
    }
    if (drop)
        chown_tree(scratch, kNobody, kNobody);

    Launch l;
    l.argv_store = {python_.string(), "-I", "-B", (root_ / "runner.py").string(), run_dir.string(), scratch.string()};
    l.env_store = {"PATH=/usr/local/bin:/usr/bin:/bin",
                   "HOME=" + scratch.string(),
                   "TMPDIR=" + scratch.string(),
                   "MPLBACKEND=Agg",
                   "MPLCONFIGDIR=" + mpl_dir.string(),
                   "OPENBLAS_NUM_THREADS=1",
                   "OMP_NUM_THREADS=1",
                   "MKL_NUM_THREADS=1",
                   "LANG=C.UTF-8"};
    l.scratch = scratch.string();
    l.out_path = (run_dir / "stdout.txt").string();
    l.err_path = (run_dir / "stderr.txt").string();
    l.limits = lim;
    l.isolate_network = config_.isolate_network;
    l.drop = drop;
    l.finalize();

    ExecutionOutcome outcome;
    outcome.scratch = scratch;
    auto started = std::chrono::steady_clock::now();
    auto child = spawn(l);

    int status = 0;
    struct rusage ru {};
    bool timed_out = false;
    auto deadline = started + lim.wall;
    for (;;) {
        pid_t r = ::wait4(child.pid, &status, WNOHANG, &ru);
        if (r == child.pid)
            break;
        if (r < 0 && errno != EINTR)
            break;
        if (std::chrono::steady_clock::now() >= deadline) {
            timed_out = true;
            ::kill(-child.pid, SIGKILL);
            ::kill(child.pid, SIGKILL);
            ::wait4(child.pid, &status, 0, &ru);
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    // Reap anything the script left behind in its process group.
    ::kill(-child.pid, SIGKILL);
    outcome.usage.wall =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);

    ChildReport report;
    bool failed_before_exec = ::read(child.report_fd, &report, sizeof report) == static_cast<ssize_t>(sizeof report);
    ::close(child.report_fd);
    outcome.usage.network_isolated = config_.isolate_network && !failed_before_exec;
    outcome.usage.privileges_dropped = drop && !failed_before_exec;
    if (failed_before_exec) {
        outcome.usage.network_isolated = report.netns != 0;
        outcome.usage.privileges_dropped = report.dropped != 0;
    }
    outcome.usage.cpu_seconds = static_cast<double>(ru.ru_utime.tv_sec + ru.ru_stime.tv_sec) +
                                static_cast<double>(ru.ru_utime.tv_usec + ru.ru_stime.tv_usec) / 1e6;
    outcome.usage.max_rss_kb = ru.ru_maxrss;

    bool out_trunc = false, err_trunc = false;
    outcome.stdout_text = read_capped(run_dir / "stdout.txt", lim.output_bytes, out_trunc);
    outcome.stderr_text = read_capped(run_dir / "stderr.txt", lim.output_bytes, err_trunc);

    if (WIFEXITED(status))
        outcome.exit_code = WEXITSTATUS(status);
    if (WIFSIGNALED(status))
        outcome.signal = WTERMSIG(status);

    if (timed_out || outcome.signal == SIGXCPU)
        outcome.category = "timeout";
    else if (failed_before_exec || (outcome.exit_code == kExitStartup && report.exec_errno != 0))
        outcome.category = "startup";
    else if (outcome.exit_code == kExitIsolation)
        outcome.category = "isolation";
    else if (outcome.exit_code == kExitMemory || outcome.signal == SIGKILL)
        outcome.category = "memory";
    else if (outcome.exit_code == kExitOutput || outcome.signal == SIGXFSZ)
        outcome.category = "output_limit";
    else if (outcome.exit_code != 0 || outcome.signal != 0)
        outcome.category = "runtime_error";
    if (failed_before_exec && report.exec_errno != 0)
        outcome.stderr_text += std::string("sandbox startup failed: ") + std::strerror(report.exec_errno) + "\n";
    outcome.ok = outcome.category.empty();

    std::error_code ec;
    std::vector<fs::path> pngs;
    for (const auto& entry : fs::directory_iterator(scratch, ec)) {
        if (entry.is_symlink() || !entry.is_regular_file())
            continue;
        if (entry.path().extension() == ".png")
            pngs.push_back(entry.path());
    }
    std::sort(pngs.begin(), pngs.end());
    for (const auto& p : pngs) {
        if (fs::file_size(p, ec) > lim.output_bytes)
            continue;
        outcome.figures.push_back({p.filename().string(), p, read_file(p)});
    }

    if (!config_.keep_scratch)
        fs::remove_all(run_dir, ec);
    return outcome;
}

} // namespace copilot::sandbox
