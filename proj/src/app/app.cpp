// SPDX-License-Identifier: Apache-2.0
#include "copilot/app/app.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"
#include "copilot/core/util.hpp"
#include "copilot/gateway/remote_backend.hpp"
#include "copilot/gateway/scripted_backend.hpp"
#include "copilot/jobs/segmentation.hpp"
#include "copilot/jobs/simulation.hpp"
#include "copilot/jobs/uq.hpp"

namespace copilot::app {

namespace fs = std::filesystem;

App::App(AppConfig config) : config_(std::move(config)), gateway_(config_.guardrail)
{
    build_gateway();

    if (config_.storage.kind == "fs") {
        kv_ = std::make_shared<dataplane::FsKvStore>(config_.storage.root / "kv");
        objects_ = std::make_shared<dataplane::FsObjectStore>(config_.storage.root / "objects");
    } else {
        kv_ = std::make_shared<dataplane::MemoryKvStore>();
        objects_ = std::make_shared<dataplane::MemoryObjectStore>();
    }
    data_ = std::make_unique<dataplane::DataPlane>(
        kv_, objects_, config_.storage.async_index ? dataplane::IndexQueue::Mode::Async : dataplane::IndexQueue::Mode::Sync);
    artifacts_ = std::make_shared<dataplane::ArtifactStore>(kv_, objects_);
    sandbox_ = std::make_unique<sandbox::Sandbox>(config_.sandbox);

    jobs_ = std::make_shared<jobs::JobScheduler>(config_.jobs, objects_, artifacts_);
    jobs_->register_executor({jobs::JobKind::Simulation, {}, jobs::ResourceClass::Cpu},
                             std::make_shared<jobs::SimulationExecutor>(config_.simulation));
    jobs_->register_executor({jobs::JobKind::ImageSegmentation, {}, jobs::ResourceClass::Gpu},
                             std::make_shared<jobs::SegmentationExecutor>(jobs::JobKind::ImageSegmentation));
    jobs_->register_executor({jobs::JobKind::VideoTracking, {}, jobs::ResourceClass::Gpu},
                             std::make_shared<jobs::SegmentationExecutor>(jobs::JobKind::VideoTracking));
    jobs_->register_executor({jobs::JobKind::UncertaintyQuantification, {}, jobs::ResourceClass::Cpu},
                             std::make_shared<jobs::UqExecutor>(config_.uq));

    agents::ToolkitServices services;
    if (config_.osti.live || !config_.osti.fixture_dir.empty())
        services.osti = std::make_shared<agents::OstiClient>(config_.osti);
    services.default_osti_rows = config_.osti_default_rows;

    agents::AnalysisConfig ac;
    ac.codegen_backend = config_.binding("analysis_codegen");
    ac.policy = config_.filter;
    ac.preview_lines = config_.analysis_preview_lines;
    services.analyzer = std::make_shared<agents::DatasetAnalyzer>(ac, *data_, *artifacts_, gateway_, *sandbox_);

    agents::HypothesisConfig hc;
    hc.tool_backend = config_.binding("hypothesis_tool");
    hc.fallback_backend = config_.binding("hypothesis_fallback");
    services.hypothesis = std::make_shared<agents::HypothesisGenerator>(hc, gateway_);
    services.jobs = jobs_;
    services.job_inputs = objects_;
    agents::register_domain_tools(tools_, services);

    if (config_.agents) {
        for (const auto& spec : *config_.agents)
            agents_.register_agent(spec, tools_);
    } else {
        agents::register_default_agents(agents_, tools_, config_.binding("agents"));
    }
    engine_ = std::make_unique<orchestrator::Engine>(config_.engine, agents_, tools_, gateway_);

    if (!config_.storage.inputs_dir.empty())
        seed_inputs(config_.storage.inputs_dir);
    if (!config_.storage.drop_folder.empty()) {
        crawl_once();
        if (config_.storage.crawl_interval.count() > 0) {
            crawler_ = std::make_unique<dataplane::Crawler>(*data_, config_.storage.drop_folder,
                                                            config_.storage.crawl_interval);
            crawler_->start();
        }
    }
}

App::~App()
{
    shutdown();
}

void App::shutdown()
{
    if (crawler_)
        crawler_->stop();
    if (jobs_)
        jobs_->shutdown();
}

void App::build_gateway()
{
    for (const auto& b : config_.backends) {
        if (b.type == "scripted") {
            if (b.rules.empty())
                throw Error(ErrorKind::Validation, "scripted backend '" + b.id + "' needs a rules file");
            gateway_.add_backend(std::make_shared<gateway::ScriptedBackend>(b.id, gateway::ScriptedRules::load(b.rules)));
        } else {
            gateway::RemoteConfig rc;
            const auto& s = b.settings;
            rc.base_url = s.value("base_url", rc.base_url);
            rc.path = s.value("path", rc.path);
            rc.api_key = s.value("api_key", rc.api_key);
            rc.model = s.value("model", rc.model);
            rc.max_retries = s.value("max_retries", rc.max_retries);
            rc.timeout = std::chrono::milliseconds(s.value("timeout_ms", static_cast<long>(rc.timeout.count())));
            rc = gateway::RemoteConfig::from_environment(rc);
            if (rc.base_url.empty()) {
                if (b.id == config_.default_backend)
                    throw Error(ErrorKind::Validation, "default backend '" + b.id + "' has no base_url");
                log::warn("backend ", b.id, " skipped: no base_url configured");
                continue;
            }
            gateway_.add_backend(std::make_shared<gateway::RemoteBackend>(b.id, rc));
        }
        if (b.rate_limit > 0)
            gateway_.set_rate_limit(b.id, b.rate_limit);
    }
    if (!config_.default_backend.empty())
        gateway_.set_default_backend(config_.default_backend);
}

std::size_t App::seed_inputs(const fs::path& dir)
{
    std::size_t n = 0;
    if (!fs::is_directory(dir))
        throw Error(ErrorKind::NotFound, "inputs directory '" + dir.string() + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file())
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        auto key = "inputs/" + fs::relative(p, dir).generic_string();
        if (objects_->exists(key))
            continue;
        objects_->put(key, read_file(p));
        ++n;
    }
    return n;
}

std::vector<std::string> App::crawl_once()
{
    if (config_.storage.drop_folder.empty())
        return {};
    auto ids = dataplane::crawl_source(*data_, config_.storage.drop_folder);
    data_->flush_index();
    return ids;
}

} // namespace copilot::app
