// SPDX-License-Identifier: Apache-2.0
#include "copilot/app/config.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/util.hpp"

namespace copilot::app {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& p)
{
    if (p.empty())
        return {};
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

const Json& section(const Json& doc, const char* name)
{
    static const Json empty = Json::object();
    if (!doc.contains(name))
        return empty;
    const auto& s = doc.at(name);
    if (!s.is_object())
        throw Error(ErrorKind::Validation, std::string("config section '") + name + "' must be an object");
    return s;
}

} // namespace

std::string AppConfig::binding(const std::string& name) const
{
    auto it = bindings.find(name);
    return it == bindings.end() ? std::string{} : it->second;
}

AppConfig app_config_from_json(const Json& doc, const fs::path& base_dir)
{
    if (!doc.is_object())
        throw Error(ErrorKind::Validation, "configuration must be a JSON object");
    AppConfig c;
    c.base_dir = base_dir;
    try {
        const auto& server = section(doc, "server");
        c.server.host = server.value("host", c.server.host);
        c.server.port = server.value("port", c.server.port);
        c.server.auth_header = server.value("auth_header", c.server.auth_header);
        c.server.request_timeout = std::chrono::seconds(server.value("request_timeout_s", 600L));
        c.server.threads = server.value("threads", c.server.threads);

        const auto& models = section(doc, "models");
        c.default_backend = models.value("default", std::string{});
        for (const auto& b : models.value("backends", Json::array())) {
            BackendConfig bc;
            bc.id = b.at("id").get<std::string>();
            bc.type = b.at("type").get<std::string>();
            bc.rules = resolve(base_dir, b.value("rules", std::string{}));
            bc.settings = b;
            bc.rate_limit = b.value("rate_limit", 0.0);
            if (bc.type != "scripted" && bc.type != "chat_completions")
                throw Error(ErrorKind::Validation, "backend '" + bc.id + "' has unknown type '" + bc.type + "'");
            c.backends.push_back(std::move(bc));
        }
        c.bindings = models.value("bindings", std::map<std::string, std::string>{});
        if (doc.contains("guardrail"))
            c.guardrail = doc.at("guardrail").get<gateway::GuardrailPolicy>();

        const auto& engine = section(doc, "engine");
        c.engine.step_budget = engine.value("step_budget", c.engine.step_budget);
        c.engine.turn_timeout = std::chrono::milliseconds(
            static_cast<long>(engine.value("turn_timeout_s", 600.0) * 1000));
        c.engine.supervisor.prompt = engine.value("supervisor_prompt", std::string(
            "You are the supervisor of a team of scientific assistants. Read the user's request and hand it to the "
            "single best-suited sub-agent. Answer directly only for greetings or questions about the team itself."));
        c.engine.supervisor.model_binding = c.binding("supervisor");
        if (doc.contains("agents"))
            c.agents = doc.at("agents").get<std::vector<AgentSpec>>();

        if (doc.contains("sandbox")) {
            c.sandbox = doc.at("sandbox").get<sandbox::SandboxConfig>();
            c.sandbox.root = resolve(base_dir, doc.at("sandbox").value("root", std::string{}));
        }
        if (doc.contains("filter"))
            c.filter = doc.at("filter").get<sandbox::FilterPolicy>();

        const auto& st = section(doc, "storage");
        c.storage.kind = st.value("kind", c.storage.kind);
        if (c.storage.kind != "memory" && c.storage.kind != "fs")
            throw Error(ErrorKind::Validation, "storage kind must be 'memory' or 'fs'");
        c.storage.root = resolve(base_dir, st.value("root", std::string{}));
        if (c.storage.kind == "fs" && c.storage.root.empty())
            throw Error(ErrorKind::Validation, "fs storage needs a root");
        c.storage.async_index = st.value("async_index", false);
        c.storage.drop_folder = resolve(base_dir, st.value("drop_folder", std::string{}));
        c.storage.crawl_interval = std::chrono::seconds(st.value("crawl_interval_s", 0L));
        c.storage.inputs_dir = resolve(base_dir, st.value("inputs_dir", std::string{}));

        const auto& jb = section(doc, "jobs");
        c.jobs.workers = jb.value("workers", c.jobs.workers);
        c.jobs.work_root = resolve(base_dir, jb.value("work_root", std::string{}));
        c.jobs.keep_workspaces = jb.value("keep_workspaces", false);
        c.jobs.text_output_cap = jb.value("text_output_cap", c.jobs.text_output_cap);
        if (jb.contains("simulation"))
            c.simulation = jb.at("simulation").get<jobs::SimParams>();
        if (jb.contains("uq"))
            c.uq = jb.at("uq").get<jobs::UqConfig>();

        const auto& lit = section(doc, "literature");
        c.osti = lit.get<agents::OstiConfig>();
        c.osti.fixture_dir = resolve(base_dir, lit.value("fixture_dir", std::string{}));
        c.osti_default_rows = lit.value("default_rows", c.osti_default_rows);

        c.analysis_preview_lines = section(doc, "analysis").value("preview_lines", c.analysis_preview_lines);
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::Validation, std::string("configuration: ") + e.what());
    }
    c.guardrail.check();
    c.filter.check();
    c.sandbox.limits.check();
    c.simulation.check();
    return c;
}

AppConfig load_app_config(const fs::path& path)
{
    auto body = read_file(path);
    Json doc;
    try {
        doc = Json::parse(body, nullptr, true, /*ignore_comments=*/true);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
    }
    return app_config_from_json(doc, fs::absolute(path).parent_path());
}

} // namespace copilot::app
