// SPDX-License-Identifier: Apache-2.0
#include "copilot/service/api.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"
#include "copilot/core/text.hpp"
#include "copilot/core/util.hpp"

namespace copilot::service {

namespace {

HttpResponse json_response(int status, const Json& body)
{
    HttpResponse r;
    r.status = status;
    r.body = body.dump();
    return r;
}

std::string fresh_session_id()
{
    return "s-" + random_hex(12);
}

Json trace_summary(const orchestrator::TurnResult& turn)
{
    Json decisions = Json::array();
    for (const auto& d : turn.trace.decisions()) {
        Json jd{{"kind", to_string(d.kind)}};
        if (!d.target.empty())
            jd["target"] = d.target;
        decisions.push_back(std::move(jd));
    }
    Json artifacts = Json::array();
    for (const auto& a : turn.trace.artifacts())
        artifacts.push_back(Json{{"id", a}, {"link", dataplane::artifact_link(a)}});
    return Json{{"agents", turn.trace.agents()},
                {"tools", turn.trace.tools()},
                {"decisions", decisions},
                {"artifacts", artifacts},
                {"steps", turn.step_count}};
}

std::string safe_filename(const std::string& name)
{
    std::string out;
    for (char c : name)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_') ? c : '_';
    return out.empty() ? "artifact" : out;
}

} // namespace

std::optional<std::string> HttpRequest::header(std::string_view name) const
{
    auto want = text::to_lower(name);
    for (const auto& [k, v] : headers)
        if (text::to_lower(k) == want)
            return v;
    return std::nullopt;
}

std::optional<Principal> authenticate_request(const HttpRequest& req, const ApiConfig& config)
{
    auto v = req.header(config.auth_header);
    if (!v)
        return std::nullopt;
    auto user = std::string(text::trim(*v));
    if (user.empty())
        return std::nullopt;
    return Principal{user, config.auth_header};
}

HttpResponse error_response(int status, const std::string& category, const std::string& message)
{
    return json_response(status, Json{{"error", {{"category", category}, {"message", message}}}});
}

int http_status_for(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::Validation:
    case ErrorKind::Parse:
    case ErrorKind::Precondition: return 400;
    case ErrorKind::NotFound: return 404;
    case ErrorKind::AlreadyExists:
    case ErrorKind::NotFinished: return 409;
    case ErrorKind::Guardrail: return 422;
    case ErrorKind::Timeout: return 504;
    case ErrorKind::Transport:
    case ErrorKind::Backend:
    case ErrorKind::MalformedPayload: return 502;
    case ErrorKind::Unavailable: return 503;
    default: return 500;
    }
}

ChatRequest parse_chat_request(const Json& body)
{
    if (!body.is_object())
        throw Error(ErrorKind::Validation, "request body must be a JSON object");
    ChatRequest req;
    if (!body.contains("message") || !body["message"].is_string() || text::trim(body["message"].get<std::string>()).empty())
        throw Error(ErrorKind::Validation, "field 'message' must be a non-empty string");
    req.message = body["message"].get<std::string>();
    if (body.contains("session_id")) {
        if (!body["session_id"].is_string() || body["session_id"].get<std::string>().empty())
            throw Error(ErrorKind::Validation, "field 'session_id' must be a non-empty string");
        req.session_id = body["session_id"].get<std::string>();
    }
    auto mode = body.value("mode", std::string("full"));
    if (mode == "full") {
        req.mode = orchestrator::RunMode::full();
    } else if (mode == "direct") {
        if (!body.contains("agent") || !body["agent"].is_string() || body["agent"].get<std::string>().empty())
            throw Error(ErrorKind::Validation, "direct mode needs field 'agent'");
        std::optional<std::string> tool;
        if (body.contains("tool") && !body["tool"].is_null()) {
            if (!body["tool"].is_string())
                throw Error(ErrorKind::Validation, "field 'tool' must be a string");
            tool = body["tool"].get<std::string>();
        }
        req.mode = orchestrator::RunMode::direct(body["agent"].get<std::string>(), tool);
    } else {
        throw Error(ErrorKind::Validation, "field 'mode' must be 'full' or 'direct'");
    }
    return req;
}

ApiHandler::ApiHandler(ApiConfig config, orchestrator::Engine& engine, jobs::JobScheduler& jobs,
                       dataplane::ArtifactStore& artifacts)
    : config_(std::move(config)), engine_(engine), jobs_(jobs), artifacts_(artifacts)
{
}

HttpResponse ApiHandler::handle(const HttpRequest& req)
{
    try {
        if (req.path == "/health") {
            if (req.method != "GET")
                return error_response(405, "method", "use GET");
            return json_response(200, Json{{"status", "ok"}, {"api_version", kApiVersion}});
        }
        auto who = authenticate_request(req, config_);
        if (!who)
            return error_response(401, "authentication", "missing identity header '" + config_.auth_header + "'");

        const std::string jobs_prefix = "/jobs/", art_prefix = "/artifacts/";
        if (req.path == "/chat") {
            if (req.method != "POST")
                return error_response(405, "method", "use POST");
            return chat(req, *who);
        }
        if (req.method != "GET")
            return error_response(405, "method", "use GET");
        if (req.path == "/agents")
            return agents();
        if (req.path == "/jobs")
            return list_jobs(req);
        if (req.path.rfind(jobs_prefix, 0) == 0 && req.path.size() > jobs_prefix.size())
            return job(req, req.path.substr(jobs_prefix.size()));
        if (req.path.rfind(art_prefix, 0) == 0 && req.path.size() > art_prefix.size())
            return artifact(req.path.substr(art_prefix.size()));
        return error_response(404, "not_found", "no route for " + req.path);
    } catch (const Error& e) {
        return error_response(http_status_for(e.kind()), std::string(e.category()), e.what());
    } catch (const std::exception& e) {
        log::error("api: ", req.method, " ", req.path, ": ", e.what());
        return error_response(500, "internal", e.what());
    }
}

HttpResponse ApiHandler::chat(const HttpRequest& req, const Principal& who)
{
    Json body;
    try {
        body = Json::parse(req.body);
    } catch (const Json::parse_error&) {
        return error_response(400, "validation", "request body is not valid JSON");
    }
    auto chat = parse_chat_request(body);
    if (chat.session_id.empty())
        chat.session_id = fresh_session_id();
    log::info("chat: user=", who.user, " session=", chat.session_id, " mode=", chat.mode.is_direct() ? "direct" : "full");

    auto turn = engine_.run_turn(chat.session_id, chat.message, chat.mode);
    Json out{{"api_version", kApiVersion},
             {"session_id", chat.session_id},
             {"ok", turn.ok},
             {"trace_summary", trace_summary(turn)},
             {"trace", turn.trace}};
    if (!turn.ok) {
        out["error"] = Json{{"category", turn.failure_category}, {"message", turn.error}};
        int status = turn.failure_category == "timeout" ? 504 : turn.failure_category == "guardrail" ? 422 : 500;
        return json_response(status, out);
    }
    out["final"] = turn.final.content;
    out["agent"] = turn.final.origin_agent;
    if (turn.checkpoint)
        out["checkpoint"] = turn.checkpoint->token;
    return json_response(200, out);
}

HttpResponse ApiHandler::list_jobs(const HttpRequest& req)
{
    auto it = req.query.find("session_id");
    if (it == req.query.end() || it->second.empty())
        return error_response(400, "validation", "query parameter 'session_id' is required");
    Json rows = Json::array();
    for (const auto& r : jobs_.list(it->second))
        rows.push_back(r.to_json());
    return json_response(200, Json{{"session_id", it->second}, {"jobs", rows}});
}

HttpResponse ApiHandler::job(const HttpRequest& req, const std::string& id)
{
    auto rec = jobs_.status(id);
    auto it = req.query.find("session_id");
    if (it != req.query.end() && it->second != rec.session_id)
        return error_response(404, "not_found", "unknown job '" + id + "'");
    return json_response(200, rec.to_json(true));
}

HttpResponse ApiHandler::artifact(const std::string& id)
{
    auto [info, data] = artifacts_.get(id);
    HttpResponse r;
    r.body = std::move(data);
    r.content_type = info.content_type;
    r.headers["Content-Disposition"] = "attachment; filename=\"" + safe_filename(info.name) + "\"";
    return r;
}

HttpResponse ApiHandler::agents() const
{
    Json list = Json::array();
    for (const auto& a : engine_.agents().agents())
        list.push_back(Json{{"name", a.name}, {"description", a.description}, {"tools", a.tool_names}});
    return json_response(200, Json{{"agents", list}});
}

} // namespace copilot::service
