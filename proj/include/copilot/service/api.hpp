// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/dataplane/artifacts.hpp"
#include "copilot/jobs/jobs.hpp"
#include "copilot/orchestrator/engine.hpp"

#include <map>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace copilot::service {

inline constexpr int kApiVersion = 1;

struct HttpRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> headers;  // names matched case-insensitively
    std::map<std::string, std::string> query;
    std::string body;

    std::optional<std::string> header(std::string_view name) const;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;

    Json json() const { return Json::parse(body); }
};

struct Principal {
    std::string user;
    std::string asserted_by;  // the header that carried the identity
};

struct ApiConfig {
    std::string auth_header = "X-Auth-User";
};

/// Returns nullopt when the identity header is missing or blank.
std::optional<Principal> authenticate_request(const HttpRequest& req, const ApiConfig& config);

/// Parsed POST /chat body.
struct ChatRequest {
    std::string session_id;
    std::string message;
    orchestrator::RunMode mode;
};

/// Throws Error(Validation) on a malformed body or mode.
ChatRequest parse_chat_request(const Json& body);

/// Transport-independent request handler. Routes:
///   GET  /health                      (no identity required)
///   GET  /agents
///   POST /chat
///   GET  /jobs?session_id=...
///   GET  /jobs/{id}[?session_id=...]
///   GET  /artifacts/{id}
class ApiHandler {
public:
    ApiHandler(ApiConfig config, orchestrator::Engine& engine, jobs::JobScheduler& jobs,
               dataplane::ArtifactStore& artifacts);

    HttpResponse handle(const HttpRequest& req);

    const ApiConfig& config() const noexcept { return config_; }

private:
    HttpResponse chat(const HttpRequest& req, const Principal& who);
    HttpResponse list_jobs(const HttpRequest& req);
    HttpResponse job(const HttpRequest& req, const std::string& id);
    HttpResponse artifact(const std::string& id);
    HttpResponse agents() const;

    ApiConfig config_;
    orchestrator::Engine& engine_;
    jobs::JobScheduler& jobs_;
    dataplane::ArtifactStore& artifacts_;
};

/// JSON error body {"error": {"category", "message"}} with the given status.
HttpResponse error_response(int status, const std::string& category, const std::string& message);

/// Maps an error kind to its HTTP status.
int http_status_for(ErrorKind kind) noexcept;

/// Installs every route on an httplib server, forwarding to `handler`.
void bind_routes(httplib::Server& server, ApiHandler& handler);

} // namespace copilot::service
