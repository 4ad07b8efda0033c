// SPDX-License-Identifier: Apache-2.0
#include "copilot/service/api.hpp"

#include <httplib.h>

namespace copilot::service {

namespace {

HttpRequest convert(const httplib::Request& in)
{
    HttpRequest r;
    r.method = in.method;
    r.path = in.path;
    r.body = in.body;
    for (const auto& [k, v] : in.headers)
        r.headers.emplace(k, v);
    for (const auto& [k, v] : in.params)
        r.query.emplace(k, v);
    return r;
}

void emit(const HttpResponse& from, httplib::Response& to)
{
    to.status = from.status;
    for (const auto& [k, v] : from.headers)
        to.set_header(k, v);
    to.set_content(from.body, from.content_type);
}

} // namespace

void bind_routes(httplib::Server& server, ApiHandler& handler)
{
    auto forward = [&handler](const httplib::Request& req, httplib::Response& res) {
        emit(handler.handle(convert(req)), res);
    };
    server.Get("/health", forward);
    server.Get("/agents", forward);
    server.Post("/chat", forward);
    server.Get("/jobs", forward);
    server.Get(R"(/jobs/([A-Za-z0-9_\-]+))", forward);
    server.Get(R"(/artifacts/([A-Za-z0-9_\-]+))", forward);
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty())
            res.set_content(R"({"error":{"category":"not_found","message":"no such route"}})", "application/json");
    });
}

} // namespace copilot::service
