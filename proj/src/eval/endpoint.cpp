// SPDX-License-Identifier: Apache-2.0
#include "copilot/eval/endpoint.hpp"

#include "copilot/core/error.hpp"
#include "copilot/service/api.hpp"

#include <httplib.h>

namespace copilot::eval {

namespace {

Json parse_body(const std::string& body)
{
    auto j = Json::parse(body, nullptr, false);
    return j.is_discarded() ? Json{{"raw", body}} : j;
}

} // namespace

HttpChatEndpoint::HttpChatEndpoint(std::string base_url, std::string auth_header, std::string user)
    : base_url_(std::move(base_url)), auth_header_(std::move(auth_header)), user_(std::move(user))
{
    if (base_url_.empty())
        throw Error(ErrorKind::InvalidArgument, "endpoint url is empty");
}

ChatReply HttpChatEndpoint::send(const Json& request, std::chrono::milliseconds timeout)
{
    ChatReply reply;
    auto start = std::chrono::steady_clock::now();
    httplib::Client client(base_url_);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_connection_timeout(5, 0);
    auto res = client.Post("/chat", {{auth_header_, user_}}, request.dump(), "application/json");
    reply.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    if (!res) {
        auto err = res.error();
        reply.transport_error = httplib::to_string(err);
        // A read timeout means the server accepted the case but did not answer in time.
        reply.reachable = err == httplib::Error::Read;
        return reply;
    }
    reply.status = res->status;
    reply.body = parse_body(res->body);
    return reply;
}

LocalChatEndpoint::LocalChatEndpoint(service::ApiHandler& handler, std::string user)
    : handler_(handler), user_(std::move(user))
{
}

ChatReply LocalChatEndpoint::send(const Json& request, std::chrono::milliseconds)
{
    service::HttpRequest req;
    req.method = "POST";
    req.path = "/chat";
    req.headers[handler_.config().auth_header] = user_;
    req.body = request.dump();
    auto start = std::chrono::steady_clock::now();
    auto res = handler_.handle(req);
    ChatReply reply;
    reply.latency = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    reply.status = res.status;
    reply.body = parse_body(res.body);
    return reply;
}

} // namespace copilot::eval
