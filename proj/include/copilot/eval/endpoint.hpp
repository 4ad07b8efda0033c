// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/runtime/message.hpp"

#include <chrono>
#include <memory>
#include <string>

namespace copilot::service {
class ApiHandler;
}

namespace copilot::eval {

struct ChatReply {
    bool reachable = true;  // false: the endpoint could not be contacted at all
    int status = 0;
    Json body;
    std::string transport_error;
    std::chrono::milliseconds latency{0};
};

/// Somewhere a POST /chat body can be sent.
class ChatEndpoint {
public:
    virtual ~ChatEndpoint() = default;
    virtual ChatReply send(const Json& request, std::chrono::milliseconds timeout) = 0;
    virtual std::string describe() const = 0;
};

/// A running server, e.g. "http://127.0.0.1:8080".
class HttpChatEndpoint final : public ChatEndpoint {
public:
    HttpChatEndpoint(std::string base_url, std::string auth_header, std::string user);
    ChatReply send(const Json& request, std::chrono::milliseconds timeout) override;
    std::string describe() const override { return base_url_; }

private:
    std::string base_url_;
    std::string auth_header_;
    std::string user_;
};

/// The request handler in this process, through the same JSON contract as HTTP.
class LocalChatEndpoint final : public ChatEndpoint {
public:
    LocalChatEndpoint(service::ApiHandler& handler, std::string user);
    ChatReply send(const Json& request, std::chrono::milliseconds timeout) override;
    std::string describe() const override { return "in-process"; }

private:
    service::ApiHandler& handler_;
    std::string user_;
};

} // namespace copilot::eval
