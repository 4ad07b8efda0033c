// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "copilot/gateway/model.hpp"

#include <chrono>
#include <string>

namespace copilot::gateway {

struct RemoteConfig {
    std::string base_url;                  // scheme://host[:port]
    std::string path = "/v1/chat/completions";
    std::string api_key;
    std::string model;
    int max_retries = 2;                   // transport-level failures only
    std::chrono::milliseconds timeout{60000};
    std::chrono::milliseconds retry_backoff{200};

    /// Reads COPILOT_LLM_BASE_URL, COPILOT_LLM_PATH, COPILOT_LLM_API_KEY and
    /// COPILOT_LLM_MODEL, keeping `fallback` values for unset variables.
    static RemoteConfig from_environment(RemoteConfig fallback);
};

/// Serializes a request in chat-completions shape.
Json build_chat_request(const ModelRequest& request, const std::string& model);

/// Parses a chat-completions response body; throws Error(MalformedPayload).
ModelResponse parse_chat_response(const std::string& body);

class RemoteBackend final : public Backend {
public:
    RemoteBackend(std::string id, RemoteConfig config);

    std::string id() const override { return id_; }
    ModelResponse complete(const ModelRequest& request) override;

    /// Attempts made by the most recent complete() on this thread.
    static int last_attempts();

private:
    std::string id_;
    RemoteConfig config_;
};

} // namespace copilot::gateway
