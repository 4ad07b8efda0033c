// SPDX-License-Identifier: Apache-2.0
#include "copilot/gateway/remote_backend.hpp"

#include "copilot/core/error.hpp"
#include "copilot/core/log.hpp"

#include <httplib.h>

#include <cstdlib>
#include <thread>

namespace copilot::gateway {

namespace {

thread_local int t_last_attempts = 0;

std::string env_or(const char* name, const std::string& fallback)
{
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : fallback;
}

Json encode_message(const Message& m)
{
    Json j{{"role", to_string(m.role)}, {"content", m.content}};
    if (!m.tool_calls.empty()) {
        Json calls = Json::array();
        for (const auto& c : m.tool_calls) {
            Json args = Json::object();
            for (const auto& [k, v] : c.raw_args)
                args[k] = v;
            calls.push_back({{"id", c.call_id},
                             {"type", "function"},
                             {"function", {{"name", c.name}, {"arguments", args.dump()}}}});
        }
        j["tool_calls"] = calls;
    }
    if (m.role == Role::Tool)
        j["tool_call_id"] = m.tool_call_id;
    return j;
}

} // namespace

RemoteConfig RemoteConfig::from_environment(RemoteConfig fallback)
{
    fallback.base_url = env_or("COPILOT_LLM_BASE_URL", fallback.base_url);
    fallback.path = env_or("COPILOT_LLM_PATH", fallback.path);
    fallback.api_key = env_or("COPILOT_LLM_API_KEY", fallback.api_key);
    fallback.model = env_or("COPILOT_LLM_MODEL", fallback.model);
    return fallback;
}

Json build_chat_request(const ModelRequest& request, const std::string& model)
{
    Json messages = Json::array();
    for (const auto& m : request.messages)
        messages.push_back(encode_message(m));
    Json body{{"model", model}, {"messages", messages}};
    if (!request.tool_specs.empty()) {
        Json tools = Json::array();
        for (const auto& spec : request.tool_specs)
            tools.push_back({{"type", "function"},
                             {"function",
                              {{"name", spec.name},
                               {"description", spec.model_description()},
                               {"parameters", spec.parameters_schema()}}}});
        body["tools"] = tools;
    }
    if (request.temperature)
        body["temperature"] = *request.temperature;
    return body;
}

ModelResponse parse_chat_response(const std::string& body)
{
    auto j = Json::parse(body, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorKind::MalformedPayload, "backend body is not JSON");
    if (!j.is_object() || !j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
        throw Error(ErrorKind::MalformedPayload, "backend body has no choices");
    const auto& choice = j["choices"][0];
    if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object())
        throw Error(ErrorKind::MalformedPayload, "choice has no message");
    const auto& msg = choice["message"];

    ModelResponse resp;
    if (msg.contains("content") && msg["content"].is_string())
        resp.text = msg["content"].get<std::string>();
    if (msg.contains("tool_calls") && msg["tool_calls"].is_array()) {
        for (const auto& c : msg["tool_calls"]) {
            if (!c.contains("function") || !c["function"].contains("name"))
                throw Error(ErrorKind::MalformedPayload, "tool call without function name");
            ToolCall call;
            call.call_id = c.value("id", std::string{});
            call.name = c["function"]["name"].get<std::string>();
            auto args_text = c["function"].value("arguments", std::string("{}"));
            auto args = Json::parse(args_text.empty() ? "{}" : args_text, nullptr, false);
            if (args.is_discarded() || !args.is_object())
                throw Error(ErrorKind::MalformedPayload, "tool call arguments are not a JSON object");
            for (const auto& [k, v] : args.items())
                call.raw_args[k] = v.is_string() ? v.get<std::string>() : v.dump();
            resp.tool_calls.push_back(std::move(call));
        }
    }
    if (!resp.text && resp.tool_calls.empty())
        throw Error(ErrorKind::MalformedPayload, "message has neither content nor tool calls");
    resp.finish_reason = choice.value("finish_reason", std::string(resp.tool_calls.empty() ? "stop" : "tool_calls"));
    return resp;
}

RemoteBackend::RemoteBackend(std::string id, RemoteConfig config)
    : id_(std::move(id)), config_(std::move(config))
{
    if (config_.base_url.empty())
        throw Error(ErrorKind::InvalidArgument, "remote backend '" + id_ + "' has no base URL");
}

int RemoteBackend::last_attempts() { return t_last_attempts; }

ModelResponse RemoteBackend::complete(const ModelRequest& request)
{
    auto body = build_chat_request(request, config_.model).dump();
    httplib::Headers headers;
    if (!config_.api_key.empty())
        headers.emplace("Authorization", "Bearer " + config_.api_key);

    httplib::Client client(config_.base_url);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout).count() % 1000000;
    client.set_connection_timeout(static_cast<time_t>(secs), static_cast<time_t>(usecs));
    client.set_read_timeout(static_cast<time_t>(secs), static_cast<time_t>(usecs));

    std::string last_error;
    t_last_attempts = 0;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        ++t_last_attempts;
        if (attempt > 0)
            std::this_thread::sleep_for(config_.retry_backoff * attempt);
        auto res = client.Post(config_.path, headers, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            log::warn("remote backend ", id_, " attempt ", attempt + 1, ": ", last_error);
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            log::warn("remote backend ", id_, " attempt ", attempt + 1, ": ", last_error);
            continue;
        }
        if (res->status >= 400)
            throw Error(ErrorKind::Backend, "backend rejected request with HTTP " + std::to_string(res->status));
        return parse_chat_response(res->body);
    }
    throw Error(ErrorKind::Transport, last_error + " after " + std::to_string(config_.max_retries) + " retries");
}

} // namespace copilot::gateway
