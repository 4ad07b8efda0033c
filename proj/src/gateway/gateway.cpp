// SPDX-License-Identifier: Apache-2.0
#include "copilot/gateway/gateway.hpp"

#include "copilot/core/error.hpp"

#include <thread>

namespace copilot::gateway {

void to_json(Json& j, const ModelResponse& r)
{
    j = Json{{"tool_calls", r.tool_calls}, {"finish_reason", r.finish_reason}};
    j["text"] = r.text ? Json(*r.text) : Json(nullptr);
}

void from_json(const Json& j, ModelResponse& r)
{
    if (j.contains("text") && j["text"].is_string())
        r.text = j["text"].get<std::string>();
    else
        r.text.reset();
    r.tool_calls = j.value("tool_calls", std::vector<ToolCall>{});
    r.finish_reason = j.value("finish_reason", std::string("stop"));
}

Gateway::Gateway(GuardrailPolicy policy) : policy_(std::move(policy)) { policy_.check(); }

void Gateway::add_backend(std::shared_ptr<Backend> backend)
{
    std::lock_guard lock(mutex_);
    auto id = backend->id();
    if (default_.empty())
        default_ = id;
    backends_[id] = std::move(backend);
}

void Gateway::set_default_backend(std::string id)
{
    std::lock_guard lock(mutex_);
    if (!backends_.count(id))
        throw Error(ErrorKind::NotFound, "unknown backend '" + id + "'");
    default_ = std::move(id);
}

bool Gateway::has_backend(const std::string& id) const
{
    std::lock_guard lock(mutex_);
    return backends_.count(id) > 0;
}

void Gateway::set_rate_limit(const std::string& backend_id, double per_second)
{
    std::lock_guard lock(mutex_);
    if (per_second <= 0) {
        limiters_.erase(backend_id);
        return;
    }
    auto limiter = std::make_unique<Limiter>();
    limiter->interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
        std::chrono::duration<double>(1.0 / per_second));
    limiters_[backend_id] = std::move(limiter);
}

Backend& Gateway::resolve(const std::string& id)
{
    std::lock_guard lock(mutex_);
    const auto& key = id.empty() ? default_ : id;
    auto it = backends_.find(key);
    if (it == backends_.end())
        throw Error(ErrorKind::Backend, "backend '" + key + "' is not configured");
    return *it->second;
}

void Gateway::throttle(const std::string& id)
{
    Limiter* limiter = nullptr;
    {
        std::lock_guard lock(mutex_);
        auto it = limiters_.find(id.empty() ? default_ : id);
        if (it == limiters_.end())
            return;
        limiter = it->second.get();
    }
    std::chrono::steady_clock::time_point slot;
    {
        std::lock_guard lock(limiter->mutex);
        auto now = std::chrono::steady_clock::now();
        slot = std::max(now, limiter->next);
        limiter->next = slot + limiter->interval;
    }
    std::this_thread::sleep_until(slot);
}

ModelResponse Gateway::complete(const ModelRequest& request)
{
    if (request.messages.empty())
        throw Error(ErrorKind::InvalidArgument, "model request has no messages");
    if (auto screen = guardrail_screen(request.messages, policy_); screen.blocked)
        throw Error(ErrorKind::Guardrail, "input blocked: " + screen.reason);

    auto& backend = resolve(request.backend);
    throttle(request.backend);
    auto response = backend.complete(request);

    if (response.text) {
        if (auto screen = guardrail_screen(*response.text, policy_); screen.blocked)
            throw Error(ErrorKind::Guardrail, "output blocked: " + screen.reason);
    }
    for (const auto& call : response.tool_calls)
        for (const auto& [k, v] : call.raw_args)
            if (auto screen = guardrail_screen(v, policy_); screen.blocked)
                throw Error(ErrorKind::Guardrail, "output blocked: " + screen.reason);
    return response;
}

} // namespace copilot::gateway
